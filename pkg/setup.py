import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "fibcat._kernels",
        ["src/fibcat/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
    )
]

if cythonize is not None:
    # The package works without the extension (fibcat.kernels falls back to
    # the pure module), so a missing Cython just skips the fast path.
    setup(
        ext_modules=cythonize(
            extensions,
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
                "nonecheck": False,
                "cdivision": True,
            },
        )
    )
else:
    setup()
