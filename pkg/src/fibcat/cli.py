"""Command line interface: check, construct, analyze, round-trip, generate.

Exit codes: 0 success, 1 schema error, 2 law violation, 3 predicate failure,
4 precondition unmet, 5 size guard exceeded.  Reports are deterministic for a
fixed input and flag set; the trailing timing field is exempt.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .constructions import (
    arrow_category,
    artin_gluing,
    free_cocartesian,
    grothendieck,
)
from .core import (
    FinCategory,
    Functor,
    check_category,
    is_lex_category,
    max_morphisms_limit,
)
from .corpus import (
    GrothData,
    finset_category,
    random_gluing_functor,
    random_groth,
    random_intersection_lattice,
    random_poset,
)
from .errors import (
    FibcatError,
    LawViolation,
    PreconditionError,
    SchemaError,
    SizeGuardExceeded,
)
from .fibration import Fibration, is_bicartesian
from .moens import (
    bcc_via_transport,
    disjointness_characterizations,
    extensivity_characterizations,
    has_disjoint_sums,
    has_stable_sums,
    is_generalized_moens,
    is_moens,
    is_pre_moens,
    moens_consequences,
    satisfies_bcc,
    satisfies_dual_bcc,
    zawadowski_conditions,
)
from .schema import (
    FORMAT_VERSION,
    category_to_json,
    dumps_canonical,
    expand_witness,
    fibration_to_json,
    functor_to_json,
    groth_to_json,
    load_path,
)
from .theorem import roundtrip_phi_psi, roundtrip_psi_phi

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_LAW = 2
EXIT_PREDICATE = 3
EXIT_PRECONDITION = 4
EXIT_GUARD = 5


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_header(kind: str, digest: str) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "tool_version": __version__,
        "input_digest": digest,
    }


def _categories_of(obj) -> list[FinCategory]:
    if isinstance(obj, FinCategory):
        return [obj]
    if isinstance(obj, Functor):
        return [obj.source, obj.target]
    if isinstance(obj, Fibration):
        return [obj.total, obj.base]
    if isinstance(obj, GrothData):
        return [obj.base, *[obj.fibers[b] for b in sorted(obj.fibers)]]
    raise SchemaError(f"unsupported payload {type(obj).__name__!r}")


def cmd_check(args) -> int:
    obj, digest, kind = load_path(args.path)
    violations = []
    for cat in _categories_of(obj):
        violations.extend(check_category(cat).violations)
    report = _report_header("check-report", digest)
    report["input_kind"] = kind
    report["ok"] = not violations
    report["violations"] = violations
    _emit(dumps_canonical(report), args.out)
    return EXIT_OK if not violations else EXIT_LAW


def _as_fibration(obj, kind: str, max_morphisms) -> Fibration:
    if isinstance(obj, Fibration):
        return obj
    if isinstance(obj, GrothData):
        return grothendieck(obj, max_morphisms).fib
    if isinstance(obj, Functor):
        return artin_gluing(obj, max_morphisms).fib
    raise SchemaError(f"{kind!r} input does not describe a fibration")


def _suite_verdicts(prefix: str, suite) -> list[dict]:
    rows = [v for v in suite.verdicts]
    out = [{"name": f"{prefix}/{v.name}", "holds": v.holds, "witness": v.witness} for v in rows]
    out.append({"name": f"{prefix}/agree", "holds": suite.agree, "witness": None})
    return out


def _run_predicate(p: Fibration, name: str, mode: str | None) -> list[dict]:
    if name == "bcc":
        v = satisfies_bcc(p)
    elif name == "dual-bcc":
        v = satisfies_dual_bcc(p)
    elif name == "bcc-via-transport":
        v = bcc_via_transport(p)
    elif name == "stable-sums":
        v = has_stable_sums(p)
    elif name == "disjoint-sums":
        v = has_disjoint_sums(p)
    elif name == "pre-moens":
        v = is_pre_moens(p)
    elif name == "moens":
        v = is_moens(p)
    elif name == "generalized-moens":
        v = is_generalized_moens(p)
    elif name == "zawadowski":
        v = zawadowski_conditions(p)
    elif name == "disjointness":
        suite = disjointness_characterizations(
            p, mode="vertical" if mode == "vertical" else "pre-moens"
        )
        return _suite_verdicts(name, suite)
    elif name == "extensivity":
        suite = extensivity_characterizations(
            p, mode="vertical" if mode == "vertical" else "bc"
        )
        return _suite_verdicts(name, suite)
    elif name == "consequences":
        rep = moens_consequences(p)
        return [{"name": f"consequences/{v.name}", "holds": v.holds, "witness": v.witness}
                for v in rep.verdicts]
    else:
        raise SchemaError(f"unknown predicate {name!r}")
    return [{"name": v.name, "holds": v.holds, "witness": v.witness}]


DEFAULT_PREDICATES = (
    "bcc", "dual-bcc", "bcc-via-transport", "stable-sums", "disjoint-sums",
    "pre-moens", "moens", "generalized-moens", "zawadowski",
)


def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    obj, digest, kind = load_path(args.path)
    p = _as_fibration(obj, kind, args.max_morphisms)
    requested = bool(args.predicates)
    names = (
        [n for chunk in args.predicates for n in chunk.split(",") if n]
        if requested
        else list(DEFAULT_PREDICATES)
    )

    def run_one(name: str) -> list[dict]:
        try:
            return _run_predicate(p, name, args.mode)
        except PreconditionError as exc:
            if requested:
                raise
            return [{"name": name, "skipped": str(exc)}]

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        batches = list(pool.map(run_one, names))

    results = []
    for batch in batches:
        for row in batch:
            if "witness" in row:
                row["witness"] = expand_witness(p, row["witness"])
            results.append(row)
    report = _report_header("analysis-report", digest)
    report["predicates"] = names
    report["mode"] = args.mode
    report["results"] = results
    report["verdict"] = all(r.get("holds", True) for r in results)
    report["timing_ms"] = round((time.perf_counter() - t0) * 1000.0, 3)
    _emit(dumps_canonical(report), args.out)
    return EXIT_OK if report["verdict"] else EXIT_PREDICATE


def cmd_gluing(args) -> int:
    obj, _, kind = load_path(args.path)
    if not isinstance(obj, Functor):
        raise SchemaError(f"gluing needs a functor file, found {kind!r}")
    gl = artin_gluing(obj, args.max_morphisms)
    _emit(dumps_canonical(fibration_to_json(gl.fib)), args.out)
    return EXIT_OK


def cmd_groth(args) -> int:
    obj, _, kind = load_path(args.path)
    if not isinstance(obj, GrothData):
        raise SchemaError(f"groth needs a grothendieck file, found {kind!r}")
    g = grothendieck(obj, args.max_morphisms)
    _emit(dumps_canonical(fibration_to_json(g.fib)), args.out)
    return EXIT_OK


def cmd_free_cocart(args) -> int:
    obj, _, kind = load_path(args.path)
    if not isinstance(obj, Fibration):
        raise SchemaError(f"free-cocart needs a fibration file, found {kind!r}")
    fam = free_cocartesian(obj, args.max_morphisms)
    _emit(dumps_canonical(fibration_to_json(fam.fib)), args.out)
    return EXIT_OK


def cmd_arrow_cat(args) -> int:
    obj, _, kind = load_path(args.path)
    if not isinstance(obj, FinCategory):
        raise SchemaError(f"arrow-cat needs a category file, found {kind!r}")
    arr = arrow_category(obj, args.max_morphisms)
    _emit(dumps_canonical(category_to_json(arr.cat)), args.out)
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    t0 = time.perf_counter()
    obj, digest, kind = load_path(args.path)
    mode = args.mode or "moens"
    if isinstance(obj, Functor):
        rep = roundtrip_phi_psi(obj, mode, args.max_morphisms)
    else:
        p = _as_fibration(obj, kind, args.max_morphisms)
        rep = roundtrip_psi_phi(p, mode, args.max_morphisms)
    report = _report_header("roundtrip-report", digest)
    report["mode"] = mode
    report.update(rep.to_json())
    report["timing_ms"] = round((time.perf_counter() - t0) * 1000.0, 3)
    _emit(dumps_canonical(report), args.out)
    return EXIT_OK if rep.verdict else EXIT_PREDICATE


def cmd_gen(args) -> int:
    kind, seed, size = args.kind, args.seed, args.size
    if kind == "poset":
        cat = random_poset(seed, size=size or 5)
        payload = category_to_json(cat)
    elif kind == "lattice":
        cat = random_intersection_lattice(seed, universe_size=size or 4)
        if not is_lex_category(cat):
            raise LawViolation("generated lattice is not lex")
        payload = category_to_json(cat)
    elif kind == "finset":
        cat = finset_category(size or 3)
        payload = category_to_json(cat)
    elif kind == "groth":
        data = random_groth(seed, size=size or 4)
        for c in (data.base, *data.fibers.values()):
            if not check_category(c).ok:
                raise LawViolation("generated grothendieck data is not lawful")
        payload = groth_to_json(data)
        _guard_payload(len(payload["base"]["morphisms"]), args.max_morphisms)
        _emit(dumps_canonical(payload), args.out)
        return EXIT_OK
    elif kind == "gluing":
        fun = random_gluing_functor(seed)
        payload = functor_to_json(fun)
        _guard_payload(fun.source.n_morphisms + fun.target.n_morphisms, args.max_morphisms)
        _emit(dumps_canonical(payload), args.out)
        return EXIT_OK
    else:
        raise SchemaError(f"unknown generator kind {kind!r}")
    if not check_category(cat).ok:
        raise LawViolation("generated category is not lawful")
    _guard_payload(cat.n_morphisms, args.max_morphisms)
    _emit(dumps_canonical(payload), args.out)
    return EXIT_OK


def _guard_payload(count: int, max_morphisms) -> None:
    limit = max_morphisms_limit(max_morphisms)
    if count > limit:
        raise SizeGuardExceeded(f"generated object needs {count} morphisms; guard is {limit}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fibcat",
        description="verification engine for fibered finite categories",
    )
    parser.add_argument("--version", action="version", version=f"fibcat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, path=True):
        if path:
            sp.add_argument("path", help="input file")
        sp.add_argument("--out", default=None, help="write output to this path")
        sp.add_argument("--max-morphisms", type=int, default=None,
                        help="override the construction size guard")
        sp.add_argument("--mode", default=None, help="predicate or round-trip mode")
        sp.add_argument("--jobs", type=int, default=1, help="parallel predicate workers")
        sp.add_argument("--seed", type=int, default=1, help="generator seed")

    for name, fn, help_text in (
        ("check", cmd_check, "validate a file against the category laws"),
        ("analyze", cmd_analyze, "run fibration predicates and emit a report"),
        ("gluing", cmd_gluing, "build the Artin gluing of a functor file"),
        ("groth", cmd_groth, "assemble a split fibration from transition data"),
        ("free-cocart", cmd_free_cocart, "build the free cocartesian family"),
        ("arrow-cat", cmd_arrow_cat, "build the arrow category"),
        ("roundtrip", cmd_roundtrip, "verify the fibration/functor correspondence"),
    ):
        sp = sub.add_parser(name, help=help_text)
        common(sp)
        sp.set_defaults(func=fn)
        if name == "analyze":
            sp.add_argument(
                "--predicates", action="append", default=None,
                help="comma separated predicate names (repeatable)",
            )

    gp = sub.add_parser("gen", help="emit a deterministic corpus fixture")
    gp.add_argument("--kind", required=True,
                    choices=("poset", "lattice", "finset", "groth", "gluing"))
    gp.add_argument("--size", type=int, default=None, help="kind-specific size parameter")
    common(gp, path=False)
    gp.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except LawViolation as exc:
        print(f"law violation: {exc}", file=sys.stderr)
        return EXIT_LAW
    except SizeGuardExceeded as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except PreconditionError as exc:
        print(f"precondition unmet: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except FibcatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
