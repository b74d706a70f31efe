"""Canonical file schema for categories, functors, fibrations and reports.

Every serializer emits keys in a fixed order with sorted entry lists, so that
serialize . parse is the identity on canonical files and reports are
byte-reproducible.  Witnesses are expanded to full arrow data (id, src, tgt)
so they stay checkable without the original input file.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .core import FinCategory, Functor, check_category
from .corpus import GrothData
from .errors import SchemaError, UnknownMorphism
from .fibration import Fibration

FORMAT_VERSION = "1"


def dumps_canonical(payload: dict) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def file_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _gate(payload: dict, kind: str) -> None:
    if not isinstance(payload, dict):
        raise SchemaError("top level must be a mapping")
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {version!r}")
    if payload.get("kind") != kind:
        raise SchemaError(f"expected kind {kind!r}, found {payload.get('kind')!r}")


# -- categories -------------------------------------------------------------


def category_to_json(c: FinCategory, embed_header: bool = True) -> dict:
    payload: dict = {}
    if embed_header:
        payload["format_version"] = FORMAT_VERSION
        payload["kind"] = "category"
    payload["objects"] = sorted(c.objects)
    payload["morphisms"] = [
        {"id": c.mor_id(i), "src": c.obj_id(int(c.src[i])), "tgt": c.obj_id(int(c.tgt[i]))}
        for i in sorted(range(c.n_morphisms), key=c.mor_id)
    ]
    payload["identities"] = {
        c.obj_id(x): c.mor_id(int(c.ident[x]))
        for x in sorted(range(c.n_objects), key=c.obj_id)
    }
    gs, fs = np.nonzero(c.comp >= 0)
    triples = sorted(
        [c.mor_id(int(g)), c.mor_id(int(f)), c.mor_id(int(c.comp[g, f]))]
        for g, f in zip(gs.tolist(), fs.tolist())
    )
    payload["composition"] = triples
    return payload


def category_from_json(payload: dict, embedded: bool = False) -> FinCategory:
    if not embedded:
        _gate(payload, "category")
    try:
        morphisms = [(m["id"], m["src"], m["tgt"]) for m in payload["morphisms"]]
        return FinCategory.build(
            payload["objects"], morphisms, payload["identities"], payload["composition"]
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed category table: {exc}") from exc


# -- functors ---------------------------------------------------------------


def functor_to_json(fun: Functor, role: str = "functor") -> dict:
    s, t = fun.source, fun.target
    return {
        "format_version": FORMAT_VERSION,
        "kind": "functor",
        "role": role,
        "source": category_to_json(s, embed_header=False),
        "target": category_to_json(t, embed_header=False),
        "obj_map": {
            s.obj_id(x): t.obj_id(int(fun.omap[x]))
            for x in sorted(range(s.n_objects), key=s.obj_id)
        },
        "mor_map": {
            s.mor_id(f): t.mor_id(int(fun.mmap[f]))
            for f in sorted(range(s.n_morphisms), key=s.mor_id)
        },
    }


def functor_from_json(payload: dict) -> Functor:
    _gate(payload, "functor")
    try:
        source = category_from_json(payload["source"], embedded=True)
        target = category_from_json(payload["target"], embedded=True)
        obj_map, mor_map = payload["obj_map"], payload["mor_map"]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed functor file: {exc}") from exc
    return Functor.from_maps(source, target, obj_map, mor_map)


# -- fibrations -------------------------------------------------------------


def fibration_to_json(p: Fibration) -> dict:
    t, b = p.total, p.base
    return {
        "format_version": FORMAT_VERSION,
        "kind": "fibration",
        "role": "fibration",
        "total": category_to_json(t, embed_header=False),
        "base": category_to_json(b, embed_header=False),
        "proj_obj": {
            t.obj_id(x): b.obj_id(int(p.proj.omap[x]))
            for x in sorted(range(t.n_objects), key=t.obj_id)
        },
        "proj_mor": {
            t.mor_id(f): b.mor_id(int(p.proj.mmap[f]))
            for f in sorted(range(t.n_morphisms), key=t.mor_id)
        },
    }


def fibration_from_json(payload: dict) -> Fibration:
    _gate(payload, "fibration")
    try:
        total = category_from_json(payload["total"], embedded=True)
        base = category_from_json(payload["base"], embedded=True)
        proj = Functor.from_maps(total, base, payload["proj_obj"], payload["proj_mor"])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed fibration file: {exc}") from exc
    return Fibration(total, base, proj)


# -- Grothendieck data ------------------------------------------------------


def groth_to_json(data: GrothData) -> dict:
    base = data.base
    fibers = {
        base.obj_id(b): category_to_json(data.fibers[b], embed_header=False)
        for b in sorted(range(base.n_objects), key=base.obj_id)
    }
    transitions = {}
    for u in sorted(range(base.n_morphisms), key=base.mor_id):
        fun = data.transitions[u]
        s, t = fun.source, fun.target
        transitions[base.mor_id(u)] = {
            "obj_map": {
                s.obj_id(x): t.obj_id(int(fun.omap[x]))
                for x in sorted(range(s.n_objects), key=s.obj_id)
            },
            "mor_map": {
                s.mor_id(f): t.mor_id(int(fun.mmap[f]))
                for f in sorted(range(s.n_morphisms), key=s.mor_id)
            },
        }
    return {
        "format_version": FORMAT_VERSION,
        "kind": "grothendieck",
        "base": category_to_json(base, embed_header=False),
        "fibers": fibers,
        "transitions": transitions,
    }


def groth_from_json(payload: dict) -> GrothData:
    _gate(payload, "grothendieck")
    try:
        base = category_from_json(payload["base"], embedded=True)
        fibers = {
            base.o(name): category_from_json(sub, embedded=True)
            for name, sub in payload["fibers"].items()
        }
        transitions = {}
        for name, maps in payload["transitions"].items():
            u = base.m(name)
            transitions[u] = Functor.from_maps(
                fibers[int(base.src[u])], fibers[int(base.tgt[u])],
                maps["obj_map"], maps["mor_map"],
            )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed grothendieck file: {exc}") from exc
    return GrothData(base, fibers, transitions)


# -- file dispatch ----------------------------------------------------------

_PARSERS = {
    "category": category_from_json,
    "functor": functor_from_json,
    "fibration": fibration_from_json,
    "grothendieck": groth_from_json,
}


def loads_payload(text: str) -> dict:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid structured text: {exc}") from exc
    if not isinstance(payload, dict):
        raise SchemaError("top level must be a mapping")
    return payload


def parse_payload(payload: dict):
    kind = payload.get("kind")
    parser = _PARSERS.get(kind)
    if parser is None:
        raise SchemaError(f"unknown kind {kind!r}")
    return parser(payload)


def load_path(path):
    with open(path, "rb") as fh:
        data = fh.read()
    payload = loads_payload(data.decode("utf-8"))
    return parse_payload(payload), file_digest(data), payload.get("kind")


# -- witness expansion ------------------------------------------------------


def _arrow_entry(cat: FinCategory, mid: str) -> dict:
    m = cat.m(mid)
    return {"id": mid, "src": cat.obj_id(int(cat.src[m])), "tgt": cat.obj_id(int(cat.tgt[m]))}


def _expand_value(value, cat: FinCategory):
    if isinstance(value, str):
        try:
            return _arrow_entry(cat, value)
        except UnknownMorphism:
            return value
    if isinstance(value, list):
        return [_expand_value(v, cat) for v in value]
    if isinstance(value, dict):
        return {k: _expand_value(v, cat) for k, v in value.items()}
    return value


def expand_witness(p: Fibration, witness: dict | None) -> dict | None:
    """Embed src/tgt data for every arrow id a witness mentions."""
    if witness is None:
        return None
    out = {}
    for key, value in witness.items():
        if key == "kind":
            out[key] = value
        elif key in ("base", "u"):
            out[key] = _expand_value(value, p.base)
        else:
            out[key] = _expand_value(value, p.total)
    return out


def collapse_witness(witness: dict | None) -> dict | None:
    """Strip expansion back to bare arrow ids for re-verification."""
    if witness is None:
        return None

    def strip(value):
        if isinstance(value, dict):
            if set(value) == {"id", "src", "tgt"}:
                return value["id"]
            return {k: strip(v) for k, v in value.items()}
        if isinstance(value, list):
            return [strip(v) for v in value]
        return value

    return {k: strip(v) for k, v in witness.items()}
