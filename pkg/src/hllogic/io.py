"""JSON formats for frames, models and algebras.

Frames: ``{"kind", "worlds", "rel1", "rel2", "admissible"?}`` with pairs
of world names.  Models add ``{"valuation": {atom: [worlds]}}``.  Algebras
are ``{"elements", "leq", "sto"}`` with ``sto`` as ``[a, b, a~>b]`` rows.
Loaders validate; emitters produce the same shape back, so a load, emit,
load cycle is the identity on loaded values.
"""

from __future__ import annotations

import json
from typing import Any

from .algebra import HLAlgebra, validate_algebra
from .frames import (
    S4K,
    STO,
    GeneralS4KFrame,
    GeneralStoFrame,
    validate_general_s4k,
    validate_general_sto,
    validate_s4k,
    validate_sto,
)
from .semantics import Model, plain


class FormatError(ValueError):
    pass


def _field(d: dict, key: str, kind=list):
    if key not in d:
        raise FormatError(f"missing field {key!r}")
    v = d[key]
    if not isinstance(v, kind):
        raise FormatError(f"field {key!r} must be a {kind.__name__}")
    return v


def _pairs(raw, key: str) -> list:
    out = []
    for item in raw:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise FormatError(f"{key} entries must be [a, b] pairs")
        out.append((item[0], item[1]))
    return out


def frame_from_json(d: Any):
    """Plain frame, or a general frame when ``admissible`` is present."""
    if not isinstance(d, dict):
        raise FormatError("frame must be a JSON object")
    kind = d.get("kind")
    if kind not in (STO, S4K):
        raise FormatError(f"kind must be 'sto' or 's4k', got {kind!r}")
    worlds = _field(d, "worlds")
    if not all(isinstance(w, str) for w in worlds):
        raise FormatError("world names must be strings")
    rel1 = _pairs(_field(d, "rel1"), "rel1")
    rel2 = _pairs(_field(d, "rel2"), "rel2")
    frame = (validate_sto if kind == STO else validate_s4k)(worlds, rel1, rel2)
    if d.get("admissible") is None:
        return frame
    adm = []
    for s in _field(d, "admissible"):
        if not isinstance(s, list):
            raise FormatError("admissible entries must be lists of worlds")
        unknown = [w for w in s if w not in frame.index]
        if unknown:
            raise FormatError(f"unknown world {unknown[0]!r} in admissible set")
        adm.append(frame.mask(s))
    check = validate_general_sto if kind == STO else validate_general_s4k
    return check(frame, adm)


def frame_to_json(fr) -> dict:
    f = plain(fr)
    out = {
        "kind": f.kind,
        "worlds": list(f.worlds),
        "rel1": [list(p) for p in f.pairs1()],
        "rel2": [list(p) for p in f.pairs2()],
    }
    if isinstance(fr, (GeneralStoFrame, GeneralS4KFrame)):
        out["admissible"] = fr.admissible_names()
    return out


def model_from_json(d: Any) -> Model:
    frame = frame_from_json(d)
    raw = d.get("valuation", {})
    if not isinstance(raw, dict):
        raise FormatError("valuation must map atoms to lists of worlds")
    f = plain(frame)
    val = {}
    for p, ws in raw.items():
        if not isinstance(ws, list):
            raise FormatError(f"valuation of {p!r} must be a list of worlds")
        unknown = [w for w in ws if w not in f.index]
        if unknown:
            raise FormatError(f"unknown world {unknown[0]!r} in valuation of {p!r}")
        val[p] = f.mask(ws)
    return Model(frame, val)


def model_to_json(model: Model) -> dict:
    out = frame_to_json(model.frame)
    out["valuation"] = model.names()
    return out


def algebra_from_json(d: Any) -> HLAlgebra:
    if not isinstance(d, dict):
        raise FormatError("algebra must be a JSON object")
    elements = _field(d, "elements")
    leq = _pairs(_field(d, "leq"), "leq")
    sto = []
    for row in _field(d, "sto"):
        if not isinstance(row, list) or len(row) != 3:
            raise FormatError("sto entries must be [a, b, result] triples")
        sto.append(tuple(row))
    return validate_algebra(elements, leq, sto)


def algebra_to_json(alg: HLAlgebra) -> dict:
    return alg.to_json()


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: {e}") from None


def load_frame(path: str):
    return frame_from_json(load_json(path))


def load_model(path: str) -> Model:
    return model_from_json(load_json(path))


def load_algebra(path: str) -> HLAlgebra:
    return algebra_from_json(load_json(path))


def _flat(v) -> bool:
    return not isinstance(v, (list, dict)) or (
        isinstance(v, list) and all(not isinstance(x, (list, dict)) for x in v)
    )


def dumps(obj, indent: int = 0) -> str:
    """Sorted-key JSON with one line per pair, set or table row."""
    if _flat(obj):
        return json.dumps(obj)
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if not obj:
        return "[]"
    if all(_flat(x) for x in obj) and sum(len(json.dumps(x)) for x in obj) < 72:
        return json.dumps(obj)
    return "[\n" + ",\n".join(pad + dumps(x, indent + 1) for x in obj) + "\n" + end + "]"
