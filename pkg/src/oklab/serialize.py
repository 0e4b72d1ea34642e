"""JSON encodings: exact rationals as [numerator, denominator] pairs."""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any


def rat(x) -> list[int]:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def unrat(pair) -> Fraction:
    if isinstance(pair, (int, str)):
        return Fraction(pair)
    num, den = pair
    if den <= 0:
        raise ValueError(f"denominator must be positive: {pair}")
    return Fraction(num, den)


def vector(v) -> list:
    return [rat(x) for x in v]


def unvector(v) -> tuple:
    return tuple(unrat(x) for x in v)


def cone_to_json(c) -> dict:
    return {"dim": c.dim, "generators": [vector(g) for g in c.generators]}


def cone_from_json(d):
    from .exactgeom import ConeGen
    return ConeGen(tuple(unvector(g) for g in d["generators"]), d["dim"])


def polytope_to_json(p) -> dict:
    return {"dim": p.dim, "vertices": [vector(v) for v in p.vertices]}


def polytope_from_json(d):
    from .exactgeom import hull
    verts = [unvector(v) for v in d["vertices"]]
    if any(len(v) != d["dim"] for v in verts):
        raise ValueError("vertex dimension mismatch")
    return hull(verts)


def to_jsonable(obj: Any):
    """Recursively convert Fractions, tuples and known geometry types."""
    from .exactgeom import ConeGen, Polytope
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return rat(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, ConeGen):
        return cone_to_json(obj)
    if isinstance(obj, Polytope):
        return polytope_to_json(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(x) for x in items]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any, pretty: bool = False) -> str:
    """Deterministic JSON: sorted keys, canonical rationals."""
    if pretty:
        return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))
