"""oklab command line: read a TOML scene, run one operation, print a JSON report.

Exit status: 0 when the report passes, 1 when a check fails (witnesses are
in the report), 2 when the configuration is unreadable or invalid.
"""
from __future__ import annotations

import argparse
import hashlib
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import jsonschema

from . import __version__
from . import bigcone, exactgeom, forms, gvf, okounkov, semigroups, toric
from . import linalg as la
from .exactgeom import GeometryError
from .parallel import pmap
from .serialize import dumps, to_jsonable

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class ConfigError(ValueError):
    pass


# -- schemas --------------------------------------------------------------------------

RAT = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^\s*-?\d+\s*(/\s*\d+\s*)?$"}]}
NUM = {"anyOf": [RAT, {"type": "number"}]}
VEC = {"type": "array", "items": RAT}
IVEC = {"type": "array", "items": {"type": "integer"}}
VECS = {"type": "array", "items": VEC}
IVECS = {"type": "array", "items": IVEC}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


FAN = _obj({"rays": IVECS, "cones": IVECS}, ["rays"])
DIVISOR = _obj({"coeffs": VEC}, ["coeffs"])
SURFACE = _obj({"name": {"type": "string"}, "gram": VECS, "eff": VECS, "nef": VECS})
MEASURE = _obj({"canonical": {"type": "boolean"},
                "places": {"type": "array", "items": _obj({"poly": {"type": "string"}, "inf": {"type": "boolean"},
                                                           "mass": RAT}, ["mass"])}})

KIND_SECTIONS = {
    "geometry": {"geometry": _obj({"points": VECS, "generators": VECS, "dim": {"type": "integer"},
                                   "point": VEC, "matrix": VECS, "subspace": VECS, "values": VEC,
                                   "lattice": VECS})},
    "semigroup": {"semigroup": _obj({"gens": IVECS, "level_one": IVECS, "graded": IVECS,
                                     "m_max": {"type": "integer", "minimum": 1}, "K": VECS})},
    "fan+divisor": {"fan": FAN, "divisor": DIVISOR, "divisor2": DIVISOR,
                    "okounkov": _obj({"m_max": {"type": "integer", "minimum": 1}, "order": IVEC,
                                      "tolerance": RAT, "K": VECS, "shrink": RAT})},
    "ideal": {"ideal": _obj({"nvars": {"type": "integer", "minimum": 1}, "generators": IVECS}, ["nvars"])},
    "surface": {"surface": SURFACE},
    "form": {"form": _obj({"gram": VECS, "rectangle": {"type": "integer", "minimum": 2},
                           "order": {"type": "integer"}, "rank": {"type": "integer"},
                           "values": {"type": "object", "additionalProperties": RAT}})},
    "gvf-measure": {"gvf": _obj({"p": {"type": "integer", "minimum": 0}, "r": RAT, "measure": MEASURE})},
    "chebyshev": {"chebyshev": _obj({"a": NUM, "b": NUM, "grid": {"type": "integer", "minimum": 64},
                                     "n_max": {"type": "integer", "minimum": 1}, "values": VEC})},
}


@dataclass
class Command:
    kind: str | tuple
    handler: Callable
    operations: tuple
    query: dict
    help: str


COMMANDS: dict[str, Command] = {}


def command(name: str, kind, operations, query: dict | None = None, help: str = ""):
    def deco(fn):
        COMMANDS[name] = Command(kind, fn, tuple(operations), query or {}, help)
        return fn
    return deco


def config_schema(cmd: Command) -> dict:
    kinds = cmd.kind if isinstance(cmd.kind, tuple) else (cmd.kind,)
    # one scene file may carry queries for every subcommand of its kind
    query = {}
    for other in COMMANDS.values():
        if set(kinds) & set(other.kind if isinstance(other.kind, tuple) else (other.kind,)):
            query.update(other.query)
    props = {"kind": {"enum": list(kinds)}, "seed": {"type": "integer"}, "query": _obj(query)}
    for k in kinds:
        props.update(KIND_SECTIONS[k])
    return _obj(props, ["kind"])


# -- helpers ------------------------------------------------------------------------------

def rat(x) -> Fraction:
    return Fraction(str(x).replace(" ", "")) if not isinstance(x, float) else Fraction(x)


def rvec(v) -> tuple:
    return tuple(rat(x) for x in v)


def parse_class(text: str) -> tuple:
    return tuple(rat(x) for x in text.split(","))


def q(cfg, key, default=None):
    return cfg.get("query", {}).get(key, default)


def need(cfg, section: str, key: str | None = None):
    if section not in cfg:
        raise ConfigError(f"missing [{section}] table")
    if key is None:
        return cfg[section]
    if key not in cfg[section]:
        raise ConfigError(f"missing {section}.{key}")
    return cfg[section][key]


def need_query(cfg, key: str, flag=None):
    if flag is not None:
        return flag
    v = q(cfg, key)
    if v is None:
        raise ConfigError(f"missing query.{key}")
    return v


def divisor_from(cfg, section="divisor"):
    fan, _ = toric.scene_from_dict({"fan": need(cfg, "fan")})
    return toric.ToricDivisor(fan, rvec(need(cfg, section, "coeffs")))


def surface_from(cfg):
    return bigcone.load_surface(need(cfg, "surface"))


def field_from(cfg):
    return gvf.BaseField(int(cfg.get("gvf", {}).get("p", 0)))


def measure_from(cfg):
    doc = cfg.get("gvf", {}).get("measure", {"canonical": True})
    field = field_from(cfg)
    masses = {}
    for e in doc.get("places", []):
        if "poly" not in e and not e.get("inf"):
            raise ConfigError("each place needs poly or inf = true")
        pl = gvf.Place.infinity(field) if e.get("inf") else gvf.Place.of(e["poly"], field)
        masses[pl] = rat(e["mass"])
    return gvf.PlaceMeasure(masses, bool(doc.get("canonical", False)))


def form_from(cfg):
    f = need(cfg, "form")
    if "rectangle" in f:
        return forms.rectangle_form(int(f["rectangle"]))
    if "gram" in f:
        return forms.GramMatrix([rvec(r) for r in f["gram"]])
    if "values" in f:
        vals = {tuple(int(i) for i in k.split(",")): rat(v) for k, v in f["values"].items()}
        return forms.SymMultiForm(int(f["order"]), int(f["rank"]), vals)
    raise ConfigError("[form] needs rectangle, gram or values")


def gram_of(cfg) -> forms.GramMatrix:
    T = form_from(cfg)
    if not isinstance(T, forms.GramMatrix):
        raise ConfigError("this command needs a Gram matrix")
    return T


def ok(result, passed: bool = True):
    return result, passed


# -- exactgeom ------------------------------------------------------------------------------

@command("hull", "geometry", ["hull", "polytope_volume"], help="convex hull, facets and volume of points")
def _hull(cfg, args):
    P = exactgeom.hull(rvec(p) for p in need(cfg, "geometry", "points"))
    lat = cfg["geometry"].get("lattice")
    vol = exactgeom.polytope_volume(P, exactgeom.LinMap([rvec(r) for r in lat]) if lat else None)
    return ok({"polytope": P, "facets": [[n, o] for n, o in P.facets], "volume": vol})


@command("dual-cone", "geometry", ["dual_cone"], help="generators of the dual cone")
def _dual(cfg, args):
    g = need(cfg, "geometry")
    C = exactgeom.ConeGen.of([rvec(x) for x in g.get("generators", [])], g.get("dim"))
    D = exactgeom.dual_cone(C)
    return ok({"cone": C, "dual": D, "double_dual_matches": exactgeom.dual_cone(D).same_set(C)})


@command("interior", "geometry", ["interior_contains"], help="is a point interior to the dual of a cone")
def _interior(cfg, args):
    g = need(cfg, "geometry")
    C = exactgeom.ConeGen.of([rvec(x) for x in g.get("generators", [])], g.get("dim"))
    return ok({"interior": exactgeom.interior_contains(C, rvec(need(cfg, "geometry", "point")))})


@command("project-cone", "geometry", ["project_cone"], help="image of a cone under a linear map")
def _project(cfg, args):
    g = need(cfg, "geometry")
    L = exactgeom.LinMap([rvec(r) for r in need(cfg, "geometry", "matrix")])
    C = exactgeom.ConeGen.of([rvec(x) for x in g.get("generators", [])], L.cols)
    r = exactgeom.project_cone(L, C)
    return ok({"image": r.cone, "surjective": r.surjective, "interior_meets_kernel": r.interior_meets_kernel})


@command("riesz", "geometry", ["riesz_extend"], help="positive extension of a functional")
def _riesz(cfg, args):
    g = need(cfg, "geometry")
    dim = int(need(cfg, "geometry", "dim"))
    P = exactgeom.ConeGen.of([rvec(x) for x in g.get("generators", [])], dim)
    try:
        H = exactgeom.riesz_extend(dim, P, [rvec(u) for u in g.get("subspace", [])], rvec(g.get("values", [])))
    except exactgeom.RieszInfeasible as err:
        return ok({"error": err.reason, "witness": err.witness}, False)
    return ok({"H": H})


# -- semigroups --------------------------------------------------------------------------------

def _gens(cfg):
    return semigroups.SemigroupGens.of(need(cfg, "semigroup", "gens"))


@command("khovanskii", "semigroup", ["khovanskii_shift", "group_closure", "cone_closure"],
         help="saturation shift with a window certificate")
def _khov(cfg, args):
    F = _gens(cfg)
    s = semigroups.khovanskii_shift(F, verify=False)
    cert = semigroups.verify_khovanskii(F, s)
    return ok({"s": s, "group": semigroups.group_closure(F), "cone": semigroups.cone_closure(F),
               "window": cert.window, "checked": cert.checked, "failures": cert.failures}, cert.valid)


@command("membership", "semigroup", ["membership"],
         {"point": IVEC, "bound": {"type": "integer", "minimum": 0}}, help="bounded semigroup membership")
def _member(cfg, args):
    v = semigroups.membership(_gens(cfg), need_query(cfg, "point"), need_query(cfg, "bound"))
    return ok({"member": "unknown" if v is semigroups.UNKNOWN else bool(v)})


@command("saturation", "semigroup", ["saturation_level"], help="least level from which K is saturated")
def _sat(cfg, args):
    s = need(cfg, "semigroup")
    m_max = int(s.get("m_max", 10))
    if "level_one" in s:
        S = semigroups.GradedSemigroup.from_level_one(s["level_one"], m_max)
    else:
        S = semigroups.GradedSemigroup.from_generators([(g[0], g[1:]) for g in need(cfg, "semigroup", "graded")], m_max)
    K = exactgeom.hull(rvec(v) for v in need(cfg, "semigroup", "K"))
    r = semigroups.saturation_level(S, K, m_max)
    return ok({"m0": r.m0, "per_level": r.per_level, "failures": r.failures[:20]}, r.found)


# -- toric -------------------------------------------------------------------------------------

@command("sections", "fan+divisor", ["section_polytope", "h0", "volume_sections"],
         {"m": {"type": "integer", "minimum": 0}, "m_max": {"type": "integer", "minimum": 1}},
         help="section polytope, h0 and section-growth volume")
def _sections(cfg, args):
    D = divisor_from(cfg)
    m, m_max = int(q(cfg, "m", 1)), int(q(cfg, "m_max", 10))
    est, lim = toric.volume_sections(D, m_max)
    return ok({"polytope": toric.section_polytope(D), "h0": toric.h0(D, m), "m": m,
               "estimate": est, "exact_limit": lim, "m_max": m_max})


@command("hilbert", "ideal", ["hilbert_degree"], {"n": {"type": "integer", "minimum": 0}},
         help="Hilbert polynomial degree data of a monomial ideal")
def _hilbert(cfg, args):
    I = toric.MonomialIdeal(int(need(cfg, "ideal", "nvars")), tuple(map(tuple, cfg["ideal"].get("generators", []))))
    e, deg = toric.hilbert_degree(I)
    out = {"projdim": e, "degree": deg, "polynomial": str(toric.hilbert_polynomial(I).as_expr())}
    if q(cfg, "n") is not None:
        out["hilbert_function"] = toric.hilbert_function(I, int(q(cfg, "n")))
    return ok(out)


def _meetjoin(cfg, fn):
    D1, D2 = divisor_from(cfg), divisor_from(cfg, "divisor2")
    fan, D = fn(D1, D2)
    return ok({"fan": fan.to_json(), "coeffs": D.coeffs, "refined": fan != D1.fan})


@command("meet", "fan+divisor", ["stable_meet"], help="stable meet of two divisors")
def _meet(cfg, args):
    return _meetjoin(cfg, toric.stable_meet)


@command("join", "fan+divisor", ["stable_join"], help="stable join of two divisors")
def _join(cfg, args):
    return _meetjoin(cfg, toric.stable_join)


@command("nef", "fan+divisor", ["is_nef", "is_ample"], help="nef and ample tests")
def _nef(cfg, args):
    D = divisor_from(cfg)
    return ok({"nef": toric.is_nef(D), "ample": toric.is_ample(D)})


@command("blowup", "fan+divisor", ["blowup_fan"], {"cone": IVEC}, help="blow up a smooth cone and pull back")
def _blowup(cfg, args):
    D = divisor_from(cfg)
    fan = toric.blowup_fan(D.fan, need_query(cfg, "cone"))
    P = toric.pullback(D, fan)
    return ok({"fan": fan.to_json(), "pullback": P.coeffs, "h0_preserved": toric.h0(P) == toric.h0(D)},
              toric.h0(P) == toric.h0(D))


# -- okounkov --------------------------------------------------------------------------------------

def _values(cfg, D=None):
    D = D or divisor_from(cfg)
    o = cfg.get("okounkov", {})
    val = okounkov.LexValuation(D.fan.dim, tuple(o.get("order", ())))
    return okounkov.GradedValueSets.from_divisor(D, int(o.get("m_max", 4)), val)


@command("okbody", "fan+divisor", ["value_set", "okounkov_body", "measure_report"],
         help="Okounkov body, its volume and the level-measure report")
def _okbody(cfg, args):
    V = _values(cfg)
    body = okounkov.okounkov_body(V)
    tol = cfg.get("okounkov", {}).get("tolerance")
    rep = okounkov.measure_report(V, None if tol is None else rat(tol))
    return ok({"body": body, "volume": okounkov.normalized_volume(V), "report": rep.rows,
               "body_volume": rep.body_volume, "converged": rep.converged},
              rep.converged is not False)


@command("logconcavity", "fan+divisor", ["logconcavity_check"], help="Minkowski inclusion and vol^(1/d) superadditivity")
def _logc(cfg, args):
    r = okounkov.logconcavity_check(divisor_from(cfg), divisor_from(cfg, "divisor2"),
                                    int(cfg.get("okounkov", {}).get("m_max", 1)))
    return ok(r.to_json(), r.holds)


@command("inner-approx", "fan+divisor", ["inner_approx"], help="finite generators saturating a compact K")
def _inner(cfg, args):
    V = _values(cfg)
    o = cfg.get("okounkov", {})
    if "K" in o:
        K = exactgeom.hull(rvec(v) for v in o["K"])
    else:
        K = okounkov.shrink_toward_centroid(okounkov.okounkov_body(V), rat(o.get("shrink", "1/4")))
    return ok(okounkov.inner_approx(V, K).to_json())


# -- forms ------------------------------------------------------------------------------------------

@command("form-eval", "form", ["evaluate", "rectangle_form"], {"args": VECS}, help="evaluate a symmetric form")
def _feval(cfg, args):
    T = form_from(cfg)
    T = T.form() if isinstance(T, forms.GramMatrix) else T
    return ok({"value": forms.evaluate(T, *[rvec(x) for x in need_query(cfg, "args")])})


@command("axioms", "form", ["hyperbolic_axioms_check"], {"samples": VECS}, help="sample-based hyperbolicity check")
def _axioms(cfg, args):
    r = forms.hyperbolic_axioms_check(form_from(cfg), [rvec(x) for x in need_query(cfg, "samples")])
    return ok(r.to_json(), r.passed)


@command("chain", "form", ["chain_inequality_check"], {"args": VECS}, help="(x_1..x_n)^n >= prod vol(x_i)")
def _chain(cfg, args):
    holds = forms.chain_inequality_check(form_from(cfg), *[rvec(x) for x in need_query(cfg, "args")])
    return ok({"holds": holds}, holds)


@command("signature", "form", ["signature"], help="inertia of a Gram matrix")
def _sig(cfg, args):
    G = gram_of(cfg)
    return ok({"signature": forms.signature(G), "hodge": forms.is_hodge(G)})


@command("castelnuovo", "form", ["castelnuovo_check"], {"P1": VEC, "P2": VEC, "D": VECS},
         help="(D,D) <= 2 (D.P1)(D.P2)")
def _cast(cfg, args):
    G = gram_of(cfg)
    P1, P2 = rvec(need_query(cfg, "P1")), rvec(need_query(cfg, "P2"))
    res = [(rvec(D), forms.castelnuovo_check(G, P1, P2, rvec(D))) for D in need_query(cfg, "D")]
    return ok({"results": res}, all(h for _, h in res))


@command("pdc", "form", ["pdc_analysis"], {"alpha": VEC}, help="negative semidefiniteness and kernel")
def _pdc(cfg, args):
    r = forms.pdc_analysis(gram_of(cfg), rvec(need_query(cfg, "alpha")))
    return ok(r.to_json(), r.neg_semidef)


@command("calabi", "form", ["calabi_kernel_check"], {"samples": VECS, "V": VECS, "a1": VEC, "a2": VEC},
         help="kernel check for two classes with equal top products")
def _calabi(cfg, args):
    T = form_from(cfg)
    T = T.form() if isinstance(T, forms.GramMatrix) else T
    holds = forms.calabi_kernel_check(T, [rvec(x) for x in need_query(cfg, "samples")],
                                      [rvec(x) for x in need_query(cfg, "V")],
                                      rvec(need_query(cfg, "a1")), rvec(need_query(cfg, "a2")))
    return ok({"holds": holds}, holds)


@command("concavity", "form", ["volume_root_concavity_check"],
         {"a": VEC, "b": VEC, "steps": {"type": "integer", "minimum": 1}}, help="vol^(1/n) concavity")
def _concave(cfg, args):
    holds = forms.volume_root_concavity_check(form_from(cfg), rvec(need_query(cfg, "a")),
                                              rvec(need_query(cfg, "b")), int(q(cfg, "steps", 4)))
    return ok({"holds": holds}, holds)


# -- bigcone ----------------------------------------------------------------------------------------------

def _class(cfg, args, key="class"):
    if getattr(args, "cls", None) and key == "class":
        return parse_class(args.cls)
    return rvec(need_query(cfg, key))


@command("zariski", "surface", ["vol", "psi"], {"class": VEC}, help="Zariski decomposition and volume")
def _zariski(cfg, args):
    S = surface_from(cfg)
    x = _class(cfg, args)
    if not S.is_psef(x):
        return ok({"class": x, "psef": False, "vol": Fraction(0)})
    z = bigcone.zariski(S, x)
    return ok({"class": x, "P": z.positive, "N": z.negative, "support": z.support,
               "coefficients": z.coefficients, "vol": z.vol})


@command("psi", "surface", ["psi"], {"class": VEC}, help="positive intersection product of a big class")
def _psi(cfg, args):
    S = surface_from(cfg)
    x = _class(cfg, args)
    p = bigcone.psi(S, x)
    return ok({"class": x, "psi": p, "vol": S.dot(p, p), "orthogonal": S.dot(p, la.sub(x, p)) == 0},
              S.dot(p, la.sub(x, p)) == 0)


@command("dvol-check", "surface", ["dvol_check"], {"class": VEC, "gamma": VEC, "t": RAT},
         help="d vol = 2 psi inside a chamber")
def _dvol(cfg, args):
    S = surface_from(cfg)
    r = bigcone.dvol_check(S, _class(cfg, args), rvec(need_query(cfg, "gamma")), rat(need_query(cfg, "t")))
    return ok(r.to_json(), r.holds is not False)


@command("fujita", "surface", ["fujita_approx"], {"class": VEC, "eps": RAT}, help="ample approximation from below")
def _fujita(cfg, args):
    S = surface_from(cfg)
    r = bigcone.fujita_approx(S, _class(cfg, args), rat(q(cfg, "eps", "1/10")))
    return ok(r.to_json())


@command("sandwich", "surface", ["duality_sandwich_check"], {"big": VECS, "dual": VECS},
         help="psi lands in the dual cone; interior nef classes are fixed")
def _sandwich(cfg, args):
    S = surface_from(cfg)
    big = [rvec(x) for x in q(cfg, "big", [])]
    if not big:
        rng = random.Random(cfg.get("seed", args.seed))
        amp = tuple(sum((g[i] for g in S.nef_gens), Fraction(0)) for i in range(S.rank))
        for _ in range(10):
            x = la.add(amp, tuple(Fraction(0) for _ in range(S.rank)))
            for e in S.eff_gens:
                x = la.add(x, la.scale(rng.randint(0, 3), e))
            big.append(x)
    r = bigcone.duality_sandwich_check(S, big, [rvec(x) for x in q(cfg, "dual", [])])
    return ok(r.to_json(), r.holds)


@command("bounds", "surface", ["bound_2215_check", "bound_15cor_check", "monotone_product_check"],
         {"A": VEC, "B": VEC, "beta": VEC, "gamma": VEC, "omega": VEC, "t": RAT,
          "c1": VEC, "c2": VEC, "d1": VEC, "d2": VEC}, help="volume bounds on nef classes")
def _bounds(cfg, args):
    S = surface_from(cfg)
    out = {}
    if q(cfg, "A") is not None:
        out["bound_2215"] = bigcone.bound_2215_check(S, rvec(q(cfg, "A")), rvec(need_query(cfg, "B")))
    if q(cfg, "beta") is not None:
        out["bound_15cor"] = bigcone.bound_15cor_check(S, rvec(q(cfg, "beta")), rvec(need_query(cfg, "gamma")),
                                                       rvec(need_query(cfg, "omega")), rat(need_query(cfg, "t")))
    if q(cfg, "c1") is not None:
        out["monotone"] = bigcone.monotone_product_check(S, *(rvec(need_query(cfg, k)) for k in ("c1", "c2", "d1", "d2")))
    if not out:
        raise ConfigError("bounds needs A/B, beta/gamma/omega/t or c1/c2/d1/d2 in [query]")
    return ok(out, all(out.values()))


# -- gvf ----------------------------------------------------------------------------------------------------

def _fn(cfg, args, key="f"):
    text = getattr(args, "f", None) if key == "f" else None
    text = text or need_query(cfg, key)
    return gvf.RatFunc.parse(text, field_from(cfg))


@command("product-formula", "gvf-measure", ["divisor_of", "product_formula_residual"],
         {"f": {"type": "string"}, "random": {"type": "integer", "minimum": 0}},
         help="divisor and product-formula residual")
def _pf(cfg, args):
    mu = measure_from(cfg)
    out = {}
    passed = True
    if getattr(args, "f", None) or q(cfg, "f"):
        f = _fn(cfg, args)
        div = gvf.divisor_of(f)
        res = gvf.product_formula_residual(f, mu)
        out.update({"divisor": {str(k): v for k, v in div.items()}, "residual": res,
                    "uncovered": [str(v) for v in gvf.uncovered_places(f, mu)]})
        passed = res == 0
    n = int(q(cfg, "random", 0))
    if n:
        rng = random.Random(cfg.get("seed", args.seed))
        fs = [random_ratfunc(rng, field_from(cfg)) for _ in range(n)]
        residuals = pmap(lambda f: gvf.product_formula_residual(f, mu), fs)
        bad = [str(f) for f, r in zip(fs, residuals) if r != 0]
        out["random"] = {"count": n, "nonzero": bad}
        passed = passed and not bad
    return ok(out, passed)


def random_ratfunc(rng: random.Random, field: gvf.BaseField, max_deg: int = 4) -> gvf.RatFunc:
    """A random nonzero element of k(t) with small integer coefficients."""
    def poly():
        while True:
            cs = [rng.randint(-5, 5) for _ in range(rng.randint(0, max_deg) + 1)]
            expr = sum(c * gvf.T ** i for i, c in enumerate(cs))
            P = field.poly(expr)
            if not P.is_zero:
                return P
    return gvf.RatFunc(poly(), poly(), field)


@command("height", "gvf-measure", ["height", "projective_height"],
         {"f": {"type": "string"}, "coords": {"type": "array", "items": {"type": "string"}}},
         help="height of a function or projective height of a tuple")
def _height(cfg, args):
    mu = measure_from(cfg)
    r = rat(cfg.get("gvf", {}).get("r", 1))
    out = {}
    if getattr(args, "f", None) or q(cfg, "f"):
        out["height"] = gvf.height(_fn(cfg, args), mu, r)
    if q(cfg, "coords"):
        out["projective_height"] = gvf.projective_height(
            [gvf.RatFunc.parse(s, field_from(cfg)) for s in q(cfg, "coords")], mu, r)
    if not out:
        raise ConfigError("height needs --f, query.f or query.coords")
    return ok(out)


@command("term-eval", "gvf-measure", ["eval_term"],
         {"term": {"type": "string"}, "args": {"type": "array", "items": {"type": "string"}}},
         help="integrate a tropical term against the measure")
def _term(cfg, args):
    mu = measure_from(cfg)
    try:
        tt = gvf.parse_term(getattr(args, "term", None) or need_query(cfg, "term"))
    except (SyntaxError, ValueError) as err:
        raise ConfigError(f"bad term: {err}")
    fs = [gvf.RatFunc.parse(s, field_from(cfg)) for s in need_query(cfg, "args")]
    return ok({"value": gvf.eval_term(tt, fs, mu)})


@command("whaples", "gvf-measure", ["artin_whaples_solve"],
         {"places": {"type": "array", "items": {"type": "string"}}, "fns": {"type": "array", "items": {"type": "string"}}},
         help="masses forced by the product formula")
def _whaples(cfg, args):
    field = field_from(cfg)
    places = [gvf.Place.infinity(field) if s == "inf" else gvf.Place.of(s, field) for s in need_query(cfg, "places")]
    fns = [gvf.RatFunc.parse(s, field) for s in need_query(cfg, "fns")]
    try:
        r = gvf.artin_whaples_solve(places, fns)
    except ValueError as err:
        return ok({"error": str(err)}, False)
    return ok(r.to_json(), r.unique)


@command("adelic", "gvf-measure", ["adelic_consistency_check"],
         {"sections": {"type": "array", "items": _obj({"m": {"type": "integer", "minimum": 1},
                                                       "f": {"type": "string"}}, ["m", "f"])},
          "alpha": RAT}, help="finite verifier for (1/m) integral of v(f) <= alpha")
def _adelic(cfg, args):
    mu = measure_from(cfg)
    items = [(s["m"], gvf.RatFunc.parse(s["f"], field_from(cfg))) for s in q(cfg, "sections", [])]
    masses, secs = gvf.sections_from_functions(mu, items)
    r = gvf.adelic_consistency_check(masses, secs, rat(q(cfg, "alpha", 0)))
    return ok(r.to_json(), r.holds)


@command("delta-measure", "surface", ["delta_measure"], {"a": VEC}, help="measure a.[D] on toric divisors")
def _delta(cfg, args):
    S = surface_from(cfg)
    r = gvf.delta_measure(S, rvec(need_query(cfg, "a")))
    return ok(r.to_json(), r.holds)


@command("chebyshev", "chebyshev", ["chebyshev_constant"], help="Chebyshev constant of an interval")
def _cheb(cfg, args):
    c = need(cfg, "chebyshev")
    tol = args.tolerance if args.tolerance is not None else 1e-9
    r = gvf.chebyshev_constant(float(rat(c["a"])), float(rat(c["b"])), int(c.get("grid", 2001)),
                               int(c.get("n_max", 32)), tol)
    return ok(r.to_json())


@command("fekete", "chebyshev", ["fekete_limit"], help="Fekete limit of a finite superadditive sequence")
def _fekete(cfg, args):
    vals = [rat(v) for v in need(cfg, "chebyshev", "values")]
    try:
        r = gvf.fekete_limit(vals, len(vals))
    except gvf.SuperadditivityError as err:
        return ok({"error": str(err), "witness": err.witness}, False)
    return ok(r.to_json())


# -- driver ------------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oklab", description="Exact toolkit for Okounkov bodies, volumes and heights.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, cmd in sorted(COMMANDS.items()):
        sp = sub.add_parser(name, help=cmd.help)
        sp.add_argument("--config", required=True, help="TOML scene file")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
        sp.add_argument("--pretty", action="store_true", help="indented JSON")
        sp.add_argument("--tolerance", type=float, default=None, help="LP tolerance (chebyshev only)")
        if "class" in cmd.query:
            sp.add_argument("--class", dest="cls", help="class coordinates, comma separated")
        if "f" in cmd.query:
            sp.add_argument("--f", help="rational function in t")
        if "term" in cmd.query:
            sp.add_argument("--term", help="tropical term in x1..xn")
    return p


def load_config(path: str, cmd: Command) -> tuple[dict, str]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}")
    try:
        cfg = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as err:
        raise ConfigError(f"invalid TOML: {err}")
    try:
        jsonschema.validate(cfg, config_schema(cmd))
    except jsonschema.ValidationError as err:
        path_s = "/".join(str(x) for x in err.absolute_path)
        raise ConfigError(f"schema violation at '{path_s}': {err.message}")
    return cfg, hashlib.sha256(raw).hexdigest()


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    cmd = COMMANDS[args.command]
    report = {"version": __version__, "command": args.command, "seed": args.seed}
    try:
        cfg, digest = load_config(args.config, cmd)
        report["config_sha256"] = digest
        report["seed"] = cfg.get("seed", args.seed)
        result, passed = cmd.handler(cfg, args)
    except ConfigError as err:
        report.update({"status": "config-error", "error": str(err)})
        out.write(dumps(report, args.pretty) + "\n")
        return 2
    except (GeometryError, forms.PreconditionError, ValueError, KeyError) as err:
        report.update({"status": "fail", "error": str(err),
                       "witness": to_jsonable(getattr(err, "witness", None))})
        out.write(dumps(report, args.pretty) + "\n")
        return 1
    report.update({"status": "pass" if passed else "fail", "result": result})
    out.write(dumps(report, args.pretty) + "\n")
    return 0 if passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
