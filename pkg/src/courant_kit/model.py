"""JSON model files: charts, Poisson bivectors, candidates, quotients, surjections, bialgebras.

Polynomials are sparse term lists ``[{"exponents": [..], "numerator": n,
"denominator": d}, ...]``; a string such as ``"x1^2 - 1/2 y"`` is accepted as
shorthand.  Scalars are integers, ``"p/q"`` strings or numerator/denominator
objects.  Floating-point literals are rejected everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import jsonschema

from .algebroid import AlgebroidSpec, BialgebroidSpec, NotPoissonError, poisson_bialgebroid
from .bialgebra import LieBialgebra, SubalgebraCandidate, build_double
from .courant import Double
from .dirac import (
    DiracCandidate,
    QuotientPoisson,
    Submersion,
    a_factor,
    astar_factor,
    bivector_graph,
    form_graph,
    null_dirac,
)
from .exact import Subspace
from .poly import Chart, DiffForm, Exterior, MultiVector, ParseError, Poly, parse_poly
from .pullback import BundleSurjection, tangent_surjection


class ModelError(ValueError):
    """Parse or validation failure; ``block`` names the offending part of the file."""

    def __init__(self, message: str, block: str = ""):
        self.block = block
        super().__init__(f"{block}: {message}" if block else message)


_SCALAR = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"},
        {"type": "object", "required": ["numerator"], "additionalProperties": False,
         "properties": {"numerator": {"type": "integer"}, "denominator": {"type": "integer"}}},
    ]
}
_TERM = {
    "type": "object", "required": ["exponents", "numerator"], "additionalProperties": False,
    "properties": {
        "exponents": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "numerator": {"type": "integer"},
        "denominator": {"type": "integer"},
    },
}
_POLY = {"oneOf": [{"type": "integer"}, {"type": "string"}, {"type": "array", "items": _TERM}]}
_EXTERIOR = {
    "type": "array",
    "items": {
        "type": "object", "required": ["index", "coeff"], "additionalProperties": False,
        "properties": {"index": {"type": "array", "items": {"type": "string"}}, "coeff": _POLY},
    },
}
_VECTOR = {"type": "array", "items": _POLY}
_MATRIX = {"type": "array", "items": _VECTOR}
_NAMES = {"type": "array", "items": {"type": "string", "minLength": 1}}
_ALGEBROID = {
    "type": "object", "required": ["anchor"], "additionalProperties": False,
    "properties": {
        "anchor": _MATRIX,
        "names": _NAMES,
        "brackets": {"type": "array", "items": {
            "type": "object", "required": ["pair", "section"], "additionalProperties": False,
            "properties": {"pair": {"type": "array", "items": {"type": "integer", "minimum": 0},
                                    "minItems": 2, "maxItems": 2},
                           "section": _VECTOR}}},
    },
}
_CANDIDATE = {
    "type": "object", "additionalProperties": False,
    "properties": {
        "frame": {"type": "array", "items": {
            "type": "object", "additionalProperties": False,
            "properties": {"a": _VECTOR, "astar": _VECTOR}}},
        "graph_bivector": _EXTERIOR,
        "graph_form": _EXTERIOR,
        "null": {"type": "array", "items": _VECTOR},
        "factor": {"enum": ["A", "A*"]},
        "point": {"type": "array", "items": _SCALAR},
    },
}
_TRIPLES = {"type": "array", "items": {"type": "array", "minItems": 4, "maxItems": 4,
                                       "prefixItems": [{"type": "integer"}] * 3 + [_SCALAR]}}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "courant-kit model",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "chart": _NAMES,
        "poisson": _EXTERIOR,
        "bialgebroid": {"type": "object", "required": ["A", "Astar"], "additionalProperties": False,
                        "properties": {"A": _ALGEBROID, "Astar": _ALGEBROID}},
        "dirac": {"type": "object", "additionalProperties": _CANDIDATE},
        "hamiltonian": {"type": "object", "additionalProperties": _EXTERIOR},
        "quotient": {"type": "object", "required": ["target", "map", "table"], "additionalProperties": False,
                     "properties": {"target": _NAMES, "map": _VECTOR, "table": _MATRIX}},
        "surjection": {"type": "object", "required": ["target", "map"], "additionalProperties": False,
                       "properties": {"target": _NAMES, "map": _VECTOR, "target_poisson": _EXTERIOR,
                                      "source_poisson": _EXTERIOR, "phi": _MATRIX,
                                      "dirac": {"type": "object", "additionalProperties": _CANDIDATE}}},
        "bialgebra": {"type": "object", "required": ["dim"], "additionalProperties": False,
                      "properties": {"dim": {"type": "integer", "minimum": 1}, "names": _NAMES,
                                     "c": _TRIPLES, "f": _TRIPLES,
                                     "candidates": {"type": "object", "additionalProperties": _MATRIX}}},
        "options": {"type": "object", "additionalProperties": False,
                    "properties": {"degree_cap": {"type": "integer", "minimum": 0},
                                   "point": {"type": "array", "items": _SCALAR}}},
    },
}


# ---------------------------------------------------------------------------
# decoding


def _reject_float(text):
    raise ModelError(f"floating-point literal {text} is not allowed; use an integer or a 'p/q' string")


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ModelError(f"duplicate key {k!r}")
        out[k] = v
    return out


def parse_json(text: str):
    try:
        return json.loads(text, object_pairs_hook=_no_duplicates, parse_float=_reject_float,
                          parse_constant=_reject_float)
    except json.JSONDecodeError as exc:
        raise ModelError(f"line {exc.lineno} column {exc.colno}: {exc.msg}", "json") from None


def scalar(v, block: str = "") -> Fraction:
    if isinstance(v, bool):
        raise ModelError("booleans are not scalars", block)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.replace(" ", ""))
        except (ValueError, ZeroDivisionError):
            raise ModelError(f"bad rational {v!r}", block) from None
    if isinstance(v, dict):
        den = v.get("denominator", 1)
        if den == 0:
            raise ModelError("zero denominator", block)
        return Fraction(v["numerator"], den)
    raise ModelError(f"not a rational scalar: {v!r}", block)


def poly(v, chart: Chart, block: str = "") -> Poly:
    if isinstance(v, bool):
        raise ModelError("booleans are not polynomials", block)
    if isinstance(v, int):
        return Poly.const(chart, v)
    if isinstance(v, str):
        try:
            return parse_poly(v, chart)
        except (ParseError, ValueError) as exc:
            raise ModelError(f"cannot parse {v!r}: {exc}", block) from None
    out = Poly(chart)
    for t in v:
        e = tuple(t["exponents"])
        if len(e) != chart.dim:
            raise ModelError(f"exponent vector {list(e)} has length {len(e)}, chart has {chart.dim}", block)
        den = t.get("denominator", 1)
        if den == 0:
            raise ModelError("zero denominator", block)
        out = out + Poly.monomial(chart, e, Fraction(t["numerator"], den))
    return out


def poly_to_json(p: Poly) -> list:
    return [{"exponents": list(e), "numerator": c.numerator, "denominator": c.denominator}
            for e, c in p.sorted_terms()]


def _index(names, chart_names, block):
    out = []
    for n in names:
        if n not in chart_names:
            raise ModelError(f"unknown basis name {n!r}", block)
        out.append(chart_names.index(n))
    return out


def exterior(v, chart: Chart, kind: str, degree: int | None, block: str, basis=None) -> Exterior:
    """Components {"index": [names], "coeff": poly}; names index ``basis`` (default: the chart)."""
    basis = tuple(basis if basis is not None else chart.names)
    comps = {}
    deg = degree
    for item in v:
        idx = _index(item["index"], basis, block)
        if deg is None:
            deg = len(idx)
        if len(idx) != deg:
            raise ModelError(f"component {item['index']} has degree {len(idx)}, expected {deg}", block)
        if len(set(idx)) != len(idx):
            raise ModelError(f"repeated index in {item['index']}", block)
        key = tuple(item["index"])
        if key in comps:
            raise ModelError(f"duplicate component {list(key)}", block)
        comps[key] = (idx, poly(item["coeff"], chart, block))
    deg = 0 if deg is None else deg
    total = Exterior.zero(chart, len(basis), deg)
    for idx, p in comps.values():
        total = total + Exterior(chart, len(basis), deg, {tuple(idx): p})
    if kind == "vector" and len(basis) == chart.dim:
        return MultiVector(chart, deg, total.comps)
    if kind == "form" and len(basis) == chart.dim:
        return DiffForm(chart, deg, total.comps)
    return total


def vector(v, chart: Chart, length: int, block: str) -> list[Poly]:
    if len(v) != length:
        raise ModelError(f"expected {length} coefficients, got {len(v)}", block)
    return [poly(x, chart, block) for x in v]


# ---------------------------------------------------------------------------
# the model


@dataclass
class Model:
    raw: dict
    chart: Chart | None = None
    pi: MultiVector | None = None
    bialgebroid: BialgebroidSpec | None = None
    double: Double | None = None
    candidates: dict = field(default_factory=dict)
    hamiltonians: dict = field(default_factory=dict)
    quotient: QuotientPoisson | None = None
    surjection: BundleSurjection | None = None
    target_candidates: dict = field(default_factory=dict)
    bialgebra: LieBialgebra | None = None
    bialgebra_candidates: dict = field(default_factory=dict)
    graph_bivectors: dict = field(default_factory=dict)
    degree_cap: int = 2
    point: list | None = None

    def require(self, attr: str, what: str):
        val = getattr(self, attr)
        if val is None or val == {}:
            raise ModelError(f"model has no {what} block", what)
        return val


def load_model(path: str) -> Model:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return build_model(parse_json(text))


def build_model(data) -> Model:
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "model"
        raise ModelError(exc.message, where) from None
    m = Model(data)
    opts = data.get("options", {})
    m.degree_cap = opts.get("degree_cap", 2)
    if "point" in opts:
        m.point = [scalar(x, "options") for x in opts["point"]]

    if "chart" in data:
        names = data["chart"]
        if len(set(names)) != len(names):
            raise ModelError("repeated coordinate name", "chart")
        m.chart = Chart(tuple(names))
        if m.point is not None and len(m.point) != m.chart.dim:
            raise ModelError(f"point needs {m.chart.dim} coordinates", "options")
        _load_bialgebroid(m, data)
        _load_candidates(m, data)
        if "quotient" in data:
            _load_quotient(m, data["quotient"])
        if "surjection" in data:
            _load_surjection(m, data["surjection"])
    else:
        for key in ("poisson", "bialgebroid", "dirac", "hamiltonian", "quotient", "surjection"):
            if key in data:
                raise ModelError("block needs a chart", key)
    if "bialgebra" in data:
        _load_bialgebra(m, data["bialgebra"])
    return m


def _poisson_double(m: Model, pi: MultiVector, block: str) -> BialgebroidSpec:
    try:
        return poisson_bialgebroid(pi)
    except NotPoissonError as exc:
        raise ModelError(f"bivector is not Poisson, [pi,pi] = {exc.residual}", block) from None


def _load_algebroid(spec: dict, chart: Chart, block: str, default_names) -> AlgebroidSpec:
    anchor = [vector(row, chart, chart.dim, block) for row in spec["anchor"]]
    r = len(anchor)
    structure = {}
    for br in spec.get("brackets", []):
        i, j = br["pair"]
        if not (0 <= i < r and 0 <= j < r) or i == j:
            raise ModelError(f"bad bracket pair {br['pair']}", block)
        sec = vector(br["section"], chart, r, block)
        if (min(i, j), max(i, j)) in structure:
            raise ModelError(f"bracket {br['pair']} given twice", block)
        structure[(min(i, j), max(i, j))] = sec if i < j else [-p for p in sec]
    names = tuple(spec.get("names", default_names(r)))
    if len(names) != r:
        raise ModelError("names do not match the rank", block)
    alg = AlgebroidSpec(chart, r, anchor, structure, names)
    try:
        alg.check()
    except ValueError as exc:
        raise ModelError(str(exc), block) from None
    return alg


def _load_bialgebroid(m: Model, data: dict):
    chart = m.chart
    if "bialgebroid" in data:
        if "poisson" in data:
            raise ModelError("give either a poisson block or a bialgebroid block", "bialgebroid")
        blk = data["bialgebroid"]
        A = _load_algebroid(blk["A"], chart, "bialgebroid/A", lambda r: [f"e{i + 1}" for i in range(r)])
        As = _load_algebroid(blk["Astar"], chart, "bialgebroid/Astar", lambda r: [f"e{i + 1}*" for i in range(r)])
        if A.rank != As.rank:
            raise ModelError("A and Astar have different ranks", "bialgebroid")
        m.bialgebroid = BialgebroidSpec(A, As, "model")
    else:
        pi = exterior(data.get("poisson", []), chart, "vector", 2, "poisson")
        m.pi = pi
        m.bialgebroid = _poisson_double(m, pi, "poisson")
    m.double = Double(m.bialgebroid)


def _candidate(m: Model, spec: dict, double: Double, name: str, block: str) -> DiracCandidate:
    chart = double.chart
    kinds = [k for k in ("frame", "graph_bivector", "graph_form", "null", "factor") if k in spec]
    if len(kinds) != 1:
        raise ModelError("give exactly one of frame, graph_bivector, graph_form, null, factor", block)
    kind = kinds[0]
    r = double.rank
    b = double.b
    # Poisson models index bivectors and forms by coordinate names
    abasis = None if m.pi is not None else b.A.names
    sbasis = None if m.pi is not None else b.Astar.names
    if kind == "frame":
        frame = []
        for item in spec["frame"]:
            a = vector(item.get("a", [0] * r), chart, r, block)
            s = vector(item.get("astar", [0] * r), chart, r, block)
            frame.append(double.section(a, s))
        L = DiracCandidate(double, frame, name=name)
    elif kind == "graph_bivector":
        pi1 = exterior(spec[kind], chart, "vector", 2, block, abasis)
        L = bivector_graph(double, pi1, name)
        if double is m.double:
            m.graph_bivectors[name] = pi1
    elif kind == "graph_form":
        L = form_graph(double, exterior(spec[kind], chart, "form", 2, block, sbasis), name)
    elif kind == "factor":
        L = a_factor(double, name) if spec[kind] == "A" else astar_factor(double, name)
    else:
        if m.pi is None or double is not m.double:
            raise ModelError("null candidates need the model's poisson block", block)
        fields = [MultiVector.vector(chart, vector(v, chart, chart.dim, block)) for v in spec["null"]]
        try:
            L, _ = null_dirac(fields, m.pi, m.degree_cap, name)
        except ValueError as exc:
            raise ModelError(str(exc), block) from None
    pt = spec.get("point")
    if pt is not None:
        L.point = [scalar(x, block) for x in pt]
    elif m.point is not None and double is m.double:
        L.point = list(m.point)
    if L.point is not None and len(L.point) != chart.dim:
        raise ModelError(f"point needs {chart.dim} coordinates", block)
    return L


def _load_candidates(m: Model, data: dict):
    for name, spec in data.get("dirac", {}).items():
        m.candidates[name] = _candidate(m, spec, m.double, name, f"dirac/{name}")
    for name, spec in data.get("hamiltonian", {}).items():
        basis = None if m.pi is not None else m.bialgebroid.Astar.names
        m.hamiltonians[name] = exterior(spec, m.chart, "form", 2, f"hamiltonian/{name}", basis)


def _submersion(m: Model, spec: dict, block: str) -> Submersion:
    target = spec["target"]
    if len(set(target)) != len(target):
        raise ModelError("repeated target coordinate", block)
    tchart = Chart(tuple(target))
    comps = vector(spec["map"], m.chart, tchart.dim, block)
    try:
        return Submersion(m.chart, tchart, comps)
    except ValueError as exc:
        raise ModelError(str(exc), block) from None


def _load_quotient(m: Model, spec: dict):
    if m.pi is None:
        raise ModelError("quotient data needs a poisson block", "quotient")
    J = _submersion(m, spec, "quotient")
    rows = [vector(row, J.target, J.target.dim, "quotient") for row in spec["table"]]
    if len(rows) != J.target.dim:
        raise ModelError(f"table needs {J.target.dim} rows", "quotient")
    try:
        m.quotient = QuotientPoisson(J, rows)
    except NotPoissonError as exc:
        raise ModelError(f"quotient bracket fails Jacobi, residual {exc.residual}", "quotient") from None
    except ValueError as exc:
        raise ModelError(str(exc), "quotient") from None


def _load_surjection(m: Model, spec: dict):
    block = "surjection"
    J = _submersion(m, spec, block)
    src_pi = exterior(spec["source_poisson"], m.chart, "vector", 2, block) if "source_poisson" in spec else m.pi
    if src_pi is None:
        raise ModelError("surjections need a poisson source", block)
    tgt_pi = exterior(spec.get("target_poisson", []), J.target, "vector", 2, block)
    try:
        if "phi" in spec:
            src = _poisson_double(m, src_pi, block)
            tgt = _poisson_double(m, tgt_pi, block)
            phi = [vector(row, m.chart, J.target.dim, block) for row in spec["phi"]]
            m.surjection = BundleSurjection(src, tgt, J, phi)
        else:
            _poisson_double(m, src_pi, block)
            _poisson_double(m, tgt_pi, block)
            m.surjection = tangent_surjection(J, src_pi, tgt_pi)
    except ModelError:
        raise
    except ValueError as exc:
        raise ModelError(str(exc), block) from None
    tmodel = Model({}, chart=J.target, pi=tgt_pi, bialgebroid=m.surjection.target,
                   double=m.surjection.tdouble, degree_cap=m.degree_cap)
    for name, cspec in spec.get("dirac", {}).items():
        m.target_candidates[name] = _candidate(tmodel, cspec, m.surjection.tdouble, name, f"surjection/dirac/{name}")


def _load_bialgebra(m: Model, spec: dict):
    block = "bialgebra"
    n = spec["dim"]
    names = tuple(spec.get("names", ()))
    if names and len(names) != n:
        raise ModelError("names do not match dim", block)
    c = [(i, j, k, scalar(v, block)) for i, j, k, v in spec.get("c", [])]
    f = [(i, j, k, scalar(v, block)) for i, j, k, v in spec.get("f", [])]
    try:
        m.bialgebra = LieBialgebra.from_triples(n, c, f, names)
    except ValueError as exc:
        raise ModelError(str(exc), block) from None
    for name, rows in spec.get("candidates", {}).items():
        vecs = [[scalar(x, f"{block}/candidates/{name}") for x in row] for row in rows]
        if any(len(v) != 2 * n for v in vecs):
            raise ModelError(f"candidate rows need {2 * n} entries", f"{block}/candidates/{name}")
        m.bialgebra_candidates[name] = SubalgebraCandidate(Subspace.span(vecs, 2 * n), name)


def double_of(m: Model):
    return build_double(m.require("bialgebra", "bialgebra"))
