"""Polynomial coefficient ring and graded exterior calculus on a coordinate chart.

A :class:`Poly` is a sparse map from exponent tuples to ``Fraction``.  An
:class:`Exterior` element is a homogeneous element of the exterior algebra of a
free module of some rank over the polynomial ring, stored as a map from
strictly increasing index tuples to polynomials.  :class:`MultiVector` uses the
coordinate frame ``d/dx_i`` and :class:`DiffForm` the coframe ``dx_i``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact import as_fraction


class ChartMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    names: tuple

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"coordinate names must be distinct: {self.names}")
        for n in self.names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", n):
                raise ValueError(f"bad coordinate name {n!r}")

    @classmethod
    def standard(cls, n: int, prefix: str = "x") -> "Chart":
        return cls(tuple(f"{prefix}{i + 1}" for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.names)

    def coord(self, i: int) -> "Poly":
        e = [0] * self.dim
        e[i] = 1
        return Poly(self, {tuple(e): Fraction(1)})

    def coords(self) -> list["Poly"]:
        return [self.coord(i) for i in range(self.dim)]

    def const(self, c) -> "Poly":
        return Poly.const(self, c)

    def zero(self) -> "Poly":
        return Poly(self, {})

    def poly(self, text: str) -> "Poly":
        return parse_poly(text, self)


POINT = Chart(())


def _grlex_key(e):
    return (sum(e), e)


class Poly:
    """Multivariate polynomial with rational coefficients on a chart."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Mapping | None = None):
        self.chart = chart
        if terms:
            self.terms = {tuple(e): as_fraction(c) for e, c in terms.items() if c}
        else:
            self.terms = {}

    @classmethod
    def _raw(cls, chart, terms):
        p = cls.__new__(cls)
        p.chart = chart
        p.terms = terms
        return p

    @classmethod
    def const(cls, chart: Chart, c) -> "Poly":
        c = as_fraction(c)
        return cls._raw(chart, {(0,) * chart.dim: c} if c else {})

    @classmethod
    def monomial(cls, chart: Chart, exps: Sequence[int], c=1) -> "Poly":
        return cls(chart, {tuple(exps): c})

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.chart != self.chart:
                raise ChartMismatch(f"{self.chart.names} vs {other.chart.names}")
            return other
        return Poly.const(self.chart, other)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.chart.dim, Fraction(0))

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def __add__(self, other):
        other = self._coerce(other)
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v += c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly._raw(self.chart, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.chart, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = as_fraction(other)
            if not c:
                return Poly._raw(self.chart, {})
            return Poly._raw(self.chart, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly._raw(self.chart, out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / as_fraction(c))

    def __pow__(self, k: int):
        out = Poly.const(self.chart, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.chart == other.chart and self.terms == other.terms
        try:
            return self == Poly.const(self.chart, other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.chart, frozenset(self.terms.items())))

    def diff(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Poly._raw(self.chart, out)

    def evaluate(self, point: Sequence) -> Fraction:
        point = [as_fraction(p) for p in point]
        if len(point) != self.chart.dim:
            raise ValueError("point has wrong dimension")
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t *= x ** k
            total += t
        return total

    def compose(self, images: Sequence["Poly"], target: Chart | None = None) -> "Poly":
        """Substitute ``images[i]`` (polys on ``target``) for coordinate i."""
        if len(images) != self.chart.dim:
            raise ValueError("need one image per coordinate")
        if target is None:
            if not images:
                raise ValueError("target chart needed when composing a constant")
            target = images[0].chart
        out = Poly(target)
        powers: dict = {}
        for e, c in self.terms.items():
            t = Poly.const(target, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = images[i] ** k
                    t = t * powers[key]
            out = out + t
        return out

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def monomials_upto(n: int, deg: int) -> list[tuple]:
    """Exponent vectors of total degree <= deg in n variables, graded lex ascending."""
    out = []
    for d in range(deg + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return sorted(set(out), key=_grlex_key)


# ---------------------------------------------------------------------------
# exterior algebra


def _merge_sign(a: tuple, b: tuple):
    """Sign and sorted union for e_a ^ e_b (a, b strictly increasing); None if they overlap."""
    if set(a) & set(b):
        return None, None
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(a + b))


def normalize_index(idx: Sequence[int]):
    """Sort an index tuple; return (sign, sorted) or (0, None) on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class Exterior:
    """Homogeneous element of degree ``degree`` in the exterior algebra of Q[chart]^rank."""

    __slots__ = ("chart", "rank", "degree", "comps")

    def __init__(self, chart: Chart, rank: int, degree: int, comps: Mapping | None = None):
        self.chart = chart
        self.rank = rank
        self.degree = degree
        out = {}
        for idx, p in (comps or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} does not have degree {degree}")
            if any(not 0 <= i < rank for i in idx):
                raise ValueError(f"index {idx} out of range for rank {rank}")
            if not isinstance(p, Poly):
                p = Poly.const(chart, p)
            elif p.chart != chart:
                raise ChartMismatch("component on a different chart")
            sign, key = normalize_index(idx)
            if not sign:
                continue
            v = out.get(key, Poly(chart)) + (p if sign > 0 else -p)
            if v.is_zero():
                out.pop(key, None)
            else:
                out[key] = v
        self.comps = out

    @classmethod
    def _make(cls, chart, rank, degree, comps):
        """Trusted constructor: keys already sorted and in range, values Polys on ``chart``."""
        obj = object.__new__(cls)
        obj.chart = chart
        obj.rank = rank
        obj.degree = degree
        obj.comps = {k: v for k, v in comps.items() if v.terms}
        return obj

    def _new(self, degree, comps):
        obj = object.__new__(type(self))
        obj.chart = self.chart
        obj.rank = self.rank
        obj.degree = degree
        obj.comps = {k: v for k, v in comps.items() if not v.is_zero()}
        return obj

    @classmethod
    def zero(cls, chart, rank, degree):
        return cls(chart, rank, degree)

    @classmethod
    def scalar(cls, p: Poly, rank: int):
        return cls(p.chart, rank, 0, {(): p})

    @classmethod
    def from_list(cls, chart, coeffs: Sequence):
        """Degree-1 element from a coefficient list."""
        return cls(chart, len(coeffs), 1, {(i,): c for i, c in enumerate(coeffs)})

    def coeff(self, idx) -> Poly:
        sign, key = normalize_index(idx)
        if not sign:
            return Poly(self.chart)
        p = self.comps.get(key)
        if p is None:
            return Poly(self.chart)
        return p if sign > 0 else -p

    def as_list(self) -> list[Poly]:
        if self.degree != 1:
            raise ValueError("as_list needs a degree-1 element")
        return [self.comps.get((i,), Poly(self.chart)) for i in range(self.rank)]

    def is_zero(self) -> bool:
        return not self.comps

    def _check(self, other):
        if not isinstance(other, Exterior):
            raise TypeError("expected an exterior element")
        if other.chart != self.chart or other.rank != self.rank:
            raise ChartMismatch("exterior elements live on different modules")

    def __add__(self, other):
        self._check(other)
        if other.degree != self.degree:
            if other.is_zero():
                return self
            if self.is_zero():
                return other
            raise ValueError(f"cannot add degrees {self.degree} and {other.degree}")
        out = dict(self.comps)
        for k, v in other.comps.items():
            out[k] = out[k] + v if k in out else v
        return self._new(self.degree, out)

    def __neg__(self):
        return self._new(self.degree, {k: -v for k, v in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        if isinstance(f, Exterior):
            return self.wedge(f)
        return self._new(self.degree, {k: v * f for k, v in self.comps.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Exterior):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.chart == other.chart and self.rank == other.rank
        return (self.chart == other.chart and self.rank == other.rank and self.degree == other.degree
                and self.comps == other.comps)

    def __hash__(self):
        return hash((self.rank, self.degree, frozenset(self.comps)))

    def wedge(self, other: "Exterior") -> "Exterior":
        self._check(other)
        out: dict = {}
        for a, p in self.comps.items():
            for b, q in other.comps.items():
                sign, key = _merge_sign(a, b)
                if sign is None:
                    continue
                t = p * q
                if sign < 0:
                    t = -t
                out[key] = out[key] + t if key in out else t
        return self._new(self.degree + other.degree, out)

    def contract(self, v: "Exterior") -> "Exterior":
        """Contract a degree-1 element of the dual module into the first slot."""
        if v.degree != 1:
            raise ValueError("contraction needs a degree-1 argument")
        if self.degree < 1:
            raise ValueError("cannot contract into a degree-0 element")
        if v.rank != self.rank or v.chart != self.chart:
            raise ChartMismatch("contraction between mismatched modules")
        out: dict = {}
        for idx, p in self.comps.items():
            for pos, i in enumerate(idx):
                c = v.comps.get((i,))
                if c is None:
                    continue
                rest = idx[:pos] + idx[pos + 1:]
                t = c * p
                if pos % 2:
                    t = -t
                out[rest] = out[rest] + t if rest in out else t
        return self._new(self.degree - 1, out)

    def map_coeffs(self, fn) -> "Exterior":
        return self._new(self.degree, {k: fn(v) for k, v in self.comps.items()})

    def evaluate(self, point) -> dict:
        return {k: v.evaluate(point) for k, v in self.comps.items()}

    def max_coeff_degree(self) -> int:
        return max((p.degree for p in self.comps.values()), default=-1)

    def __repr__(self):
        return f"{type(self).__name__}({format_exterior(self)!r})"

    def __str__(self):
        return format_exterior(self)


class MultiVector(Exterior):
    __slots__ = ()

    def __init__(self, chart: Chart, degree: int, comps: Mapping | None = None):
        super().__init__(chart, chart.dim, degree, comps)

    @classmethod
    def zero(cls, chart, degree):
        return cls(chart, degree)

    @classmethod
    def vector(cls, chart, coeffs: Sequence):
        return cls(chart, 1, {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def function(cls, p: Poly):
        return cls(p.chart, 0, {(): p})

    def apply(self, f: Poly) -> Poly:
        """Directional derivative of ``f`` along a vector field."""
        if self.degree != 1:
            raise ValueError("only vector fields act on functions")
        out = Poly(self.chart)
        for (i,), c in self.comps.items():
            out = out + c * f.diff(i)
        return out


class DiffForm(Exterior):
    __slots__ = ()

    def __init__(self, chart: Chart, degree: int, comps: Mapping | None = None):
        super().__init__(chart, chart.dim, degree, comps)

    @classmethod
    def zero(cls, chart, degree):
        return cls(chart, degree)

    @classmethod
    def function(cls, p: Poly):
        return cls(p.chart, 0, {(): p})

    @classmethod
    def covector(cls, chart, coeffs: Sequence):
        return cls(chart, 1, {(i,): c for i, c in enumerate(coeffs)})


def as_vector_field(x: Exterior) -> MultiVector:
    return MultiVector(x.chart, x.degree, x.comps)


def as_form(x: Exterior) -> DiffForm:
    return DiffForm(x.chart, x.degree, x.comps)


def _same_chart(*items):
    charts = {it.chart for it in items}
    if len(charts) > 1:
        raise ChartMismatch("operands live on different charts")


# ---------------------------------------------------------------------------
# calculus


def de_rham(w: DiffForm) -> DiffForm:
    """Exterior derivative of a polynomial differential form."""
    out: dict = {}
    n = w.chart.dim
    for idx, p in w.comps.items():
        for i in range(n):
            if i in idx:
                continue
            dp = p.diff(i)
            if dp.is_zero():
                continue
            sign, key = _merge_sign((i,), idx)
            t = dp if sign > 0 else -dp
            out[key] = out[key] + t if key in out else t
    return DiffForm(w.chart, w.degree + 1, out)


def d(f: Poly) -> DiffForm:
    return de_rham(DiffForm.function(f))


def interior(a: Exterior, b: Exterior) -> Exterior:
    """Contract the degree-1 argument ``a`` into the first slot of ``b``.

    ``interior(xi, P)`` for a 1-form and a multivector, or ``interior(X, w)``
    for a vector field and a form.  The result keeps the type of ``b``.
    """
    _same_chart(a, b)
    if b.degree < 1:
        raise ValueError("interior product into a degree-0 element")
    if isinstance(b, MultiVector) and not isinstance(a, DiffForm):
        raise TypeError("contract multivectors with 1-forms")
    if isinstance(b, DiffForm) and not isinstance(a, MultiVector):
        raise TypeError("contract forms with vector fields")
    return b.contract(a)


def lie_derivative(x: MultiVector, w: DiffForm) -> DiffForm:
    """Cartan formula L_X = i_X d + d i_X."""
    _same_chart(x, w)
    if x.degree != 1:
        raise ValueError("Lie derivative along a vector field only")
    first = as_form(interior(x, de_rham(w)))
    if w.degree == 0:
        return first
    return first + de_rham(as_form(interior(x, w)))


def _right_theta_derivative(p: Exterior, i: int) -> Exterior:
    """Right derivative with respect to the odd generator theta_i."""
    out = {}
    k = p.degree
    for idx, c in p.comps.items():
        if i in idx:
            pos = idx.index(i)
            rest = idx[:pos] + idx[pos + 1:]
            out[rest] = -c if (k - 1 - pos) % 2 else c
    return p._new(k - 1, out)


def schouten(p: MultiVector, q: MultiVector) -> MultiVector:
    """Schouten-Nijenhuis bracket of polynomial multivector fields.

    Uses the odd-coordinate formula
    ``[P,Q] = sum_i (P d/dtheta_i)(d_i Q) - (-1)^{(a-1)(b-1)} (Q d/dtheta_i)(d_i P)``
    with right derivatives, so that vector fields get the Lie bracket and
    ``[X, f] = X(f)``.
    """
    _same_chart(p, q)
    a, b = p.degree, q.degree
    chart = p.chart
    result = MultiVector.zero(chart, max(a + b - 1, 0))
    sign = -1 if ((a - 1) * (b - 1)) % 2 else 1
    for i in range(chart.dim):
        if a >= 1:
            rp = _right_theta_derivative(p, i)
            dq = q.map_coeffs(lambda c: c.diff(i))
            if not rp.is_zero() and not dq.is_zero():
                result = result + as_vector_field(rp.wedge(dq))
        if b >= 1:
            rq = _right_theta_derivative(q, i)
            dp = p.map_coeffs(lambda c: c.diff(i))
            if not rq.is_zero() and not dp.is_zero():
                t = as_vector_field(rq.wedge(dp))
                result = result - t if sign > 0 else result + t
    if a + b == 0:
        return MultiVector.zero(chart, 0)
    return as_vector_field(result) if not result.is_zero() else MultiVector.zero(chart, a + b - 1)


def sharp(pi: MultiVector, xi: DiffForm) -> MultiVector:
    """Bundle map of a bivector, pinned by <eta, pi#(xi)> = pi(xi, eta)."""
    if pi.degree != 2 or xi.degree != 1:
        raise ValueError("sharp needs a bivector and a 1-form")
    return as_vector_field(interior(xi, pi))


def pair(xi: Exterior, x: Exterior) -> Poly:
    """Duality pairing of two degree-1 elements."""
    if xi.degree != 1 or x.degree != 1:
        raise ValueError("pairing needs degree-1 elements")
    out = Poly(xi.chart)
    for k, v in xi.comps.items():
        w = x.comps.get(k)
        if w is not None:
            out = out + v * w
    return out


def bivector_eval(pi: Exterior, xi: Exterior, eta: Exterior) -> Poly:
    """pi(xi, eta) for a degree-2 element and two dual degree-1 elements."""
    return pair(eta, pi.contract(xi))


def jacobi_components(pi: MultiVector) -> dict:
    """J^{ijk} = sum_l pi^{il} d_l pi^{jk} + cyclic, for i<j<k; nonzero entries only."""
    n = pi.chart.dim
    out = {}
    for i, j, k in itertools.combinations(range(n), 3):
        total = Poly(pi.chart)
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for l in range(n):
                total = total + pi.coeff((a, l)) * pi.coeff((b, c)).diff(l)
        if not total.is_zero():
            out[(i, j, k)] = total
    return out


def is_poisson(pi: MultiVector) -> bool:
    return schouten(pi, pi).is_zero()


# ---------------------------------------------------------------------------
# text grammar


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_monomial(chart: Chart, e) -> str:
    parts = []
    for name, k in zip(chart.names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return " ".join(parts)


def _poly_pieces(p: Poly):
    """Yield (sign, magnitude-text) pairs for the terms of p, graded lex descending."""
    for e, c in p.sorted_terms():
        mono = _fmt_monomial(p.chart, e)
        mag = abs(c)
        if mono:
            text = mono if mag == 1 else f"{_fmt_coeff(mag)} {mono}"
        else:
            text = _fmt_coeff(mag)
        yield ("-" if c < 0 else "+"), text


def _join(pieces) -> str:
    out = ""
    for i, (sign, text) in enumerate(pieces):
        if i == 0:
            out = ("-" if sign == "-" else "") + text
        else:
            out += f" {sign} {text}"
    return out or "0"


def format_poly(p: Poly) -> str:
    return _join(list(_poly_pieces(p)))


def _basis_text(x: Exterior, idx) -> str:
    names = x.chart.names if x.rank == x.chart.dim else [str(i + 1) for i in range(x.rank)]
    if isinstance(x, DiffForm):
        return "^".join(f"d{names[i]}" for i in idx)
    if isinstance(x, MultiVector):
        return "^".join(f"d/d{names[i]}" for i in idx)
    return "^".join(f"e{i + 1}" for i in idx)


def format_exterior(x: Exterior) -> str:
    if x.is_zero():
        return "0"
    if x.degree == 0:
        return format_poly(x.comps[()])
    pieces = []
    for idx in sorted(x.comps):
        p = x.comps[idx]
        basis = _basis_text(x, idx)
        terms = list(_poly_pieces(p))
        if len(terms) == 1:
            sign, text = terms[0]
            pieces.append((sign, basis if text == "1" else f"{text} {basis}"))
        else:
            pieces.append(("+", f"({_join(terms)}) {basis}"))
    return _join(pieces)


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(d/d[A-Za-z_][A-Za-z_0-9]*)|([A-Za-z_][A-Za-z_0-9]*)|(\^|\+|-|\*|\(|\)))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at column {pos + 1}: {text[pos:pos + 10]!r}")
        num, vec, name, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif vec is not None:
            out.append(("vec", vec[3:]))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, chart: Chart):
        self.toks = _tokenize(text)
        self.i = 0
        self.chart = chart

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, kind, val=None):
        t = self.take()
        if t[0] != kind or (val is not None and t[1] != val):
            raise ParseError(f"expected {val or kind}, got {t[1]!r}")
        return t

    def coord_index(self, name):
        try:
            return self.chart.names.index(name)
        except ValueError:
            raise ParseError(f"unknown coordinate {name!r}") from None

    def is_form_basis(self, tok):
        kind, val = tok
        return (kind == "name" and val.startswith("d") and val[1:] in self.chart.names
                and val not in self.chart.names)

    def parse_sum(self):
        terms = []
        sign = 1
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        coeff, basis = self.parse_term()
        terms.append((coeff * sign, basis))
        while self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
            coeff, basis = self.parse_term()
            terms.append((coeff * sign, basis))
        return terms

    def parse_term(self):
        coeff = Poly.const(self.chart, 1)
        basis = None
        seen = False
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                continue
            if kind == "num":
                self.take()
                coeff = coeff * Fraction(val)
                seen = True
            elif kind == "op" and val == "(":
                self.take()
                inner = self.parse_sum()
                self.expect("op", ")")
                if any(b is not None for _, b in inner):
                    raise ParseError("basis elements are not allowed inside parentheses")
                s = Poly(self.chart)
                for c, _ in inner:
                    s = s + c
                coeff = coeff * s
                seen = True
            elif kind == "vec" or self.is_form_basis((kind, val)):
                if basis is not None:
                    raise ParseError("more than one basis block in a term")
                basis = self.parse_basis()
                seen = True
            elif kind == "name":
                self.take()
                p = self.chart.coord(self.coord_index(val))
                if self.peek() == ("op", "^") and self.peek(1)[0] == "num":
                    self.take()
                    p = p ** int(self.take()[1])
                coeff = coeff * p
                seen = True
            else:
                break
        if not seen:
            raise ParseError(f"expected a term, got {self.peek()[1]!r}")
        return coeff, basis

    def parse_basis(self):
        kind0 = None
        idx = []
        while True:
            kind, val = self.peek()
            if kind == "vec":
                k = "vec"
                name = val
            elif self.is_form_basis((kind, val)):
                k = "form"
                name = val[1:]
            else:
                break
            if kind0 is not None and k != kind0:
                raise ParseError("mixed vector and form basis in one term")
            kind0 = k
            self.take()
            idx.append(self.coord_index(name))
            if self.peek() == ("op", "^") and self.peek(1)[0] in ("vec", "name") and (
                    self.peek(1)[0] == "vec" or self.is_form_basis(self.peek(1))):
                self.take()
                continue
            break
        return kind0, tuple(idx)


def parse_poly(text: str, chart: Chart) -> Poly:
    p = _Parser(text, chart)
    terms = p.parse_sum()
    if p.peek()[0] is not None:
        raise ParseError(f"trailing input at token {p.peek()[1]!r}")
    out = Poly(chart)
    for c, b in terms:
        if b is not None:
            raise ParseError("basis element in a scalar expression")
        out = out + c
    return out


def parse_exterior(text: str, chart: Chart) -> Exterior:
    """Parse a multivector (``d/dx`` basis) or a differential form (``dx`` basis)."""
    p = _Parser(text, chart)
    terms = p.parse_sum()
    if p.peek()[0] is not None:
        raise ParseError(f"trailing input at token {p.peek()[1]!r}")
    kinds = {b[0] for _, b in terms if b is not None}
    degrees = {len(b[1]) for _, b in terms if b is not None}
    if any(b is None for _, b in terms):
        if kinds:
            raise ParseError("mixed degrees")
        return DiffForm.function(parse_poly(text, chart))
    if len(kinds) > 1 or len(degrees) > 1:
        raise ParseError("an element must be homogeneous and of one kind")
    cls = MultiVector if kinds == {"vec"} else DiffForm
    out = cls(chart, degrees.pop())
    for c, (_, idx) in terms:
        out = out + cls(chart, len(idx), {idx: c})
    return out
