"""The double E = A + A* of a Lie bialgebroid and its Courant-algebroid axioms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebroid import BialgebroidSpec
from .poly import Exterior, MultiVector, Poly, monomials_upto, pair, schouten
from .report import Report

HALF = Fraction(1, 2)


@dataclass(frozen=True, eq=False)
class DoubleSection:
    double: "Double"
    a: Exterior
    astar: Exterior

    def _check(self, other):
        if not isinstance(other, DoubleSection) or other.double is not self.double:
            raise ValueError("sections of different doubles")

    def __add__(self, other):
        self._check(other)
        return DoubleSection(self.double, self.a + other.a, self.astar + other.astar)

    def __sub__(self, other):
        self._check(other)
        return DoubleSection(self.double, self.a - other.a, self.astar - other.astar)

    def __neg__(self):
        return DoubleSection(self.double, -self.a, -self.astar)

    def __mul__(self, f):
        return DoubleSection(self.double, self.a * f, self.astar * f)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, DoubleSection):
            return NotImplemented
        return self.double is other.double and self.a == other.a and self.astar == other.astar

    __hash__ = object.__hash__

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.astar.is_zero()

    def coefficients(self) -> list[Poly]:
        return self.a.as_list() + self.astar.as_list()

    def evaluate(self, point) -> list[Fraction]:
        return [c.evaluate(point) for c in self.coefficients()]

    def max_degree(self) -> int:
        return max(self.a.max_coeff_degree(), self.astar.max_coeff_degree())

    def __str__(self):
        A, As = self.double.b.A, self.double.b.Astar
        parts = []
        for sec, names in ((self.a, A.names), (self.astar, As.names)):
            for (i,), c in sorted(sec.comps.items()):
                parts.append((c, names[i]))
        if not parts:
            return "0"
        out = []
        for c, name in parts:
            s = str(c)
            if s == "1":
                out.append(name)
            elif s == "-1":
                out.append(f"-{name}")
            elif len(c.terms) > 1:
                out.append(f"({s})*{name}")
            else:
                out.append(f"{s}*{name}")
        return " + ".join(out).replace("+ -", "- ")

    __repr__ = __str__


class Double:
    """E = A + A* with pairings, anchor rho, the operator D = d_* + d and the bracket."""

    # sign in front of the d(e1,e2)_- term of the A* part; tests flip it to mutate the bracket
    _dminus_sign = 1

    def __init__(self, b: BialgebroidSpec):
        self.b = b
        self.chart = b.chart
        self.rank = b.rank
        self._cache: dict = {}

    # construction

    def section(self, a: Sequence = None, astar: Sequence = None) -> DoubleSection:
        r = self.rank
        zero = [0] * r
        return DoubleSection(self, self.b.A.section(list(a) if a is not None else zero),
                             self.b.Astar.section(list(astar) if astar is not None else zero))

    def from_parts(self, a: Exterior | None = None, astar: Exterior | None = None) -> DoubleSection:
        return DoubleSection(self, a if a is not None else self.b.A.zero_section(),
                             astar if astar is not None else self.b.Astar.zero_section())

    def from_vector(self, coeffs: Sequence) -> DoubleSection:
        r = self.rank
        return self.section(coeffs[:r], coeffs[r:])

    def a_frame(self, i: int) -> DoubleSection:
        return self.from_parts(a=self.b.A.frame(i))

    def astar_frame(self, i: int) -> DoubleSection:
        return self.from_parts(astar=self.b.Astar.frame(i))

    def zero(self) -> DoubleSection:
        return self.from_parts()

    def frame(self) -> list[DoubleSection]:
        return [self.a_frame(i) for i in range(self.rank)] + [self.astar_frame(i) for i in range(self.rank)]

    def frame_names(self) -> list[str]:
        return list(self.b.A.names) + list(self.b.Astar.names)

    # structure

    def pairing(self, e1: DoubleSection, e2: DoubleSection, sign: int = 1) -> Poly:
        """(e1, e2)_+ for sign=+1, (e1, e2)_- for sign=-1."""
        t = pair(e1.astar, e2.a)
        s = pair(e2.astar, e1.a)
        return (t + s) * HALF if sign > 0 else (t - s) * HALF

    def rho(self, e: DoubleSection) -> MultiVector:
        return self.b.A.anchor_of(e.a) + self.b.Astar.anchor_of(e.astar)

    def d_script(self, f: Poly) -> DoubleSection:
        return DoubleSection(self, self.b.d_star(f), self.b.d(f))

    def _lie_a_on_astar(self, x: Exterior, eta: Exterior) -> Exterior:
        """L_X eta = i_X d eta + d <X, eta> for X in Gamma(A), eta in Gamma(A*)."""
        out = self.b.d(pair(x, eta))
        if not x.is_zero() and not eta.is_zero():
            out = out + self.b.d_multi(eta).contract(x)
        return out

    def _lie_astar_on_a(self, xi: Exterior, y: Exterior) -> Exterior:
        """L_xi Y = i_xi d_* Y + d_* <Y, xi>."""
        out = self.b.d_star(pair(y, xi))
        if not xi.is_zero() and not y.is_zero():
            out = out + self.b.d_star_multi(y).contract(xi)
        return out

    def bracket(self, e1: DoubleSection, e2: DoubleSection) -> DoubleSection:
        x1, xi1, x2, xi2 = e1.a, e1.astar, e2.a, e2.astar
        m = self.pairing(e1, e2, -1)
        a_part = (self.b.A.bracket(x1, x2) + self._lie_astar_on_a(xi1, x2)
                  - self._lie_astar_on_a(xi2, x1) - self.b.d_star(m))
        dm = self.b.d(m)
        astar_part = (self.b.Astar.bracket(xi1, xi2) + self._lie_a_on_astar(x1, xi2)
                      - self._lie_a_on_astar(x2, xi1))
        astar_part = astar_part + dm if self._dminus_sign > 0 else astar_part - dm
        return DoubleSection(self, a_part, astar_part)

    def anomaly(self, e1: DoubleSection, e2: DoubleSection, e3: DoubleSection) -> Poly:
        br = self.bracket
        t = (self.pairing(br(e1, e2), e3) + self.pairing(br(e2, e3), e1)
             + self.pairing(br(e3, e1), e2))
        return t * Fraction(1, 3)

    def base_poisson(self, f: Poly, g: Poly) -> Poly:
        return pair(self.b.d(f), self.b.d_star(g))


# module-level spellings of the double's operations


def pairing(e1: DoubleSection, e2: DoubleSection, sign: int = 1) -> Poly:
    e1._check(e2)
    return e1.double.pairing(e1, e2, sign)


def rho(e: DoubleSection) -> MultiVector:
    return e.double.rho(e)


def d_script(double: Double, f: Poly) -> DoubleSection:
    return double.d_script(f)


def courant_bracket(e1: DoubleSection, e2: DoubleSection) -> DoubleSection:
    e1._check(e2)
    return e1.double.bracket(e1, e2)


def anomaly_T(e1: DoubleSection, e2: DoubleSection, e3: DoubleSection) -> Poly:
    e1._check(e2)
    e1._check(e3)
    return e1.double.anomaly(e1, e2, e3)


def base_poisson(b: BialgebroidSpec, f: Poly, g: Poly) -> Poly:
    return Double(b).base_poisson(f, g)


# axiom verification


@dataclass
class Sample:
    name: str
    section: DoubleSection
    is_multiple: bool = False


def default_samples(double: Double, multiples: bool = True) -> list[Sample]:
    """Frame sections of A and A*, followed by their coordinate multiples."""
    frame = [Sample(n, s) for n, s in zip(double.frame_names(), double.frame())]
    out = list(frame)
    if multiples:
        for k, xk in enumerate(double.chart.coords()):
            for s in frame:
                out.append(Sample(f"{double.chart.names[k]}*{s.name}", s.section * xk, True))
    return out


def _as_samples(double, samples) -> list[Sample]:
    out = []
    for i, s in enumerate(samples):
        if isinstance(s, Sample):
            out.append(s)
        else:
            out.append(Sample(f"s{i}", s))
    return out


def _vf_bracket(x: MultiVector, y: MultiVector) -> MultiVector:
    return schouten(x, y)


def verify_courant_axioms(b, samples=None, functions=None, max_multiples: int = 1) -> Report:
    """Check properties (i)-(v) of the double exactly on a family of sections.

    ``b`` is a bialgebroid or a :class:`Double`.  Triples for (i) and (v) use at
    most ``max_multiples`` non-frame members; pairs for (ii) range over the
    whole family; (iii) and (iv) use ``functions`` (default: coordinates and
    their pairwise products).
    """
    double = b if isinstance(b, Double) else Double(b)
    if samples is None:
        samples = default_samples(double)
    samples = _as_samples(double, samples)
    if not samples:
        raise ValueError("sample family must be non-empty")
    chart = double.chart
    if functions is None:
        functions = [Poly.monomial(chart, e) for e in monomials_upto(chart.dim, 2) if sum(e)]
    rep = Report("courant axioms")
    rep.notes.append("family: " + ", ".join(s.name for s in samples))
    rep.notes.append("functions: " + (", ".join(str(f) for f in functions) or "none"))

    cache: dict = {}

    def br(i, j):
        key = (i, j)
        if key not in cache:
            if (j, i) in cache:
                cache[key] = -cache[(j, i)]
            else:
                cache[key] = double.bracket(samples[i].section, samples[j].section)
        return cache[key]

    idx = range(len(samples))
    mult = [s.is_multiple for s in samples]

    # (i) Jacobi up to the anomaly
    for i, j, k in itertools.combinations(idx, 3):
        if mult[i] + mult[j] + mult[k] > max_multiples:
            continue
        e1, e2, e3 = samples[i].section, samples[j].section, samples[k].section
        jac = (double.bracket(br(i, j), e3) + double.bracket(br(j, k), e1)
               + double.bracket(br(k, i), e2))
        t = (double.pairing(br(i, j), e3) + double.pairing(br(j, k), e1)
             + double.pairing(br(k, i), e2)) * Fraction(1, 3)
        res = jac - double.d_script(t)
        rep.record("AXIOM(i)", f"{samples[i].name},{samples[j].name},{samples[k].name}", res)

    # (ii) anchor is a morphism of brackets
    for i, j in itertools.combinations(idx, 2):
        e1, e2 = samples[i].section, samples[j].section
        res = double.rho(br(i, j)) - _vf_bracket(double.rho(e1), double.rho(e2))
        rep.record("AXIOM(ii)", f"{samples[i].name},{samples[j].name}", res)

    # (iii) Leibniz with the D f correction
    for i in idx:
        for j in idx:
            if mult[i] + mult[j] > max_multiples:
                continue
            e1, e2 = samples[i].section, samples[j].section
            for f in functions:
                res = (double.bracket(e1, e2 * f) - br(i, j) * f - e2 * double.rho(e1).apply(f)
                       + double.d_script(f) * double.pairing(e1, e2))
                rep.record("AXIOM(iii)", f"{samples[i].name},{samples[j].name},{f}", res)

    # (iv) rho o D = 0
    fs = functions
    for p, q in itertools.combinations_with_replacement(range(len(fs)), 2):
        res = double.pairing(double.d_script(fs[p]), double.d_script(fs[q]))
        rep.record("AXIOM(iv)", f"{fs[p]},{fs[q]}", res)

    # (v) invariance of the pairing
    for i in idx:
        for j, k in itertools.combinations_with_replacement(idx, 2):
            if mult[i] + mult[j] + mult[k] > max_multiples:
                continue
            e, h1, h2 = samples[i].section, samples[j].section, samples[k].section
            lhs = double.rho(e).apply(double.pairing(h1, h2))
            u1 = br(i, j) + double.d_script(double.pairing(e, h1))
            u2 = br(i, k) + double.d_script(double.pairing(e, h2))
            res = lhs - double.pairing(u1, h2) - double.pairing(h1, u2)
            rep.record("AXIOM(v)", f"{samples[i].name},{samples[j].name},{samples[k].name}", res)
    return rep
