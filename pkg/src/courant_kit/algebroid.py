"""Lie algebroids given by a global frame: anchors, brackets, differentials.

Sections of an algebroid of rank r are degree-1 :class:`Exterior` elements of
rank r; cochains and multisections are higher-degree ones.  Which one is meant
is decided by the caller: a k-cochain on ``A`` is the same data as a
k-multisection of the dual algebroid.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .poly import (
    POINT,
    Chart,
    DiffForm,
    Exterior,
    MultiVector,
    Poly,
    as_vector_field,
    bivector_eval,
    d,
    lie_derivative,
    monomials_upto,
    schouten,
    sharp,
)
from .report import Report


class NotPoissonError(ValueError):
    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"bivector is not Poisson: [pi,pi] = {residual}")


@dataclass
class AlgebroidSpec:
    """A Lie algebroid of rank ``rank`` over ``chart`` presented in a global frame.

    ``anchor[i]`` lists the components of a(e_i) along d/dx_mu and
    ``structure[(i, j)]`` (i < j) the coefficients of [e_i, e_j].
    """

    chart: Chart
    rank: int
    anchor: list
    structure: dict
    names: tuple = ()

    def __post_init__(self):
        n = self.chart.dim
        if len(self.anchor) != self.rank:
            raise ValueError("anchor needs one row per frame element")
        self.anchor = [[self._poly(c) for c in row] for row in self.anchor]
        for row in self.anchor:
            if len(row) != n:
                raise ValueError("anchor row length must equal chart dimension")
        structure = {}
        for (i, j), coeffs in self.structure.items():
            if not (0 <= i < self.rank and 0 <= j < self.rank) or i == j:
                raise ValueError(f"bad structure index {(i, j)}")
            coeffs = [self._poly(c) for c in coeffs]
            if len(coeffs) != self.rank:
                raise ValueError("structure functions need rank coefficients")
            if i > j:
                i, j = j, i
                coeffs = [-c for c in coeffs]
            if (i, j) in structure:
                raise ValueError(f"structure functions for {(i, j)} given twice")
            if any(not c.is_zero() for c in coeffs):
                structure[(i, j)] = coeffs
        self.structure = structure
        if not self.names:
            self.names = tuple(f"e{i + 1}" for i in range(self.rank))
        self._anchor_fields = [MultiVector.vector(self.chart, row) for row in self.anchor]
        one = Poly.const(self.chart, 1)
        self._frame = [Exterior._make(self.chart, self.rank, 1, {(i,): one}) for i in range(self.rank)]

    def _poly(self, c) -> Poly:
        if isinstance(c, Poly):
            if c.chart != self.chart:
                raise ValueError("coefficient on a different chart")
            return c
        return Poly.const(self.chart, c)

    # sections

    def section(self, coeffs: Sequence) -> Exterior:
        if len(coeffs) != self.rank:
            raise ValueError(f"section needs {self.rank} coefficients")
        return Exterior._make(self.chart, self.rank, 1,
                              {(i,): self._poly(c) for i, c in enumerate(coeffs)})

    def frame(self, i: int) -> Exterior:
        return self._frame[i]

    def zero_section(self) -> Exterior:
        return Exterior._make(self.chart, self.rank, 1, {})

    def frame_bracket(self, i: int, j: int) -> Exterior:
        if i == j:
            return self.zero_section()
        if i < j:
            c = self.structure.get((i, j))
            return self.section(c) if c else self.zero_section()
        c = self.structure.get((j, i))
        return -self.section(c) if c else self.zero_section()

    def anchor_of(self, x: Exterior) -> MultiVector:
        out = MultiVector.zero(self.chart, 1)
        for (i,), c in x.comps.items():
            out = out + self._anchor_fields[i] * c
        return out

    def act(self, x: Exterior, f: Poly) -> Poly:
        """a(x) f."""
        out = Poly(self.chart)
        for (i,), c in x.comps.items():
            row = self.anchor[i]
            for mu, a in enumerate(row):
                if a:
                    df = f.diff(mu)
                    if df:
                        out = out + c * a * df
        return out

    def bracket(self, x: Exterior, y: Exterior) -> Exterior:
        out = self.zero_section()
        for (i,), p in x.comps.items():
            for (j,), q in y.comps.items():
                b = self.frame_bracket(i, j)
                if not b.is_zero():
                    out = out + b * (p * q)
        for (j,), q in y.comps.items():
            t = self.act(x, q)
            if t:
                out = out + self.frame(j) * t
        for (i,), p in x.comps.items():
            t = self.act(y, p)
            if t:
                out = out - self.frame(i) * t
        return out

    # cochains

    def differential(self, w: Exterior) -> Exterior:
        return algebroid_differential(self, w)

    def d_function(self, f: Poly) -> Exterior:
        """df as a section of the dual: (df)_i = a(e_i) f."""
        return Exterior._make(self.chart, self.rank, 1,
                              {(i,): self.act(self._frame[i], f) for i in range(self.rank)})

    def schouten(self, p: Exterior, q: Exterior) -> Exterior:
        return algebroid_schouten(self, p, q)

    def check(self, max_deg: int = 1) -> "AlgebroidSpec":
        rep = verify_algebroid(self, max_deg)
        if not rep.passed:
            bad = rep.failures[0]
            raise ValueError(f"not a Lie algebroid: {bad.name} {bad.inputs} residual={bad.residual}")
        return self


def algebroid_differential(a: AlgebroidSpec, w: Exterior) -> Exterior:
    """Chevalley-Eilenberg differential of a cochain given on the frame."""
    k = w.degree
    if w.rank != a.rank or w.chart != a.chart:
        raise ValueError("cochain does not live on this algebroid")
    if k > a.rank:
        raise ValueError(f"cochain degree {k} exceeds rank {a.rank}")
    out = {}
    for idx in itertools.combinations(range(a.rank), k + 1):
        val = Poly(a.chart)
        for p in range(k + 1):
            rest = idx[:p] + idx[p + 1:]
            c = w.coeff(rest)
            if c:
                t = a.act(a.frame(idx[p]), c)
                val = val - t if p % 2 else val + t
        for p, q in itertools.combinations(range(k + 1), 2):
            br = a.frame_bracket(idx[p], idx[q])
            if br.is_zero():
                continue
            rest = idx[:p] + idx[p + 1:q] + idx[q + 1:]
            t = Poly(a.chart)
            for (m,), c in br.comps.items():
                wc = w.coeff((m,) + rest)
                if wc:
                    t = t + c * wc
            val = val - t if (p + q) % 2 else val + t
        if val:
            out[idx] = val
    return w._new(k + 1, out)


def _factors(a: AlgebroidSpec, idx, coeff: Poly):
    """Decompose coeff * e_idx as X1 ^ ... ^ Xm with the coefficient on X1."""
    fs = [a.frame(i) for i in idx]
    fs[0] = fs[0] * coeff
    return fs


def _wedge_all(a: AlgebroidSpec, items) -> Exterior:
    out = Exterior.scalar(Poly.const(a.chart, 1), a.rank)
    for it in items:
        out = out.wedge(it)
    return out


def algebroid_schouten(a: AlgebroidSpec, p: Exterior, q: Exterior) -> Exterior:
    """Schouten-type bracket on multisections extending the algebroid bracket.

    On decomposables, [X1^..^Xm, Y1^..^Yn] = sum (-1)^{i+j} [Xi,Yj] ^ (X without i) ^ (Y without j)
    and [X1^..^Xm, f] = sum (-1)^{m-i} a(Xi)(f) (X without i), 1-based i, j.
    """
    m, n = p.degree, q.degree
    deg = max(m + n - 1, 0)
    if m == 0 and n == 0:
        return Exterior(a.chart, a.rank, 0)
    if m == 0:
        r = algebroid_schouten(a, q, p)
        return r if n % 2 == 0 else -r
    out = Exterior(a.chart, a.rank, deg)
    for I, pc in p.comps.items():
        xs = _factors(a, I, pc)
        if n == 0:
            f = q.comps.get((), Poly(a.chart))
            for i in range(m):
                t = a.act(xs[i], f)
                if not t:
                    continue
                term = _wedge_all(a, xs[:i] + xs[i + 1:]) * t
                out = out - term if (m - 1 - i) % 2 else out + term
            continue
        for J, qc in q.comps.items():
            ys = _factors(a, J, qc)
            for i in range(m):
                for j in range(n):
                    br = a.bracket(xs[i], ys[j])
                    if br.is_zero():
                        continue
                    term = _wedge_all(a, [br] + xs[:i] + xs[i + 1:] + ys[:j] + ys[j + 1:])
                    out = out - term if (i + j) % 2 else out + term
    return out


def verify_algebroid(a: AlgebroidSpec, max_deg: int = 2) -> Report:
    """Check Jacobi, anchor homomorphism and Leibniz on the frame and monomial multiples."""
    rep = Report(f"algebroid rank={a.rank}")
    r = a.rank
    names = a.names
    for i, j, k in itertools.combinations(range(r), 3):
        ei, ej, ek = a.frame(i), a.frame(j), a.frame(k)
        jac = (a.bracket(a.bracket(ei, ej), ek) + a.bracket(a.bracket(ej, ek), ei)
               + a.bracket(a.bracket(ek, ei), ej))
        rep.record("JACOBI", f"{names[i]},{names[j]},{names[k]}", jac)
    for i, j in itertools.combinations(range(r), 2):
        ei, ej = a.frame(i), a.frame(j)
        res = a.anchor_of(a.bracket(ei, ej)) - schouten(a.anchor_of(ei), a.anchor_of(ej))
        rep.record("ANCHOR", f"{names[i]},{names[j]}", res)
    monos = [e for e in monomials_upto(a.chart.dim, max_deg) if sum(e)]
    for e in monos:
        m = Poly.monomial(a.chart, e)
        label = str(m)
        for i in range(r):
            for j in range(r):
                ei, ej = a.frame(i), a.frame(j)
                res = (a.bracket(ei, ej * m) - a.bracket(ei, ej) * m - ej * a.act(ei, m))
                rep.record("LEIBNIZ", f"{names[i]},{label}*{names[j]}", res)
        for i in range(r):
            for j, k in itertools.combinations(range(r), 2):
                x, y, z = a.frame(i) * m, a.frame(j), a.frame(k)
                jac = (a.bracket(a.bracket(x, y), z) + a.bracket(a.bracket(y, z), x)
                       + a.bracket(a.bracket(z, x), y))
                rep.record("JACOBI", f"{label}*{names[i]},{names[j]},{names[k]}", jac)
    return rep


def tangent_algebroid(chart: Chart) -> AlgebroidSpec:
    n = chart.dim
    anchor = [[int(i == j) for j in range(n)] for i in range(n)]
    return AlgebroidSpec(chart, n, anchor, {}, tuple(f"d/d{x}" for x in chart.names))


def lie_algebra(dim: int, brackets: dict) -> AlgebroidSpec:
    """Algebroid over a point from structure constants {(i, j): [c^0, ..., c^{n-1}]}."""
    return AlgebroidSpec(POINT, dim, [[] for _ in range(dim)], dict(brackets))


def koszul_bracket(pi: MultiVector, xi: DiffForm, eta: DiffForm) -> DiffForm:
    """[xi, eta] = L_{pi# xi} eta - L_{pi# eta} xi - d(pi(xi, eta))."""
    return (lie_derivative(sharp(pi, xi), eta) - lie_derivative(sharp(pi, eta), xi)
            - d(bivector_eval(pi, xi, eta)))


def cotangent_algebroid(pi: MultiVector, check_poisson: bool = True) -> AlgebroidSpec:
    """T*P with anchor pi# and the Koszul bracket, in the frame dx_1..dx_n."""
    if pi.degree != 2:
        raise ValueError("cotangent algebroid needs a bivector")
    if check_poisson:
        res = schouten(pi, pi)
        if not res.is_zero():
            raise NotPoissonError(res)
    chart = pi.chart
    n = chart.dim
    frame = [DiffForm.covector(chart, [int(i == j) for j in range(n)]) for i in range(n)]
    anchor = [sharp(pi, f).as_list() if n else [] for f in frame]
    structure = {}
    for i, j in itertools.combinations(range(n), 2):
        structure[(i, j)] = koszul_bracket(pi, frame[i], frame[j]).as_list()
    return AlgebroidSpec(chart, n, anchor, structure, tuple(f"d{x}" for x in chart.names))


@dataclass
class BialgebroidSpec:
    A: AlgebroidSpec
    Astar: AlgebroidSpec
    label: str = ""

    def __post_init__(self):
        if self.A.chart != self.Astar.chart or self.A.rank != self.Astar.rank:
            raise ValueError("A and A* must share chart and rank")

    @property
    def chart(self) -> Chart:
        return self.A.chart

    @property
    def rank(self) -> int:
        return self.A.rank

    def d(self, f: Poly) -> Exterior:
        """d f in Gamma(A*)."""
        return self.A.d_function(f)

    def d_star(self, f: Poly) -> Exterior:
        """d_* f in Gamma(A)."""
        return self.Astar.d_function(f)

    def d_star_multi(self, p: Exterior) -> Exterior:
        """d_* on Gamma(wedge A): the differential of the algebroid A*."""
        return algebroid_differential(self.Astar, p)

    def d_multi(self, w: Exterior) -> Exterior:
        """d on Gamma(wedge A*): the differential of the algebroid A."""
        return algebroid_differential(self.A, w)


def poisson_bialgebroid(pi: MultiVector) -> BialgebroidSpec:
    """The pair (TP, T*P; pi)."""
    return BialgebroidSpec(tangent_algebroid(pi.chart), cotangent_algebroid(pi), f"(TP,T*P;{pi})")


def verify_bialgebroid(b: BialgebroidSpec, max_deg: int = 2) -> Report:
    """Check that d_* is a derivation of the Schouten bracket of A in degrees (1,1) and (1,0)."""
    A = b.A
    rep = Report("bialgebroid")
    r = b.rank
    names = A.names
    monos = monomials_upto(b.chart.dim, max_deg)
    ds = b.d_star_multi
    for i in range(r):
        for j in range(r):
            for e in monos:
                if i == j and not sum(e):
                    continue
                m = Poly.monomial(b.chart, e)
                x, y = A.frame(i), A.frame(j) * m
                lhs = ds(A.bracket(x, y))
                rhs = A.schouten(ds(x), y) + A.schouten(x, ds(y))
                rep.record("DERIVATION", f"{names[i]},{m}*{names[j]}", lhs - rhs)
    for i in range(r):
        for e in monos:
            if not sum(e):
                continue
            f = Poly.monomial(b.chart, e)
            for x, label in ((A.frame(i), names[i]),) + tuple(
                    (A.frame(i) * c, f"{c}*{names[i]}") for c in b.chart.coords()):
                fx = Exterior.scalar(f, r)
                lhs = ds(A.schouten(x, fx))
                rhs = A.schouten(ds(x), fx) + A.schouten(x, ds(fx))
                rep.record("DERIVATION", f"{label},{f}", lhs - rhs)
    return rep
