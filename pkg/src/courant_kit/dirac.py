"""Dirac structures in doubles, Poisson reduction and its inverse.

A candidate subbundle is presented by a finite spanning frame of polynomial
sections.  Pointwise questions are answered exactly at rational points; module
questions (closure under the bracket, admissibility) are answered by
coefficient matching up to a degree cap, giving an explicit inconclusive
verdict when the cap is too small.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebroid import AlgebroidSpec, NotPoissonError, poisson_bialgebroid, verify_algebroid
from .courant import Double, DoubleSection
from .exact import BilinearForm, Subspace, intersect, orthogonal_complement
from .modsolve import (
    generic_point,
    kernel_combinations,
    random_points,
    rank_at,
    restrict_to,
    solve_combination,
    span_at,
)
from .poly import Chart, DiffForm, Exterior, MultiVector, Poly, schouten
from .report import Verdict, conjunction

HALF = Fraction(1, 2)


class InadmissibleError(ValueError):
    pass


class NonInvolutiveError(ValueError):
    pass


@dataclass
class DiracCandidate:
    double: Double
    frame: list
    rank: int | None = None
    name: str = "L"
    point: list | None = None

    def __post_init__(self):
        self.frame = list(self.frame)
        if self.rank is None:
            self.rank = self.double.rank
        for s in self.frame:
            if not isinstance(s, DoubleSection) or s.double is not self.double:
                raise ValueError("frame sections must belong to the candidate's double")

    @property
    def chart(self) -> Chart:
        return self.double.chart

    def vectors(self) -> list[list[Poly]]:
        return [s.coefficients() for s in self.frame]

    def generic_point(self) -> list[Fraction]:
        return generic_point(self.chart, self.vectors(), self.rank, self.point)

    def at(self, point) -> Subspace:
        return span_at(self.vectors(), point, 2 * self.double.rank)

    def canonical(self, point=None) -> Subspace:
        """Canonical echelon basis of the fibre at ``point`` (default: the generic point)."""
        return self.at(point if point is not None else self.generic_point())

    def default_cap(self, extra: int = 1) -> int:
        return max((s.max_degree() for s in self.frame), default=0) + extra

    def __str__(self):
        return f"{self.name} = span{{" + ", ".join(str(s) for s in self.frame) + "}"


def pairing_form(double: Double) -> BilinearForm:
    return BilinearForm.hyperbolic(double.rank, HALF)


def _check_points(L: DiracCandidate, count: int = 3) -> list:
    """Generic point plus deterministic random points where the frame has full rank."""
    pts = [L.generic_point()]
    amb = 2 * L.double.rank
    for p in random_points(L.chart, count, seed=7):
        if rank_at(L.vectors(), p, amb) >= L.rank:
            pts.append(p)
    return pts if L.chart.dim else pts[:1]


# ---------------------------------------------------------------------------
# isotropy and integrability


def is_isotropic(L: DiracCandidate) -> Verdict:
    dbl = L.double
    for i, j in itertools.combinations_with_replacement(range(len(L.frame)), 2):
        p = dbl.pairing(L.frame[i], L.frame[j])
        if not p.is_zero():
            return Verdict.no(f"(s{i},s{j})_+ = {p}")
    return Verdict.yes()


def frame_membership(L: DiracCandidate, v: DoubleSection, cap: int, points=None) -> Verdict:
    """Is ``v`` in the polynomial span of L's frame?  Coefficients in details['coeffs']."""
    amb = 2 * L.double.rank
    vec = v.coefficients()
    for p in points if points is not None else _check_points(L):
        fib = L.at(p)
        val = [c.evaluate(p) for c in vec]
        if not fib.contains(val):
            pt = ",".join(str(x) for x in p)
            return Verdict.no(f"{v} leaves L at ({pt})")
    coeffs = solve_combination(L.vectors(), vec, cap, L.chart)
    if coeffs is None:
        return Verdict.unknown(f"no polynomial combination for {v}", cap=cap)
    return Verdict.yes(details={"coeffs": coeffs})


def is_integrable(L: DiracCandidate, cap: int | None = None) -> Verdict:
    """Closure of the frame under the double's bracket.

    ``cap`` bounds the degree of the coefficients expressing each bracket in
    the frame; by default it is the bracket's degree plus the frame's plus one.
    """
    dbl = L.double
    pts = _check_points(L)
    structure = {}
    worst = None
    for i, j in itertools.combinations(range(len(L.frame)), 2):
        v = dbl.bracket(L.frame[i], L.frame[j])
        if v.is_zero():
            structure[(i, j)] = [Poly(L.chart) for _ in L.frame]
            continue
        k = cap if cap is not None else max(v.max_degree(), 0) + L.default_cap()
        m = frame_membership(L, v, k, pts)
        if m.status == "no":
            return Verdict.no(f"[s{i},s{j}] = {v} is not in {L.name}")
        if m.is_inconclusive:
            worst = worst or Verdict.unknown(f"[s{i},s{j}] = {v}: {m.witness}", cap=k)
            continue
        structure[(i, j)] = m.details["coeffs"]
    if worst is not None:
        return worst
    return Verdict.yes(details={"structure": structure})


def induced_algebroid(L: DiracCandidate, structure: dict) -> AlgebroidSpec:
    """The Lie algebroid (L, rho|_L, bracket) in the given frame."""
    dbl = L.double
    anchor = [dbl.rho(s).as_list() if L.chart.dim else [] for s in L.frame]
    return AlgebroidSpec(L.chart, len(L.frame), anchor, structure,
                         tuple(f"s{i}" for i in range(len(L.frame))))


def is_dirac(L: DiracCandidate, cap: int | None = None, check_induced: bool = True) -> Verdict:
    """Maximal isotropy at the generic point, isotropy, and integrability."""
    pt = L.generic_point()
    dim = L.at(pt).dim
    r = L.double.rank
    if dim != r or L.rank != r:
        return Verdict.no(f"rank {dim} at generic point, need {r}")
    iso = is_isotropic(L)
    if not iso:
        return iso
    integ = is_integrable(L, cap)
    if not integ:
        return integ
    out = Verdict.yes(details=dict(integ.details))
    if check_induced and len(L.frame) == r:
        alg = induced_algebroid(L, integ.details["structure"])
        rep = verify_algebroid(alg, max_deg=1)
        out.details["induced"] = alg
        if not rep.passed:
            bad = rep.failures[0]
            return Verdict.no(f"induced algebroid fails {bad.name} {bad.inputs}: {bad.residual}")
    return out


def same_subbundle(L1: DiracCandidate, L2: DiracCandidate, cap: int = 2) -> Verdict:
    """Each frame lies in the polynomial span of the other."""
    if L1.double is not L2.double:
        raise ValueError("candidates live in different doubles")
    if L1.canonical() != L2.canonical(L1.generic_point()):
        return Verdict.no("fibres differ at the generic point")
    checks = []
    for a, b in ((L1, L2), (L2, L1)):
        for s in a.frame:
            checks.append(frame_membership(b, s, cap + s.max_degree()))
    return conjunction(checks)


# ---------------------------------------------------------------------------
# standard candidates


def a_factor(double: Double, name: str = "A") -> DiracCandidate:
    return DiracCandidate(double, [double.a_frame(i) for i in range(double.rank)], name=name)


def astar_factor(double: Double, name: str = "A*") -> DiracCandidate:
    return DiracCandidate(double, [double.astar_frame(i) for i in range(double.rank)], name=name)


def bivector_graph(double: Double, pi1: Exterior, name: str = "graph") -> DiracCandidate:
    """{pi1#(xi) + xi}: frame pi1#(eps^i) + eps^i, pi1 a 2-multisection of A."""
    if pi1.degree != 2 or pi1.rank != double.rank:
        raise ValueError("graph needs a 2-multisection of A")
    frame = []
    for i in range(double.rank):
        eps = double.b.Astar.frame(i)
        x = pi1.contract(Exterior._make(pi1.chart, pi1.rank, 1, dict(eps.comps)))
        frame.append(double.from_parts(a=double.b.A.section(x.as_list()), astar=eps))
    return DiracCandidate(double, frame, name=name)


def form_graph(double: Double, omega: Exterior, name: str = "graph") -> DiracCandidate:
    """{X + i_X omega}: frame e_i + i_{e_i} omega, omega a 2-form on A."""
    if omega.degree != 2 or omega.rank != double.rank:
        raise ValueError("graph needs a 2-cochain on A")
    frame = []
    for i in range(double.rank):
        e = double.b.A.frame(i)
        xi = omega.contract(Exterior._make(omega.chart, omega.rank, 1, dict(e.comps)))
        frame.append(double.from_parts(a=e, astar=double.b.Astar.section(xi.as_list())))
    return DiracCandidate(double, frame, name=name)


# ---------------------------------------------------------------------------
# characteristic distribution and reduction


def _pointwise_char_dim(L: DiracCandidate, pt) -> int:
    r = L.double.rank
    fib = L.at(pt)
    a_sub = Subspace.span([[int(i == j) for j in range(2 * r)] for i in range(r)], 2 * r)
    both = intersect(fib, a_sub)
    if L.chart.dim == 0:
        return 0
    fields = []
    for v in both.vectors():
        x = L.double.b.A.section([Poly.const(L.chart, c) for c in v[:r]])
        fields.append([c.evaluate(pt) for c in L.double.b.A.anchor_of(x).as_list()])
    return Subspace.span(fields, L.chart.dim).dim


def intersection_with_a(L: DiracCandidate, cap: int = 2) -> list[Exterior]:
    """Sections of L with zero A*-part, as sections of A (pointwise-independent subset)."""
    r = L.double.rank
    pt = L.generic_point()
    a_sub = Subspace.span([[int(i == j) for j in range(2 * r)] for i in range(r)], 2 * r)
    want = intersect(L.at(pt), a_sub).dim
    if want == 0:
        return []
    astar_cols = [s.astar.as_list() for s in L.frame]
    a_cols = [s.a.as_list() for s in L.frame]
    chosen: list = []
    for k in range(cap + 1):
        for c in kernel_combinations(astar_cols, k, L.chart):
            sec = [sum((c[j] * a_cols[j][i] for j in range(len(c))), Poly(L.chart)) for i in range(r)]
            if all(p.is_zero() for p in sec):
                continue
            trial = chosen + [sec]
            if len(restrict_to(trial, pt, r)) == len(trial):
                chosen.append(sec)
            if len(chosen) == want:
                break
        if len(chosen) == want:
            break
    return [L.double.b.A.section(s) for s in chosen]


def characteristic_distribution(L: DiracCandidate, cap: int = 2) -> list[MultiVector]:
    """Vector fields spanning a(L intersect A) at the generic point."""
    if L.chart.dim == 0:
        return []
    pt = L.generic_point()
    want = _pointwise_char_dim(L, pt)
    fields = [L.double.b.A.anchor_of(x) for x in intersection_with_a(L, cap)]
    fields = [f for f in fields if not f.is_zero()]
    keep = restrict_to([f.as_list() for f in fields], pt, L.chart.dim)
    out = [fields[i] for i in keep]
    if len(out) != want:
        raise ValueError(f"characteristic distribution: found rank {len(out)}, expected {want} (cap {cap})")
    return out


def admissible(L: DiracCandidate, f: Poly, cap: int = 2) -> Verdict:
    """Find Y_f in Gamma(A) with Y_f + df in Gamma(L); the section is details['Y']."""
    dbl = L.double
    df = dbl.b.d(f)
    target = df.as_list()
    if df.is_zero():
        return Verdict.yes(details={"Y": dbl.b.A.zero_section()})
    astar_cols = [s.astar.as_list() for s in L.frame]
    r = dbl.rank
    for p in _check_points(L):
        proj = Subspace.span([[c.evaluate(p) for c in col] for col in astar_cols], r)
        if not proj.contains([c.evaluate(p) for c in target]):
            pt = ",".join(str(x) for x in p)
            return Verdict.no(f"d({f}) is not in the A*-projection of {L.name} at ({pt})")
    coeffs = solve_combination(astar_cols, target, cap, L.chart)
    if coeffs is None:
        return Verdict.unknown(f"no Y_f for {f} within degree {cap}", cap=cap)
    y = dbl.b.A.zero_section()
    for c, s in zip(coeffs, L.frame):
        if c:
            y = y + s.a * c
    return Verdict.yes(details={"Y": y, "coeffs": coeffs})


def admissible_section(L: DiracCandidate, f: Poly, cap: int = 2):
    """Y_f or None.  Raises InadmissibleError when the cap is exhausted without a decision."""
    v = admissible(L, f, cap)
    if v.is_inconclusive:
        raise InadmissibleError(v.witness)
    return v.details["Y"] if v else None


def _require(L, f, cap):
    v = admissible(L, f, cap)
    if not v:
        raise InadmissibleError(f"{f} is not {L.name}-admissible: {v.label()} {v.witness}".rstrip())
    return v.details["Y"]


def e_section(L: DiracCandidate, f: Poly, y: Exterior) -> DoubleSection:
    return L.double.from_parts(a=y, astar=L.double.b.d(f))


def reduced_bracket(L: DiracCandidate, f: Poly, g: Poly, cap: int = 2, y_f: Exterior | None = None) -> Poly:
    """{f, g} = rho(Y_f + df) g for admissible f and g."""
    if y_f is None:
        y_f = _require(L, f, cap)
    _require(L, g, cap)
    return L.double.rho(e_section(L, f, y_f)).apply(g)


def astar_component_identity(L: DiracCandidate, f: Poly, g: Poly, cap: int = 2):
    """A*-part of [e_f, e_g] minus d{f, g}; zero for a Dirac structure."""
    yf, yg = _require(L, f, cap), _require(L, g, cap)
    br = L.double.bracket(e_section(L, f, yf), e_section(L, g, yg))
    return br.astar - L.double.b.d(reduced_bracket(L, f, g, cap, y_f=yf))


# ---------------------------------------------------------------------------
# quotients


@dataclass
class Submersion:
    source: Chart
    target: Chart
    components: list

    def __post_init__(self):
        if len(self.components) != self.target.dim:
            raise ValueError("need one component per target coordinate")
        self.components = [c if isinstance(c, Poly) else Poly.const(self.source, c) for c in self.components]
        for c in self.components:
            if c.chart != self.source:
                raise ValueError("components must be polynomials on the source chart")
        if self.target.dim > self.source.dim:
            raise ValueError("target dimension exceeds source dimension")
        pt = generic_point(self.source)
        if rank_at(self.jacobian_columns(), pt, self.target.dim) != self.target.dim:
            raise ValueError("Jacobian does not have full rank at the generic point")

    def pullback(self, p: Poly) -> Poly:
        if p.chart != self.target:
            raise ValueError("function is not on the target chart")
        return p.compose(self.components, self.source)

    def jacobian_columns(self) -> list[list[Poly]]:
        """Column i holds d_i J^a for every a."""
        return [[c.diff(i) for c in self.components] for i in range(self.source.dim)]

    def push(self, x: MultiVector) -> list[Poly]:
        """dJ(X) as source functions, one per target coordinate."""
        return [x.apply(c) for c in self.components]

    def kernel_fields(self, cap: int = 2) -> list[MultiVector]:
        """Vector fields spanning ker dJ at the generic point, lowest degree first."""
        n, m = self.source.dim, self.target.dim
        want = n - m
        pt = generic_point(self.source)
        cols = self.jacobian_columns()
        chosen: list = []
        for k in range(cap + 1):
            for c in kernel_combinations(cols, k, self.source):
                if len(restrict_to(chosen + [c], pt, n)) == len(chosen) + 1:
                    chosen.append(c)
                if len(chosen) == want:
                    break
            if len(chosen) == want:
                break
        if len(chosen) != want:
            raise ValueError(f"kernel of dJ not found within degree {cap}")
        return [MultiVector.vector(self.source, c) for c in chosen]


def identity_submersion(chart: Chart) -> Submersion:
    return Submersion(chart, chart, chart.coords())


@dataclass
class QuotientPoisson:
    J: Submersion
    table: list

    def __post_init__(self):
        m = self.J.target.dim
        t = self.J.target
        self.table = [[c if isinstance(c, Poly) else Poly.const(t, c) for c in row] for row in self.table]
        if len(self.table) != m or any(len(r) != m for r in self.table):
            raise ValueError("bracket table must be m x m")
        for a in range(m):
            for b in range(m):
                if self.table[a][b] != -self.table[b][a]:
                    raise ValueError(f"bracket table is not skew at ({a},{b})")
        res = schouten(self.bivector(), self.bivector())
        if not res.is_zero():
            raise NotPoissonError(res)

    def bivector(self) -> MultiVector:
        m = self.J.target.dim
        return MultiVector(self.J.target, 2, {(a, b): self.table[a][b]
                                              for a in range(m) for b in range(a + 1, m)})

    def bracket(self, f: Poly, g: Poly) -> Poly:
        m = self.J.target.dim
        out = Poly(self.J.target)
        for a in range(m):
            for b in range(m):
                if self.table[a][b]:
                    out = out + self.table[a][b] * f.diff(a) * g.diff(b)
        return out


def dirac_from_quotient(q: QuotientPoisson, pi: MultiVector, cap: int = 2, name: str = "L") -> DiracCandidate:
    """Reconstruct the Dirac structure whose reduction gives the quotient bracket.

    Frame: a basis of D = ker dJ, then Y_a + d(J*u_a) for each target
    coordinate u_a, where dJ(Y_a) = J*{u_a, .} - {J*u_a, J* .}_P on the
    target coordinates.
    """
    J = q.J
    if pi.chart != J.source:
        raise ValueError("Poisson bivector must live on the source chart")
    dbl = Double(poisson_bialgebroid(pi))
    m = J.target.dim
    kernel = J.kernel_fields(cap)
    cols = J.jacobian_columns()
    ups = [J.pullback(u) for u in J.target.coords()]
    frame = [dbl.from_parts(a=dbl.b.A.section(v.as_list())) for v in kernel]
    for a in range(m):
        diff_row = [J.pullback(q.table[a][b]) - dbl.base_poisson(ups[a], ups[b]) for b in range(m)]
        y = solve_combination(cols, diff_row, cap, J.source)
        if y is None:
            raise ValueError(f"no polynomial lift of the difference bracket for {J.target.names[a]}")
        frame.append(dbl.from_parts(a=dbl.b.A.section(y), astar=dbl.b.d(ups[a])))
    return DiracCandidate(dbl, frame, name=name)


def check_foliation(L: DiracCandidate, J: Submersion, cap: int = 2) -> Verdict:
    """a(L intersect A) = ker dJ, pointwise at the generic point."""
    char = characteristic_distribution(L, cap)
    for x in char:
        img = J.push(x)
        if any(not c.is_zero() for c in img):
            return Verdict.no(f"{x} is not tangent to the fibres of J")
    want = J.source.dim - J.target.dim
    if len(char) != want:
        return Verdict.no(f"characteristic rank {len(char)}, fibres of J have dimension {want}")
    return Verdict.yes()


def null_dirac(D: Sequence[MultiVector], pi: MultiVector, cap: int = 2, name: str = "null"):
    """L = D + ann(D) for an involutive distribution D; returns (candidate, is_dirac verdict)."""
    chart = pi.chart
    n = chart.dim
    dbl = Double(poisson_bialgebroid(pi))
    D = list(D)
    pt = generic_point(chart, [x.as_list() for x in D], len(D))
    dvecs = [x.as_list() for x in D]
    k = rank_at(dvecs, pt, n) if D else 0
    if k != len(D):
        raise ValueError("distribution frame is not pointwise independent at the generic point")
    for i, j in itertools.combinations(range(len(D)), 2):
        br = schouten(D[i], D[j])
        if br.is_zero():
            continue
        if solve_combination(dvecs, br.as_list(), cap + br.max_coeff_degree(), chart) is None:
            raise NonInvolutiveError(f"[{D[i]}, {D[j]}] = {br} is not in D")
    # annihilator: 1-forms xi with xi(D_k) = 0
    cols = [[x.as_list()[i] for x in D] for i in range(n)]
    ann: list = []
    for kcap in range(cap + 1):
        if len(ann) == n - k:
            break
        for c in kernel_combinations(cols, kcap, chart) if D else [[Poly.const(chart, int(i == j)) for j in range(n)]
                                                                      for i in range(n)]:
            if len(restrict_to(ann + [c], pt, n)) == len(ann) + 1:
                ann.append(c)
            if len(ann) == n - k:
                break
    if len(ann) != n - k:
        raise ValueError(f"annihilator of D not found within degree {cap}")
    frame = [dbl.from_parts(a=dbl.b.A.section(x.as_list())) for x in D]
    frame += [dbl.from_parts(astar=dbl.b.Astar.section(c)) for c in ann]
    L = DiracCandidate(dbl, frame, name=name)
    return L, is_dirac(L)


# ---------------------------------------------------------------------------
# hamiltonian operators


def maurer_cartan_residual(b, omega: Exterior) -> Exterior:
    """d omega + 1/2 [omega, omega]_* for a 2-cochain omega on A."""
    return b.d_multi(omega) + b.Astar.schouten(omega, omega) * HALF


def hamiltonian_check(b, omega: Exterior, cap: int | None = None) -> Verdict:
    """Maurer-Cartan test for a 2-form, cross-checked against the Dirac test of its graph."""
    if omega.degree != 2:
        raise ValueError("hamiltonian operators are 2-cochains")
    res = maurer_cartan_residual(b, omega)
    graph = is_dirac(form_graph(Double(b), omega), cap)
    details = {"residual": res, "graph": graph}
    if res.is_zero():
        return Verdict.yes(details=details)
    return Verdict.no(f"dI + 1/2[I,I] = {res}", details=details)
