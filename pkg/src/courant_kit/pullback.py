"""Pulling back maximal isotropic subbundles along surjective bialgebroid maps."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .algebroid import BialgebroidSpec, poisson_bialgebroid
from .courant import Double, DoubleSection
from .dirac import DiracCandidate, Submersion, is_dirac, is_isotropic
from .modsolve import generic_point, kernel_combinations, rank_at, restrict_to, solve_combination, solve_images
from .poly import Exterior, MultiVector, Poly, monomials_upto
from .report import FAIL, PASS, Check, Report


class NotSurjectiveError(ValueError):
    pass


@dataclass
class BundleSurjection:
    """Phi: A -> B over J: P -> Q; row i of ``phi`` is Phi(e_i) in the frame of B."""

    source: BialgebroidSpec
    target: BialgebroidSpec
    base: Submersion
    phi: list

    def __post_init__(self):
        P, Q = self.source.chart, self.target.chart
        if self.base.source != P or self.base.target != Q:
            raise ValueError("base map charts do not match the bialgebroids")
        ra, rb = self.source.rank, self.target.rank
        self.phi = [[c if isinstance(c, Poly) else Poly.const(P, c) for c in row] for row in self.phi]
        if len(self.phi) != ra or any(len(row) != rb for row in self.phi):
            raise ValueError(f"fibre map must be {ra} x {rb}")
        pt = generic_point(P)
        if rank_at(self.phi, pt, rb) != rb:
            raise NotSurjectiveError("fibre map is not surjective at the generic point")
        self.sdouble = Double(self.source)
        self.tdouble = Double(self.target)

    @property
    def rank_a(self) -> int:
        return self.source.rank

    @property
    def rank_b(self) -> int:
        return self.target.rank

    # transport of coefficients

    def pull(self, coeffs: Sequence[Poly]) -> list[Poly]:
        return [self.base.pullback(c) for c in coeffs]

    def descend(self, g: Poly, cap: int | None = None) -> Poly | None:
        """h on Q with h o J = g, or None."""
        Q = self.base.target
        if g.is_zero():
            return Poly(Q)
        cap = g.degree if cap is None else cap
        monos = monomials_upto(Q.dim, cap)
        images = [[self.base.pullback(Poly.monomial(Q, e))] for e in monos]
        vec, _ = solve_images(images, [g])
        if vec is None:
            return None
        out = Poly(Q)
        for e, u in zip(monos, vec):
            if u:
                out = out + Poly.monomial(Q, e, u)
        return out

    def push_a(self, x: Exterior) -> list[Poly]:
        """Phi(X) as source functions in the frame of B."""
        c = x.as_list()
        return [sum((c[i] * self.phi[i][k] for i in range(self.rank_a) if c[i]), Poly(self.source.chart))
                for k in range(self.rank_b)]

    def dual(self, eta: Sequence[Poly]) -> list[Poly]:
        """Phi^*(eta) for eta given by source-function coefficients in the frame of B*."""
        return [sum((self.phi[i][k] * eta[k] for k in range(self.rank_b) if eta[k]), Poly(self.source.chart))
                for i in range(self.rank_a)]

    def dual_inverse(self, xi: Exterior, cap: int = 2) -> list[Poly] | None:
        """eta with Phi^*(eta) = xi, or None when xi is not in (ker Phi)^perp polynomially."""
        cols = [[self.phi[i][k] for i in range(self.rank_a)] for k in range(self.rank_b)]
        return solve_combination(cols, xi.as_list(), cap + xi.max_coeff_degree(), self.source.chart)

    def lift(self, y: Sequence[Poly], cap: int = 2) -> list[Poly] | None:
        """Minimal-degree X on P with Phi(X) = y (y already pulled back to P)."""
        deg = max((p.degree for p in y if not p.is_zero()), default=0)
        return solve_combination(self.phi, list(y), cap + deg, self.source.chart)

    def kernel_frame(self, cap: int = 2) -> list[list[Poly]]:
        want = self.rank_a - self.rank_b
        if want == 0:
            return []
        pt = generic_point(self.source.chart)
        cols = self.phi
        chosen: list = []
        for k in range(cap + 1):
            for c in kernel_combinations(cols, k, self.source.chart):
                if len(restrict_to(chosen + [c], pt, self.rank_a)) == len(chosen) + 1:
                    chosen.append(c)
                if len(chosen) == want:
                    return chosen
        raise ValueError(f"kernel of the fibre map not found within degree {cap}")


def tangent_surjection(J: Submersion, pi_source: MultiVector, pi_target: MultiVector) -> BundleSurjection:
    """dJ: TP -> TQ between (TP, T*P; pi_source) and (TQ, T*Q; pi_target)."""
    phi = [[c.diff(i) for c in J.components] for i in range(J.source.dim)]
    return BundleSurjection(poisson_bialgebroid(pi_source), poisson_bialgebroid(pi_target), J, phi)


def is_admissible_section(s: BundleSurjection, e, kind: str = "a", cap: int = 2):
    """Target section of an admissible source section, or None.

    ``e`` is a section of the double, or a section of A (kind="a") or of A*
    lying in (ker Phi)^perp (kind="astar"); the result has the same kind on
    the target side.
    """
    if isinstance(e, DoubleSection):
        a = _descend_a(s, e.a, cap)
        b = _descend_dual(s, e.astar, cap)
        if a is None or b is None:
            return None
        return s.tdouble.from_parts(a=a, astar=b)
    if e.chart != s.source.chart or e.degree != 1 or e.rank != s.rank_a:
        raise ValueError("expected a section of A or A* on the source")
    if kind == "a":
        return _descend_a(s, e, cap)
    if kind == "astar":
        return _descend_dual(s, e, cap)
    raise ValueError(f"unknown section kind {kind!r}")


def _descend_a(s, x, cap):
    out = []
    for g in s.push_a(x):
        h = s.descend(g, cap + g.degree)
        if h is None:
            return None
        out.append(h)
    return s.target.A.section(out)


def _descend_dual(s, xi, cap):
    if xi.is_zero():
        return s.target.Astar.zero_section()
    eta = s.dual_inverse(xi, cap)
    if eta is None:
        return None
    out = []
    for g in eta:
        h = s.descend(g, cap + g.degree)
        if h is None:
            return None
        out.append(h)
    return s.target.Astar.section(out)


def is_morphism(s: BundleSurjection, samples: int | None = None) -> Report:
    """Anchors and brackets intertwined by Phi and (Phi^*)^{-1} on frame lifts.

    ANCHOR(A):  dJ(a(X)) = a_B(Phi X) o J on frame sections of A.
    ANCHOR(A*): dJ(a_*(Phi^* eta)) = a_B*(eta) o J on frame sections of B*.
    BRACKET(A): Phi [X, Y] = [Phi X, Phi Y] o J on lifts of B's frame and on ker Phi.
    BRACKET(A*): [Phi^* eta, Phi^* zeta] = Phi^*([eta, zeta] o J).
    """
    rep = Report("morphism")
    A, B = s.source.A, s.target.A
    As, Bs = s.source.Astar, s.target.Astar
    J = s.base
    for i in range(s.rank_a):
        e = A.frame(i)
        lhs = J.push(A.anchor_of(e))
        y = s.push_a(e)
        rhs = [sum((y[k] * J.pullback(B.anchor_of(B.frame(k)).apply(u)) for k in range(s.rank_b) if y[k]),
                   Poly(J.source)) for u in J.target.coords()]
        rep.record("ANCHOR(A)", A.names[i], [p - q for p, q in zip(lhs, rhs)])
    dual_frame = []
    for k in range(s.rank_b):
        eta = [Poly.const(J.source, int(k == l)) for l in range(s.rank_b)]
        xi = As.section(s.dual(eta))
        dual_frame.append(xi)
        lhs = J.push(As.anchor_of(xi))
        rhs = [J.pullback(Bs.anchor_of(Bs.frame(k)).apply(u)) for u in J.target.coords()]
        rep.record("ANCHOR(A*)", Bs.names[k], [p - q for p, q in zip(lhs, rhs)])

    lifts = []
    for k in range(s.rank_b):
        unit = [Poly.const(J.source, int(k == l)) for l in range(s.rank_b)]
        x = s.lift(unit)
        if x is None:
            rep.add(Check("LIFT", B.names[k], FAIL, "no polynomial lift"))
            continue
        lifts.append((B.names[k], A.section(x), B.frame(k)))
    for c in s.kernel_frame():
        lifts.append(("ker", A.section(c), B.zero_section()))
    if samples is not None:
        lifts = lifts[:samples]
    for (n1, x1, y1), (n2, x2, y2) in itertools.combinations(lifts, 2):
        lhs = s.push_a(A.bracket(x1, x2))
        rhs = s.pull(B.bracket(y1, y2).as_list())
        rep.record("BRACKET(A)", f"{n1},{n2}", [p - q for p, q in zip(lhs, rhs)])
    for k, l in itertools.combinations(range(s.rank_b), 2):
        lhs = As.bracket(dual_frame[k], dual_frame[l]).as_list()
        rhs = s.dual(s.pull(Bs.bracket(Bs.frame(k), Bs.frame(l)).as_list()))
        rep.record("BRACKET(A*)", f"{Bs.names[k]},{Bs.names[l]}", [p - q for p, q in zip(lhs, rhs)])
    return rep


def pullback_isotropic(s: BundleSurjection, L: DiracCandidate, cap: int = 2, name: str | None = None) -> DiracCandidate:
    """Lbar = {(X, Phi^* eta) : (Phi X, eta) in L}, framed by lifts of L's frame plus ker Phi."""
    if L.double.b is not s.target and L.double.b != s.target:
        raise ValueError("candidate does not live in the target double")
    if not is_isotropic(L):
        raise ValueError("only isotropic subbundles can be pulled back")
    dbl = s.sdouble
    frame = []
    for sec in L.frame:
        y = s.pull(sec.a.as_list())
        eta = s.pull(sec.astar.as_list())
        x = s.lift(y, cap)
        if x is None:
            raise ValueError(f"no polynomial lift of {sec} within degree {cap}")
        frame.append(dbl.section(x, s.dual(eta)))
    for c in s.kernel_frame(cap):
        frame.append(dbl.section(c))
    return DiracCandidate(dbl, frame, name=name or f"pullback({L.name})")


def phi_bar(s: BundleSurjection, e: DoubleSection, cap: int = 2):
    """(Phi X, (Phi^*)^{-1} xi) as source-function coefficients, or None off (ker Phi)^perp."""
    eta = s.dual_inverse(e.astar, cap) if not e.astar.is_zero() else [Poly(s.source.chart)] * s.rank_b
    if eta is None:
        return None
    return s.push_a(e.a) + eta


def verify_pullback_theorem(s: BundleSurjection, L: DiracCandidate, cap: int | None = None) -> Report:
    """is_dirac(Lbar) iff is_dirac(L); intertwining on admissible frame pairs when both hold."""
    rep = Report("pullback")
    Lb = pullback_isotropic(s, L)
    rep.notes.append(f"pullback frame: {Lb}")
    pt = Lb.generic_point()
    rep.record("RANK", Lb.name, Lb.at(pt).dim - s.rank_a)
    for i, j in itertools.combinations_with_replacement(range(len(Lb.frame)), 2):
        rep.record("ISOTROPIC", f"s{i},s{j}", s.sdouble.pairing(Lb.frame[i], Lb.frame[j]))
    vt = is_dirac(L, cap)
    vs = is_dirac(Lb, cap)
    rep.notes.append(vt.render(f"DIRAC {L.name}"))
    rep.notes.append(vs.render(f"DIRAC {Lb.name}"))
    if vt.is_inconclusive or vs.is_inconclusive:
        rep.add(Check("EQUIVALENCE", f"{L.name},{Lb.name}", "INCONCLUSIVE",
                      f"{vt.label()} vs {vs.label()}"))
        return rep
    same = bool(vt) == bool(vs)
    rep.add(Check("EQUIVALENCE", f"{L.name},{Lb.name}", PASS if same else FAIL,
                  "" if same else f"{vt.label()} vs {vs.label()}"))
    if not (vt and vs):
        return rep
    # the first len(L.frame) members of Lb lift L's frame; the rest span ker Phi + 0
    n = len(L.frame)
    images = list(L.frame) + [s.tdouble.zero()] * (len(Lb.frame) - n)
    for i, j in itertools.combinations(range(len(Lb.frame)), 2):
        got = phi_bar(s, s.sdouble.bracket(Lb.frame[i], Lb.frame[j]))
        want = s.pull(s.tdouble.bracket(images[i], images[j]).coefficients())
        if got is None:
            rep.add(Check("INTERTWINING", f"s{i},s{j}", FAIL, "A*-part outside (ker Phi)^perp"))
            continue
        rep.record("INTERTWINING", f"s{i},s{j}", [p - q for p, q in zip(got, want)])
    return rep
