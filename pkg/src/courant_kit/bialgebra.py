"""Lie bialgebras over a point: the Manin double and its Dirac subalgebras."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import BilinearForm, RatMatrix, Subspace, as_fraction, intersect
from .report import FAIL, PASS, Check, Report, Verdict

SEARCH_LIMIT = 200_000


def _table(n: int, entries, what: str) -> list:
    """Dense antisymmetric table t[i][j][k] from triples (i, j, k, value) with i != j."""
    t = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    seen = {}
    for item in entries:
        i, j, k, val = item
        val = as_fraction(val)
        if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
            raise ValueError(f"{what}: index out of range in {item}")
        if i == j:
            if val:
                raise ValueError(f"{what}: bracket of a basis element with itself must vanish")
            continue
        key = (min(i, j), max(i, j), k)
        v = val if i < j else -val
        if key in seen and seen[key] != v:
            raise ValueError(f"{what}: entries for ({i},{j}) and ({j},{i}) are not antisymmetric")
        seen[key] = v
    for (i, j, k), v in seen.items():
        t[i][j][k] = v
        t[j][i][k] = -v
    return t


def _jacobi_residual(t, i, j, k) -> list:
    n = len(t)

    def br(u, v):
        out = [Fraction(0)] * n
        for a, ua in enumerate(u):
            if not ua:
                continue
            for b, vb in enumerate(v):
                if vb:
                    for c in range(n):
                        out[c] += ua * vb * t[a][b][c]
        return out

    def unit(a):
        return [Fraction(int(a == b)) for b in range(n)]

    ei, ej, ek = unit(i), unit(j), unit(k)
    r1, r2, r3 = br(br(ei, ej), ek), br(br(ej, ek), ei), br(br(ek, ei), ej)
    return [a + b + c for a, b, c in zip(r1, r2, r3)]


def jacobi_report(t, names: Sequence[str], label: str = "JACOBI") -> Report:
    rep = Report(label)
    for i, j, k in itertools.combinations(range(len(t)), 3):
        rep.record(label, f"{names[i]},{names[j]},{names[k]}", _jacobi_residual(t, i, j, k))
    return rep


@dataclass
class LieBialgebra:
    """Structure constants [e_i, e_j] = c^k_ij e_k on g and [e^i, e^j] = f^ij_k e^k on g*."""

    dim: int
    c: list
    f: list
    names: tuple = ()

    def __post_init__(self):
        n = self.dim
        if not self.names:
            self.names = tuple(f"e{i + 1}" for i in range(n))
        for what, t in (("g", self.c), ("g*", self.f)):
            bad = jacobi_report(t, self.names).failures
            if bad:
                raise ValueError(f"{what} fails Jacobi on {bad[0].inputs}: {bad[0].residual}")

    @classmethod
    def from_triples(cls, dim: int, c: Iterable = (), f: Iterable = (), names: tuple = ()) -> "LieBialgebra":
        return cls(dim, _table(dim, c, "g"), _table(dim, f, "g*"), tuple(names))

    @property
    def dual_names(self) -> tuple:
        return tuple(f"{n}*" for n in self.names)


@dataclass
class QuadraticLieAlgebra:
    """Structure constants t[i][j][k] on Q^{2n} with an invariant symmetric form."""

    dim: int
    table: list
    gram: BilinearForm
    names: tuple

    @property
    def half(self) -> int:
        return self.dim // 2

    def bracket(self, u: Sequence, v: Sequence) -> list[Fraction]:
        out = [Fraction(0)] * self.dim
        for a, ua in enumerate(u):
            if not ua:
                continue
            for b, vb in enumerate(v):
                if vb:
                    row = self.table[a][b]
                    for c in range(self.dim):
                        if row[c]:
                            out[c] += ua * vb * row[c]
        return out

    def unit(self, i: int) -> list[Fraction]:
        return [Fraction(int(i == j)) for j in range(self.dim)]

    def jacobi_report(self) -> Report:
        return jacobi_report(self.table, self.names)

    def invariance_report(self) -> Report:
        """([x,y], z) + (y, [x,z]) = 0 on basis triples."""
        rep = Report("invariance")
        for i, j, k in itertools.product(range(self.dim), repeat=3):
            x, y, z = self.unit(i), self.unit(j), self.unit(k)
            res = self.gram(self.bracket(x, y), z) + self.gram(y, self.bracket(x, z))
            rep.record("INVARIANT", f"{self.names[i]},{self.names[j]},{self.names[k]}", res)
        return rep

    def is_lie(self) -> bool:
        return self.jacobi_report().passed

    def ad_matrix(self, x: Sequence) -> RatMatrix:
        """Matrix of ad_x; column j is [x, basis_j]."""
        cols = [self.bracket(x, self.unit(j)) for j in range(self.dim)]
        return RatMatrix.from_rows([[cols[j][i] for j in range(self.dim)] for i in range(self.dim)])


def build_double(b: LieBialgebra) -> QuadraticLieAlgebra:
    """g + g* with [X+xi, Y+eta] = ([X,Y] + ad*_xi Y - ad*_eta X) + ([xi,eta] + ad*_X eta - ad*_Y xi).

    ad*_X xi = -xi o ad_X.  In the basis e_0..e_{n-1}, e^0..e^{n-1}:
    [e_i, e^j] = sum_l f^{jl}_i e_l - sum_l c^j_{il} e^l.
    """
    n = b.dim
    N = 2 * n
    t = [[[Fraction(0)] * N for _ in range(N)] for _ in range(N)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                t[i][j][k] = b.c[i][j][k]
                t[n + i][n + j][n + k] = b.f[i][j][k]
    for i in range(n):
        for j in range(n):
            for l in range(n):
                v_a = b.f[j][l][i]
                v_s = -b.c[i][l][j]
                t[i][n + j][l] += v_a
                t[i][n + j][n + l] += v_s
                t[n + j][i][l] -= v_a
                t[n + j][i][n + l] -= v_s
    return QuadraticLieAlgebra(N, t, BilinearForm.hyperbolic(n), tuple(b.names) + b.dual_names)


def compatibility_report(b: LieBialgebra) -> Report:
    """Jacobi of the double plus invariance of its form: the pair is a bialgebra iff both pass."""
    d = build_double(b)
    rep = d.jacobi_report()
    rep.extend(d.invariance_report())
    return rep


# ---------------------------------------------------------------------------
# Dirac subalgebras


@dataclass
class SubalgebraCandidate:
    space: Subspace
    label: str = "L"
    r: tuple | None = None

    def __str__(self):
        return f"{self.label} = {self.space}"


def g_part(d: QuadraticLieAlgebra, label: str = "g") -> SubalgebraCandidate:
    return SubalgebraCandidate(Subspace.span([d.unit(i) for i in range(d.half)], d.dim), label)


def gstar_part(d: QuadraticLieAlgebra, label: str = "g*") -> SubalgebraCandidate:
    n = d.half
    return SubalgebraCandidate(Subspace.span([d.unit(n + i) for i in range(n)], d.dim), label)


def _space(L) -> Subspace:
    return L.space if isinstance(L, SubalgebraCandidate) else L


def closure_witness(d: QuadraticLieAlgebra, space: Subspace):
    basis = space.vectors()
    for i, j in itertools.combinations(range(len(basis)), 2):
        br = d.bracket(basis[i], basis[j])
        if not space.contains(br):
            return i, j, br
    return None


def is_dirac_subalgebra(d: QuadraticLieAlgebra, L) -> Verdict:
    space = _space(L)
    if space.ambient_dim != d.dim:
        raise ValueError(f"candidate lives in Q^{space.ambient_dim}, double has dimension {d.dim}")
    if space.dim != d.half:
        return Verdict.no(f"dimension {space.dim}, need {d.half}")
    basis = space.vectors()
    for i, j in itertools.combinations_with_replacement(range(len(basis)), 2):
        p = d.gram(basis[i], basis[j])
        if p:
            return Verdict.no(f"(b{i},b{j})_+ = {p}")
    bad = closure_witness(d, space)
    if bad:
        i, j, br = bad
        return Verdict.no(f"[b{i},b{j}] = {_fmt(br)} not in L")
    return Verdict.yes()


def _fmt(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


@dataclass
class Regularity:
    h: Subspace
    report: Report

    @property
    def dim_h(self) -> int:
        return self.h.dim


def regularity_report(d: QuadraticLieAlgebra, L) -> Regularity:
    """h = L intersect g with its canonical basis and a subalgebra check.

    Whether the corresponding subgroup is closed, and whether its left
    translates form a simple foliation, cannot be read off structure
    constants; that caveat is recorded as a note.
    """
    space = _space(L)
    h = intersect(space, g_part(d).space)
    rep = Report("regularity")
    rep.notes.append(f"h = {h}")
    rep.notes.append(f"dim h = {h.dim}")
    bad = closure_witness(d, h)
    rep.add(Check("SUBALGEBRA", "h", PASS if bad is None else FAIL,
                  "" if bad is None else _fmt(bad[2])))
    rep.notes.append("closedness of the subgroup integrating h is not decided")
    return Regularity(h, rep)


def ad_invariance(d: QuadraticLieAlgebra, L, generators: Sequence | None = None) -> Verdict:
    """Every generator maps L into L.  Without generators: ad_x for x in a basis of h = L intersect g."""
    space = _space(L)
    if generators is None:
        h = intersect(space, g_part(d).space)
        generators = [d.ad_matrix(x) for x in h.vectors()]
    for k, m in enumerate(generators):
        if not isinstance(m, RatMatrix):
            m = RatMatrix.from_rows(m)
        if m.rows != m.cols or m.rows != d.dim:
            raise ValueError(f"generator {k} must be {d.dim} x {d.dim}")
        for v in space.vectors():
            img = m.apply(v)
            if not space.contains(img):
                return Verdict.no(f"generator {k} sends {_fmt(v)} to {_fmt(img)}")
    return Verdict.yes()


def r_graph(d: QuadraticLieAlgebra, r: dict, label: str = "graph") -> SubalgebraCandidate:
    """{r(xi) + xi} for skew r given by r[(i, j)] = r^{ij}, i < j; r(e^i) = sum_j r^{ij} e_j."""
    n = d.half
    full = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), v in r.items():
        full[i][j] = as_fraction(v)
        full[j][i] = -as_fraction(v)
    rows = [full[i] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    key = tuple(full[i][j] for i, j in itertools.combinations(range(n), 2))
    return SubalgebraCandidate(Subspace.span(rows, d.dim), label, key)


def search_dirac_graphs(d: QuadraticLieAlgebra, coeff_set: Sequence, limit: int = SEARCH_LIMIT) -> list[SubalgebraCandidate]:
    """All skew r with entries in ``coeff_set`` whose graph is a Dirac subalgebra, in lexicographic order."""
    n = d.half
    values = sorted({as_fraction(c) for c in coeff_set})
    pairs = list(itertools.combinations(range(n), 2))
    total = len(values) ** len(pairs)
    if total > limit:
        raise ValueError(f"grid has {total} candidates, more than the limit {limit}")
    out = []
    for combo in itertools.product(values, repeat=len(pairs)):
        r = {p: v for p, v in zip(pairs, combo) if v}
        cand = r_graph(d, r, "graph(" + ",".join(str(v) for v in combo) + ")")
        if is_dirac_subalgebra(d, cand):
            out.append(cand)
    return out
