"""Exact rational linear algebra: matrices, echelon forms, subspaces, bilinear forms.

Everything here works over ``fractions.Fraction``; there is no floating point.
Subspaces are stored by their reduced row echelon basis, which is unique, so
two subspaces are equal exactly when their bases are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class DimensionError(ValueError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted")
    return Fraction(x)


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError("entries length must equal rows*cols")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], cols: int | None = None) -> "RatMatrix":
        rows = [[as_fraction(x) for x in r] for r in rows]
        if cols is None:
            if not rows:
                raise DimensionError("column count needed for an empty matrix")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise DimensionError("ragged rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)], self.rows)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            r = self.row(i)
            out.append([sum((r[k] * other[k, j] for k in range(self.cols) if r[k]), Fraction(0))
                        for j in range(other.cols)])
        return RatMatrix.from_rows(out, other.cols)

    def apply(self, v: Sequence) -> list[Fraction]:
        """Matrix times column vector."""
        if len(v) != self.cols:
            raise DimensionError("vector length mismatch")
        return [sum((self[i, k] * v[k] for k in range(self.cols) if v[k]), Fraction(0))
                for i in range(self.rows)]

    def __neg__(self):
        return RatMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shape mismatch")
        return RatMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(x) for x in self.row(i)) + "]"
                               for i in range(self.rows)) + "]"


def _rref_rows(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rref(m: RatMatrix) -> tuple[RatMatrix, list[int]]:
    """Reduced row echelon form with zero rows dropped, and the pivot columns."""
    rows, pivots = _rref_rows(m.to_rows(), m.cols)
    return RatMatrix.from_rows(rows, m.cols), pivots


def rank(m: RatMatrix) -> int:
    return len(rref(m)[1])


def nullspace(m: RatMatrix) -> list[list[Fraction]]:
    """Basis of {x : m x = 0}, one free variable set to 1 per vector."""
    rows, pivots = _rref_rows(m.to_rows(), m.cols)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * m.cols
        v[fc] = Fraction(1)
        for row, pc in zip(rows, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def solve(m: RatMatrix, b: Sequence) -> list[Fraction] | None:
    """One solution of m x = b (free variables zero), or None if inconsistent."""
    aug = [list(m.row(i)) + [as_fraction(b[i])] for i in range(m.rows)]
    rows, pivots = _rref_rows(aug, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [Fraction(0)] * m.cols
    for row, pc in zip(rows, pivots):
        x[pc] = row[-1]
    return x


def solve_sparse(equations: list[dict], rhs: list, nvars: int, want_kernel: bool = True):
    """Solve a sparse linear system exactly.

    ``equations[k]`` maps variable index to coefficient; returns
    ``(solution, kernel)`` where ``solution`` is a dict (free variables set to
    zero) or None when the system is inconsistent, and ``kernel`` is a list of
    dicts spanning the homogeneous solutions.
    """
    rows = []
    for eq, b in zip(equations, rhs):
        row = {k: as_fraction(v) for k, v in eq.items() if v}
        b = as_fraction(b)
        if row or b:
            rows.append((row, b))
    pivot_rows: dict[int, tuple[dict, Fraction]] = {}
    order = []
    for row, b in rows:
        row = dict(row)
        # reduce against existing pivots
        for pc in order:
            c = row.get(pc)
            if c:
                prow, pb = pivot_rows[pc]
                for k, v in prow.items():
                    nv = row.get(k, 0) - c * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
                b = b - c * pb
        if not row:
            if b:
                return None, []
            continue
        pc = min(row)
        inv = 1 / row[pc]
        row = {k: v * inv for k, v in row.items()}
        b = b * inv
        # eliminate the new pivot from older rows
        for oc in order:
            orow, ob = pivot_rows[oc]
            c = orow.get(pc)
            if c:
                for k, v in row.items():
                    nv = orow.get(k, 0) - c * v
                    if nv:
                        orow[k] = nv
                    else:
                        orow.pop(k, None)
                pivot_rows[oc] = (orow, ob - c * b)
        pivot_rows[pc] = (row, b)
        order.append(pc)
    solution = {pc: b for pc, (_, b) in pivot_rows.items() if b}
    pivots = set(order)
    kernel = []
    for fv in range(nvars if want_kernel else 0):
        if fv in pivots:
            continue
        vec = {fv: Fraction(1)}
        for pc, (row, _) in pivot_rows.items():
            c = row.get(fv)
            if c:
                vec[pc] = -c
        kernel.append(vec)
    return solution, kernel


@dataclass(frozen=True)
class Subspace:
    ambient_dim: int
    basis: RatMatrix

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        vectors = [list(v) for v in vectors]
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionError("vector length does not match ambient dimension")
        if not vectors:
            return cls.zero(ambient_dim)
        b, _ = rref(RatMatrix.from_rows(vectors, ambient_dim))
        return cls(ambient_dim, b)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, RatMatrix(0, n, ()))

    @classmethod
    def whole(cls, n: int) -> "Subspace":
        return cls(n, RatMatrix.identity(n))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> list[list[Fraction]]:
        return self.basis.to_rows()

    def contains(self, v: Sequence) -> bool:
        return Subspace.span(self.vectors() + [list(v)], self.ambient_dim).dim == self.dim

    def contains_subspace(self, other: "Subspace") -> bool:
        return (self + other).dim == self.dim

    def __add__(self, other: "Subspace") -> "Subspace":
        _check_dims(self, other)
        return Subspace.span(self.vectors() + other.vectors(), self.ambient_dim)

    def __str__(self):
        return f"span{self.basis}" if self.dim else "0"


def _check_dims(u, v):
    if u.ambient_dim != v.ambient_dim:
        raise DimensionError(f"ambient dimensions differ: {u.ambient_dim} vs {v.ambient_dim}")


def intersect(u: Subspace, v: Subspace) -> Subspace:
    _check_dims(u, v)
    n = u.ambient_dim
    if u.dim == 0 or v.dim == 0:
        return Subspace.zero(n)
    stacked = RatMatrix.from_rows(u.vectors() + v.vectors(), n)
    # left kernel of the stacked basis: a.U + b.V = 0  =>  a.U lies in both
    combos = nullspace(stacked.T)
    vecs = []
    for c in combos:
        vecs.append([sum((c[i] * u.basis[i, j] for i in range(u.dim)), Fraction(0)) for j in range(n)])
    return Subspace.span(vecs, n)


@dataclass(frozen=True)
class BilinearForm:
    ambient_dim: int
    gram: RatMatrix
    symmetry: str = "symmetric"

    def __post_init__(self):
        if self.symmetry not in ("symmetric", "antisymmetric"):
            raise ValueError("symmetry must be 'symmetric' or 'antisymmetric'")
        if self.gram.rows != self.ambient_dim or self.gram.cols != self.ambient_dim:
            raise DimensionError("gram matrix must be square of the ambient dimension")
        t = self.gram.T
        if self.symmetry == "symmetric" and t != self.gram:
            raise ValueError("gram matrix is not symmetric")
        if self.symmetry == "antisymmetric" and t != -self.gram:
            raise ValueError("gram matrix is not antisymmetric")

    def __call__(self, x: Sequence, y: Sequence) -> Fraction:
        gy = self.gram.apply(y)
        return sum((a * b for a, b in zip(x, gy) if a), Fraction(0))

    def is_nondegenerate(self) -> bool:
        return rank(self.gram) == self.ambient_dim

    @classmethod
    def hyperbolic(cls, n: int, scale=Fraction(1, 2)) -> "BilinearForm":
        """Split form on Q^n + Q^n pairing coordinate i with n+i, scaled by ``scale``."""
        s = as_fraction(scale)
        rows = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            rows[i][n + i] = s
            rows[n + i][i] = s
        return cls(2 * n, RatMatrix.from_rows(rows, 2 * n), "symmetric")


def orthogonal_complement(u: Subspace, b: BilinearForm) -> Subspace:
    if u.ambient_dim != b.ambient_dim:
        raise DimensionError("subspace and form live in different dimensions")
    n = u.ambient_dim
    if u.dim == 0:
        return Subspace.whole(n)
    # w with b(w, u_i) = 0 for every basis row u_i
    constraints = RatMatrix.from_rows([b.gram.apply(v) for v in u.vectors()], n)
    return Subspace.span(nullspace(constraints), n)


def is_isotropic(u: Subspace, b: BilinearForm) -> bool:
    vs = u.vectors()
    return all(b(x, y) == 0 for i, x in enumerate(vs) for y in vs[i:])


def is_maximal_isotropic(u: Subspace, b: BilinearForm) -> bool:
    if b.ambient_dim % 2:
        raise DimensionError("maximal isotropy needs an even-dimensional ambient space")
    if u.ambient_dim != b.ambient_dim:
        raise DimensionError("subspace and form live in different dimensions")
    return u.dim == b.ambient_dim // 2 and is_isotropic(u, b)
