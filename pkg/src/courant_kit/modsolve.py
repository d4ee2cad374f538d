"""Membership and syzygies in free modules over Q[x], up to a degree cap.

Unknown polynomial coefficients are expanded in monomials of bounded degree;
matching coefficients turns every question into sparse exact linear algebra.
A result found this way is a certificate.  Failing to find one only means
nothing exists within the cap, so callers pair this with pointwise checks.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .exact import Subspace, solve_sparse
from .poly import Chart, Poly, monomials_upto


def _system(images: list, target: list | None):
    """Build coefficient-matching equations for sum_v u_v images[v] = target."""
    rows: dict = {}
    for v, vec in enumerate(images):
        for s, p in enumerate(vec):
            for e, c in p.terms.items():
                rows.setdefault((s, e), {})[v] = c
    rhs = {}
    if target is not None:
        for s, p in enumerate(target):
            for e, c in p.terms.items():
                rows.setdefault((s, e), {})
                rhs[(s, e)] = c
    keys = sorted(rows)
    return [rows[k] for k in keys], [rhs.get(k, 0) for k in keys]


def solve_images(images: list, target: list, want_kernel: bool = False):
    """Rational u with sum_v u_v images[v] = target; (solution list | None, kernel list)."""
    eqs, rhs = _system(images, target)
    sol, kernel = solve_sparse(eqs, rhs, len(images), want_kernel)
    if sol is None:
        return None, []
    vec = [sol.get(v, Fraction(0)) for v in range(len(images))]
    kern = [[k.get(v, Fraction(0)) for v in range(len(images))] for k in kernel]
    return vec, kern


def _monomial_images(chart: Chart, columns: Sequence, cap: int):
    monos = monomials_upto(chart.dim, cap)
    images = []
    labels = []
    for j, col in enumerate(columns):
        for e in monos:
            m = Poly.monomial(chart, e)
            images.append([p * m for p in col])
            labels.append((j, e))
    return images, labels


def _assemble(chart, ncols, labels, vec):
    out = [Poly(chart) for _ in range(ncols)]
    for (j, e), u in zip(labels, vec):
        if u:
            out[j] = out[j] + Poly.monomial(chart, e, u)
    return out


def solve_combination(columns: Sequence, target: Sequence, cap: int, chart: Chart):
    """Polynomials c_j of degree <= cap with sum_j c_j columns[j] = target, or None.

    Tries caps 0, 1, ..., cap in turn so the returned solution has minimal degree.
    """
    if not columns:
        return [] if all(p.is_zero() for p in target) else None
    for k in range(cap + 1):
        images, labels = _monomial_images(chart, columns, k)
        vec, _ = solve_images(images, list(target))
        if vec is not None:
            return _assemble(chart, len(columns), labels, vec)
    return None


def kernel_combinations(columns: Sequence, cap: int, chart: Chart) -> list[list[Poly]]:
    """Q-basis of {c : sum_j c_j columns[j] = 0, deg c_j <= cap}."""
    if not columns:
        return []
    images, labels = _monomial_images(chart, columns, cap)
    m = len(columns[0])
    vec, kern = solve_images(images, [Poly(chart) for _ in range(m)], want_kernel=True)
    return [_assemble(chart, len(columns), labels, k) for k in kern]


# ---------------------------------------------------------------------------
# pointwise helpers


def evaluate_vectors(vectors: Sequence, point) -> list[list[Fraction]]:
    return [[p.evaluate(point) for p in v] for v in vectors]


def span_at(vectors: Sequence, point, ambient: int) -> Subspace:
    return Subspace.span(evaluate_vectors(vectors, point), ambient)


def rank_at(vectors: Sequence, point, ambient: int) -> int:
    return span_at(vectors, point, ambient).dim


def random_points(chart: Chart, count: int, seed: int = 0) -> list[list[Fraction]]:
    """Deterministic pseudo-random rational points."""
    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        pts.append([Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(chart.dim)])
    return pts


def generic_point(chart: Chart, vectors: Sequence = (), expected_rank: int | None = None,
                  override=None) -> list[Fraction]:
    """All-ones unless that point drops the rank of ``vectors``; then a fixed fallback list."""
    if override is not None:
        pt = [Fraction(x) for x in override]
        if len(pt) != chart.dim:
            raise ValueError(f"generic point needs {chart.dim} coordinates")
        return pt
    n = chart.dim
    candidates = [[Fraction(1)] * n]
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
    for shift in range(4):
        candidates.append([Fraction(primes[(i + shift) % len(primes)] + shift) for i in range(n)])
    candidates.extend(random_points(chart, 4, seed=12345))
    if not vectors or expected_rank is None:
        return candidates[0]
    ambient = len(vectors[0])
    for pt in candidates:
        if rank_at(vectors, pt, ambient) >= expected_rank:
            return pt
    return candidates[0]


def restrict_to(vectors: Sequence, point, ambient: int) -> list[int]:
    """Indices of a greedy subset of ``vectors`` that is linearly independent at ``point``."""
    chosen = []
    current = Subspace.zero(ambient)
    for i, v in enumerate(evaluate_vectors(vectors, point)):
        nxt = current + Subspace.span([v], ambient)
        if nxt.dim > current.dim:
            chosen.append(i)
            current = nxt
    return chosen
