import itertools
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from courant_kit.algebroid import BialgebroidSpec, lie_algebra
from courant_kit.bialgebra import (
    LieBialgebra,
    SubalgebraCandidate,
    ad_invariance,
    build_double,
    compatibility_report,
    g_part,
    gstar_part,
    is_dirac_subalgebra,
    jacobi_report,
    r_graph,
    regularity_report,
    search_dirac_graphs,
)
from courant_kit.courant import Double
from courant_kit.exact import RatMatrix, Subspace

AFFINE = [(0, 1, 1, 1)]
SL2_C = [(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)]
SL2_F = [(0, 1, 1, -1), (0, 2, 2, -1)]
HEIS = [(0, 1, 2, 1)]
THREE_DIM = [[], HEIS, SL2_C, [(0, 1, 1, 1), (0, 2, 2, 1)], [(0, 1, 1, 1), (0, 2, 1, 1), (0, 2, 2, 1)]]


# independent oracles ------------------------------------------------------


def manin_bracket(c, f, u, v):
    """Double bracket written straight from <ad*_X xi, Y> = -<xi, [X, Y]>."""
    n = len(c)
    X, xi, Y, eta = u[:n], u[n:], v[:n], v[n:]

    def br(t, a, b):
        return [sum(t[i][j][k] * a[i] * b[j] for i in range(n) for j in range(n)) for k in range(n)]

    def coad_g(X, eta):
        return [-sum(eta[k] * X[i] * c[i][j][k] for i in range(n) for k in range(n)) for j in range(n)]

    def coad_gs(xi, Y):
        return [-sum(Y[k] * xi[i] * f[i][j][k] for i in range(n) for k in range(n)) for j in range(n)]

    gpart = [a + b - e for a, b, e in zip(br(c, X, Y), coad_gs(xi, Y), coad_gs(eta, X))]
    spart = [a + b - e for a, b, e in zip(br(f, xi, eta), coad_g(X, eta), coad_g(Y, xi))]
    return gpart + spart


def cocycle_ok(b: LieBialgebra) -> bool:
    """delta[x, y] = ad_x delta y - ad_y delta x, with delta(e_k) the skew matrix f[.][.][k]."""
    n, c, f = b.dim, b.c, b.f

    def delta(k):
        return [[f[i][j][k] for j in range(n)] for i in range(n)]

    def ad(x, M):
        return [[sum(c[x][i][a] * M[i][bb] for i in range(n)) + sum(M[a][j] * c[x][j][bb] for j in range(n))
                 for bb in range(n)] for a in range(n)]

    for x, y in itertools.combinations(range(n), 2):
        lhs = [[sum(c[x][y][k] * delta(k)[a][bb] for k in range(n)) for bb in range(n)] for a in range(n)]
        r1, r2 = ad(x, delta(y)), ad(y, delta(x))
        if any(lhs[a][bb] != r1[a][bb] - r2[a][bb] for a in range(n) for bb in range(n)):
            return False
    return True


def units(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


# the double ---------------------------------------------------------------


def test_abelian_double():
    d = build_double(LieBialgebra.from_triples(2))
    assert all(not v for row in d.table for col in row for v in col)
    assert compatibility_report(LieBialgebra.from_triples(2)).passed


def test_compatible_plane_pair():
    b = LieBialgebra.from_triples(2, AFFINE, [(0, 1, 1, 1)])
    rep = compatibility_report(b)
    assert rep.passed
    assert len(rep.by_name("JACOBI")) == 4
    assert len(rep.by_name("INVARIANT")) == 64
    assert cocycle_ok(b)


def test_every_cobracket_on_the_plane_is_compatible():
    # on a 2-dim g, ad_x acts on the line of bivectors by tr(ad_x), so the cocycle condition is automatic
    for a, bb in itertools.product(range(-2, 3), repeat=2):
        b = LieBialgebra.from_triples(2, AFFINE, [(0, 1, 0, a), (0, 1, 1, bb)])
        assert cocycle_ok(b)
        assert compatibility_report(b).passed


def test_sl2_standard_structure_is_compatible():
    b = LieBialgebra.from_triples(3, SL2_C, SL2_F, names=("H", "E", "F"))
    assert cocycle_ok(b)
    rep = compatibility_report(b)
    assert rep.passed
    assert rep.checks[0].line() == "JACOBI H,E,F PASS"


def test_incompatible_three_dim_pair():
    b = LieBialgebra.from_triples(3, SL2_C, [(0, 1, 0, 1)])
    assert not cocycle_ok(b)
    rep = compatibility_report(b)
    assert not rep.passed
    assert "JACOBI e1,e3,e2* FAIL residual=(0, 0, -2, 0, 0, 0)" in rep.lines()
    assert not build_double(b).is_lie()
    assert not compatibility_report(LieBialgebra.from_triples(3, HEIS, [(0, 1, 0, 1)])).passed
    assert compatibility_report(LieBialgebra.from_triples(3, HEIS, [(0, 2, 0, 1)])).passed


def test_invalid_structure_constants():
    with pytest.raises(ValueError):
        LieBialgebra.from_triples(3, [(0, 1, 1, 1), (1, 2, 0, 1), (0, 2, 2, 5)])
    with pytest.raises(ValueError):
        LieBialgebra.from_triples(2, [(0, 0, 1, 1)])
    with pytest.raises(ValueError):
        LieBialgebra.from_triples(2, [(0, 1, 1, 1), (1, 0, 1, 1)])
    with pytest.raises(ValueError):
        LieBialgebra.from_triples(2, [(0, 2, 1, 1)])


@pytest.mark.parametrize("c, f", [(AFFINE, [(0, 1, 1, 1)]), (SL2_C, SL2_F), (HEIS, [(0, 2, 0, 1)]),
                                  (SL2_C, [(0, 1, 0, 1)])])
def test_double_matches_direct_formula(c, f):
    n = 2 if c is AFFINE else 3
    b = LieBialgebra.from_triples(n, c, f)
    d = build_double(b)
    for u, v in itertools.product(units(2 * n), repeat=2):
        assert d.bracket(u, v) == manin_bracket(b.c, b.f, u, v)


@pytest.mark.parametrize("c, f", [(AFFINE, [(0, 1, 1, 1)]), (SL2_C, SL2_F), (HEIS, [(0, 2, 0, 1)])])
def test_double_matches_point_courant_bracket(c, f):
    n = 2 if c is AFFINE else 3
    b = LieBialgebra.from_triples(n, c, f)

    def spec(t):
        return lie_algebra(n, {(i, j): list(t[i][j]) for i in range(n) for j in range(i + 1, n) if any(t[i][j])})

    D = Double(BialgebroidSpec(spec(b.c), spec(b.f)))
    d = build_double(b)
    frame = D.frame()
    for i, j in itertools.product(range(2 * n), repeat=2):
        got = D.bracket(frame[i], frame[j]).evaluate([])
        assert got == d.bracket(d.unit(i), d.unit(j))


def test_double_restricts_to_both_factors():
    b = LieBialgebra.from_triples(3, SL2_C, SL2_F)
    d = build_double(b)
    n = 3
    for i, j in itertools.product(range(n), repeat=2):
        assert d.bracket(d.unit(i), d.unit(j)) == list(b.c[i][j]) + [0] * n
        assert d.bracket(d.unit(n + i), d.unit(n + j)) == [0] * n + list(b.f[i][j])


small = st.integers(-1, 1)


@given(st.sampled_from(range(len(THREE_DIM))), st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2),
                                                                   st.integers(0, 2), small), max_size=3))
def test_jacobi_of_double_iff_cocycle(k, f):
    f = [(i, j, kk, v) for i, j, kk, v in f if i < j]
    assume(len({(i, j, kk) for i, j, kk, _ in f}) == len(f))
    try:
        b = LieBialgebra.from_triples(3, THREE_DIM[k], f)
    except ValueError:
        assume(False)
    d = build_double(b)
    assert d.is_lie() == cocycle_ok(b)
    assert d.invariance_report().passed


# Dirac subalgebras --------------------------------------------------------

PLANE = build_double(LieBialgebra.from_triples(2, AFFINE, [(0, 1, 1, 1)]))
SL2 = build_double(LieBialgebra.from_triples(3, SL2_C, SL2_F))


def test_factors_are_dirac_subalgebras():
    for d in (PLANE, SL2):
        assert is_dirac_subalgebra(d, g_part(d))
        assert is_dirac_subalgebra(d, gstar_part(d))


def test_mixed_candidate():
    # by hand: [e2, e^1] = e2, and (e2, e^1) = 0
    L = SubalgebraCandidate(Subspace.span([[0, 1, 0, 0], [0, 0, 1, 0]], 4), "mixed")
    assert is_dirac_subalgebra(PLANE, L)
    assert str(L).startswith("mixed = ")


def test_non_isotropic_candidate():
    v = is_dirac_subalgebra(PLANE, Subspace.span([[1, 0, 0, 0], [0, 0, 1, 0]], 4))
    assert not v and v.witness == "(b0,b1)_+ = 1/2"
    assert not is_dirac_subalgebra(PLANE, Subspace.span([[1, 0, 0, 0]], 4))
    with pytest.raises(ValueError):
        is_dirac_subalgebra(PLANE, Subspace.span([[1, 0, 0]], 3))


def test_coordinate_lagrangians_against_direct_closure():
    b = LieBialgebra.from_triples(3, SL2_C, SL2_F)
    failing = []
    for S in itertools.product((0, 1), repeat=3):
        rows = [[int(k == (i if S[i] else 3 + i)) for k in range(6)] for i in range(3)]
        L = Subspace.span(rows, 6)
        closed = all(L.contains(manin_bracket(b.c, b.f, u, v))
                     for u, v in itertools.combinations(L.vectors(), 2))
        v = is_dirac_subalgebra(SL2, L)
        assert bool(v) == closed
        if not v:
            failing.append(S)
    # span{H*, E, F} is the only one that fails: [E, F] = H
    assert failing == [(0, 1, 1)]


def test_regularity():
    r = regularity_report(PLANE, g_part(PLANE))
    assert r.dim_h == 2 and r.report.passed
    r = regularity_report(PLANE, gstar_part(PLANE))
    assert r.dim_h == 0
    mixed = Subspace.span([[0, 1, 0, 0], [0, 0, 1, 0]], 4)
    r = regularity_report(PLANE, mixed)
    assert r.h == Subspace.span([[0, 1, 0, 0]], 4)
    assert r.report.passed
    assert "NOTE closedness of the subgroup integrating h is not decided" in r.report.lines()
    g = r_graph(SL2, {(0, 1): 1})
    assert regularity_report(SL2, g).dim_h == 0


def test_ad_invariance():
    mixed = Subspace.span([[0, 1, 0, 0], [0, 0, 1, 0]], 4)
    assert ad_invariance(PLANE, mixed)
    assert ad_invariance(PLANE, g_part(PLANE))
    assert ad_invariance(PLANE, mixed, [RatMatrix.identity(4)])
    swap = [[0] * 4 for _ in range(4)]
    swap[0][2] = 1
    v = ad_invariance(PLANE, gstar_part(PLANE), [swap])
    assert not v and v.witness.startswith("generator 0 sends (0, 0, 1, 0)")
    with pytest.raises(ValueError):
        ad_invariance(PLANE, mixed, [[[1, 0], [0, 1]]])


def test_search_on_abelian_double():
    d = build_double(LieBialgebra.from_triples(3))
    found = search_dirac_graphs(d, [-1, 0, 1])
    assert len(found) == 27
    assert [c.label for c in found[:2]] == ["graph(-1,-1,-1)", "graph(-1,-1,0)"]


def test_search_zero_grid():
    found = search_dirac_graphs(SL2, [0])
    assert [c.label for c in found] == ["graph(0,0,0)"]
    assert found[0].space == gstar_part(SL2).space


def test_search_results_reverify():
    for d, count in ((PLANE, 3), (SL2, 5)):
        found = search_dirac_graphs(d, [-1, 0, 1])
        assert len(found) == count
        for cand in found:
            assert is_dirac_subalgebra(d, cand)
        keys = [c.r for c in found]
        assert keys == sorted(keys)


def test_search_size_guard():
    with pytest.raises(ValueError):
        search_dirac_graphs(SL2, range(10), limit=100)


def test_jacobi_report_names():
    b = LieBialgebra.from_triples(3, HEIS)
    rep = jacobi_report(b.c, b.names)
    assert [c.inputs for c in rep.checks] == ["e1,e2,e3"]
