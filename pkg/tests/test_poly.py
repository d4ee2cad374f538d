import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from courant_kit.poly import (
    Chart,
    ChartMismatch,
    DiffForm,
    MultiVector,
    Poly,
    d,
    de_rham,
    format_exterior,
    format_poly,
    interior,
    is_poisson,
    jacobi_components,
    lie_derivative,
    parse_exterior,
    parse_poly,
    schouten,
)

XY = Chart(("x", "y"))
x, y = XY.coords()
C3 = Chart.standard(3)
C4 = Chart.standard(4)


def vf(chart, *coeffs):
    return MultiVector.vector(chart, list(coeffs))


def test_poly_arithmetic_and_order():
    p = (x + y) ** 2
    assert p == x * x + 2 * x * y + y * y
    assert format_poly(Fraction(3, 2) * x * y - y + 1) == "3/2 x y - y + 1"
    assert p.diff(0) == 2 * x + 2 * y
    assert p.evaluate([1, 2]) == 9
    assert (x * y).compose([y, x]) == x * y


def test_chart_mismatch():
    with pytest.raises(ChartMismatch):
        x + C3.coord(0)


def test_schouten_constant_frame_commutes():
    assert schouten(vf(XY, 1, 0), vf(XY, 0, 1)).is_zero()


def test_schouten_vector_fields_is_lie_bracket():
    X, Y = vf(XY, 0, x), vf(XY, y, 0)
    got = schouten(X, Y)
    # hand oracle: [X,Y] f = X(Y f) - Y(X f), read off on the coordinates
    expected = [X.apply(Y.apply(c)) - Y.apply(X.apply(c)) for c in (x, y)]
    assert got.as_list() == expected
    assert got == vf(XY, x, -y)


def test_schouten_with_function_is_derivative():
    X = vf(XY, y, x * x)
    f = x ** 2 * y
    assert schouten(X, MultiVector.function(f)) == MultiVector.function(X.apply(f))


def _jacobiator(pi, i, j, k):
    """sum_l pi^{il} d_l pi^{jk} + cyclic, from the component formula."""
    n = pi.chart.dim

    def c(a, b):
        return pi.coeff((a, b)) if a != b else Poly(pi.chart)

    total = Poly(pi.chart)
    for a, b, e in ((i, j, k), (j, k, i), (k, i, j)):
        for l in range(n):
            total = total + c(a, l) * c(b, e).diff(l)
    return total


def test_schouten_of_non_poisson_bivector():
    x1 = C4.coord(0)
    pi = MultiVector(C4, 2, {(0, 1): C4.const(1), (2, 3): x1})
    sq = schouten(pi, pi)
    assert sq == MultiVector(C4, 3, {(1, 2, 3): C4.const(-2)})
    assert _jacobiator(pi, 1, 2, 3) == C4.const(-1)
    assert jacobi_components(pi) == {(1, 2, 3): C4.const(-1)}
    assert not is_poisson(pi)


def test_de_rham_examples():
    assert d(x * y) == DiffForm.covector(XY, [y, x])
    assert de_rham(DiffForm(XY, 1, {(1,): x})) == DiffForm(XY, 2, {(0, 1): XY.const(1)})
    assert de_rham(d(x ** 3 * y)).is_zero()


def test_interior_examples():
    dxdy = DiffForm(XY, 2, {(0, 1): XY.const(1)})
    assert interior(vf(XY, 1, 0), dxdy) == DiffForm.covector(XY, [0, 1])
    dd = MultiVector(XY, 2, {(0, 1): XY.const(1)})
    assert interior(DiffForm.covector(XY, [1, 0]), dd) == vf(XY, 0, 1)
    assert interior(vf(XY, 0, 1), DiffForm.covector(XY, [x, 0])).is_zero()


def test_lie_derivative_examples():
    xdy = DiffForm.covector(XY, [0, x])
    assert lie_derivative(vf(XY, 1, 0), xdy) == DiffForm.covector(XY, [0, 1])
    assert lie_derivative(vf(XY, 1, 0), DiffForm.covector(XY, [0, 1])).is_zero()
    X = vf(XY, x * y, y)
    f = x ** 2 + y
    assert lie_derivative(X, d(f)) == d(X.apply(f))


def test_text_round_trip_examples():
    w = parse_exterior("3/2 x1^2 dx1^dx3", C3)
    assert format_exterior(w) == "3/2 x1^2 dx1^dx3"
    p = parse_exterior("d/dx1^d/dx2", C3)
    assert isinstance(p, MultiVector) and p.degree == 2
    assert parse_exterior(format_exterior(p), C3) == p
    q = parse_exterior("(x1 + 2 x2) dx1 - dx2", C3)
    assert format_exterior(q) == "(x1 + 2 x2) dx1 - dx2"


# ---------------------------------------------------------------------------
# properties

coef = st.integers(min_value=-2, max_value=2)


@st.composite
def polys(draw, chart=C3, max_deg=2):
    mons = [e for e in itertools.product(range(max_deg + 1), repeat=chart.dim) if sum(e) <= max_deg]
    picks = draw(st.lists(st.sampled_from(mons), max_size=3))
    p = Poly(chart)
    for e in picks:
        p = p + Poly.monomial(chart, e, draw(coef))
    return p


@st.composite
def multivectors(draw, degree, chart=C3, max_deg=2):
    idx = list(itertools.combinations(range(chart.dim), degree))
    chosen = draw(st.lists(st.sampled_from(idx), max_size=2, unique=True))
    return MultiVector(chart, degree, {i: draw(polys(chart, max_deg)) for i in chosen})


@st.composite
def forms(draw, degree, chart=C3):
    idx = list(itertools.combinations(range(chart.dim), degree))
    chosen = draw(st.lists(st.sampled_from(idx), max_size=2, unique=True))
    return DiffForm(chart, degree, {i: draw(polys(chart)) for i in chosen})


@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_schouten_graded_antisymmetry(a, b, data):
    p = data.draw(multivectors(a, max_deg=1))
    q = data.draw(multivectors(b, max_deg=1))
    sign = -1 if ((a - 1) * (b - 1)) % 2 == 0 else 1
    assert schouten(p, q) == schouten(q, p) * sign


@given(st.integers(1, 2), st.integers(1, 2), st.integers(1, 2), st.data())
def test_schouten_graded_jacobi(a, b, c, data):
    p = data.draw(multivectors(a, max_deg=2))
    q = data.draw(multivectors(b, max_deg=2))
    r = data.draw(multivectors(c, max_deg=2))

    def s(u, v):
        return 1 if ((u - 1) * (v - 1)) % 2 == 0 else -1

    total = (schouten(p, schouten(q, r)) * s(a, c) + schouten(q, schouten(r, p)) * s(b, a)
             + schouten(r, schouten(p, q)) * s(c, b))
    assert total.is_zero()


@given(multivectors(2, max_deg=2))
def test_schouten_square_matches_component_formula(pi):
    sq = schouten(pi, pi)
    for i, j, k in itertools.combinations(range(3), 3):
        assert sq.coeff((i, j, k)) == _jacobiator(pi, i, j, k) * 2


@given(st.integers(0, 1), st.data())
def test_d_squared(k, data):
    w = data.draw(forms(k))
    assert de_rham(de_rham(w)).is_zero()


@given(multivectors(1), st.integers(0, 2), st.data())
def test_lie_derivative_commutes_with_d(X, k, data):
    w = data.draw(forms(k))
    assert lie_derivative(X, de_rham(w)) == de_rham(lie_derivative(X, w))


@given(polys())
def test_poly_text_round_trip(p):
    assert parse_poly(format_poly(p), C3) == p


@given(st.integers(1, 3), st.data())
def test_exterior_text_round_trip(k, data):
    w = data.draw(st.one_of(forms(k), multivectors(k)))
    if w.is_zero():
        return
    assert parse_exterior(format_exterior(w), C3) == w
