from fractions import Fraction

from hypothesis import given, strategies as st

from courant_kit.algebroid import BialgebroidSpec, lie_algebra, poisson_bialgebroid
from courant_kit.courant import (
    Double,
    anomaly_T,
    base_poisson,
    courant_bracket,
    d_script,
    default_samples,
    pairing,
    rho,
    verify_courant_axioms,
)
from courant_kit.poly import Chart, MultiVector, Poly, d

from test_poly import polys

XY = Chart(("x", "y"))
x, y = XY.coords()
C2 = Chart.standard(2)
x1, x2 = C2.coords()


def zero_double(chart=XY):
    return Double(poisson_bialgebroid(MultiVector(chart, 2, {})))


def test_pairing_examples():
    D = zero_double()
    e = D.section([x, 1], [y, 2])
    assert pairing(e, e, 1) == x * y + 2
    assert pairing(e, e, -1).is_zero()
    assert pairing(D.a_frame(0), D.astar_frame(0)) == Fraction(1, 2)


def test_rho_examples():
    D = zero_double()
    assert rho(D.a_frame(0)) == MultiVector.vector(XY, [1, 0])
    lin = Double(poisson_bialgebroid(MultiVector(C2, 2, {(0, 1): x1})))
    assert rho(lin.astar_frame(0)) == MultiVector.vector(C2, [0, x1])
    point = Double(BialgebroidSpec(lie_algebra(2, {(0, 1): [0, 1]}), lie_algebra(2, {})))
    assert rho(point.section([1, 1], [1, 0])).is_zero()


def test_d_script_examples():
    D = zero_double()
    assert d_script(D, XY.const(5)).is_zero()
    f = x * x * y
    df = d_script(D, f)
    assert df.a.is_zero() and df.astar.as_list() == d(f).as_list()


def test_bracket_reduces_to_lie_derivative():
    D = zero_double()
    e1 = D.a_frame(0)
    e2 = D.section(astar=[0, x])
    assert courant_bracket(e1, e2) == D.astar_frame(1)


def test_bracket_antisymmetric_on_diagonal():
    D = Double(poisson_bialgebroid(MultiVector(C2, 2, {(0, 1): x1})))
    e = D.section([x1, x2 * x2], [1, x1])
    assert courant_bracket(e, e).is_zero()


def test_anomaly_examples():
    D = zero_double()
    assert anomaly_T(D.a_frame(0), D.section([y, x]), D.a_frame(1)).is_zero()
    # by hand: [dx, x dy] = dy, [x dy, dy] = dx/2, [dy, dx] = 0 so T = (1/2 + 1/4)/3
    T = anomaly_T(D.a_frame(0), D.section(astar=[0, x]), D.a_frame(1))
    assert T == Fraction(1, 4)


def test_base_poisson_examples():
    b = poisson_bialgebroid(MultiVector(C2, 2, {(0, 1): x1}))
    assert base_poisson(b, x1, x2) == x1
    assert base_poisson(b, x1 * x2, x1 * x2).is_zero()
    point = BialgebroidSpec(lie_algebra(2, {(0, 1): [0, 1]}), lie_algebra(2, {}))
    c = point.chart
    assert base_poisson(point, c.const(3), c.const(4)).is_zero()


def test_axioms_pass_on_linear_poisson():
    rep = verify_courant_axioms(poisson_bialgebroid(MultiVector(C2, 2, {(0, 1): x1})))
    assert rep.passed
    names = {c.name for c in rep.checks}
    assert names == {"AXIOM(i)", "AXIOM(ii)", "AXIOM(iii)", "AXIOM(iv)", "AXIOM(v)"}
    assert rep.render().splitlines()[0].endswith("PASS")


def test_axioms_pass_on_zero_poisson():
    assert verify_courant_axioms(poisson_bialgebroid(MultiVector(XY, 2, {}))).passed


class FlippedDouble(Double):
    _dminus_sign = -1


def test_mutation_breaks_an_axiom():
    b = poisson_bialgebroid(MultiVector(C2, 2, {(0, 1): x1}))
    rep = verify_courant_axioms(FlippedDouble(b))
    assert not rep.passed
    failed = {c.name for c in rep.failures}
    assert failed & {"AXIOM(i)", "AXIOM(iii)"}
    assert "residual=" in rep.failures[0].line()


def test_samples_family_recorded():
    D = zero_double()
    fam = default_samples(D)
    assert len(fam) == 4 + 2 * 4
    rep = verify_courant_axioms(D, samples=fam[:4])
    assert rep.notes[0] == "family: d/dx, d/dy, dx, dy"


# ---------------------------------------------------------------------------
# properties

LIN = Double(poisson_bialgebroid(MultiVector(C2, 2, {(0, 1): x1})))


@st.composite
def sections(draw, double=LIN):
    cs = [draw(polys(C2, 2)) for _ in range(4)]
    return double.section(cs[:2], cs[2:])


@given(sections(), sections())
def test_bracket_antisymmetry(e1, e2):
    assert courant_bracket(e1, e2) == -courant_bracket(e2, e1)


@given(sections(), sections(), sections())
def test_jacobi_up_to_anomaly(e1, e2, e3):
    br = courant_bracket
    jac = br(br(e1, e2), e3) + br(br(e2, e3), e1) + br(br(e3, e1), e2)
    assert jac == d_script(LIN, anomaly_T(e1, e2, e3))


@given(polys(C2, 2), polys(C2, 2))
def test_exact_forms_bracket_to_exact_form(f, g):
    e1 = LIN.from_parts(astar=LIN.b.d(f))
    e2 = LIN.from_parts(astar=LIN.b.d(g))
    assert courant_bracket(e1, e2).astar == LIN.b.d(LIN.base_poisson(f, g))
