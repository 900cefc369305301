import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from tanfamily.lattice import pole, zero
from tanfamily.mapcore import (
    INF,
    Fate,
    Parameter,
    PoleError,
    as_lambda,
    derivative,
    derivative_array,
    evaluate,
    evaluate_array,
    is_infinite,
    iterate,
    modulus,
    orbit_derivative,
)
from tanfamily.inverse import pre_pole

coord = st.floats(-2.0, 2.0, allow_nan=False)
points = st.builds(complex, coord, coord)
lams = st.builds(complex, coord, coord).filter(lambda c: abs(c) > 1e-3)

# high-precision values of lam*tan(z^2) and 2*lam*z*sec^2(z^2), 40 digits
ORACLE = [
    (0.85, -1.3 + 0.2j, -0.2220460219778896386 - 1.742466506791959364j,
     6.562205920788453914 - 3.432558081333082527j),
    (0.3 + 0.4j, 0.7 - 1.1j, 0.3666451662035392295 - 0.3311502554600989448j,
     0.06941964656843547236 + 0.2259371281610012128j),
    (-0.7 + 0.5j, 2.1 + 0.3j, -0.6457027125612592065 - 0.7154364750313804850j,
     0.2449412916368229854 - 1.292909756978869042j),
]


def test_parameter_rejects_zero():
    with pytest.raises(ValueError):
        Parameter(0)
    with pytest.raises(ValueError):
        as_lambda(complex(math.inf, 0))


def test_asymptotic_values():
    p = Parameter(0.3 + 0.4j)
    # +-lam*i
    assert p.asymptotic_values == (complex(-0.4, 0.3), complex(0.4, -0.3))
    assert p.critical_value == 0


@pytest.mark.parametrize("lam,z,value,deriv", ORACLE)
def test_against_high_precision(lam, z, value, deriv):
    assert abs(evaluate(lam, z) - value) < 1e-13 * abs(value)
    assert abs(derivative(lam, z) - deriv) < 1e-13 * abs(deriv)


def test_fixed_point_and_zeros():
    assert evaluate(0.85, 0) == 0
    for n in range(-6, 7):
        assert abs(evaluate(0.85, zero(n))) < 1e-13 * (1 + abs(n))


def test_derivative_closed_form_at_one():
    assert derivative(0.85, 1) == pytest.approx(5.823381995385091594, rel=1e-14)
    assert derivative(0.85, 1) == pytest.approx(1.7 / math.cos(1) ** 2, rel=1e-14)
    assert derivative(2 - 1j, 0) == 0


def test_near_pole_is_infinite_or_huge():
    s0 = math.sqrt(math.pi / 2)
    for dz in (0.0, 1e-9, -3e-8, 9e-8):
        w = evaluate(0.85, s0 + dz)
        assert is_infinite(w) or abs(w) > 1e6


@pytest.mark.parametrize("n", range(-5, 6))
def test_poles(n):
    assert is_infinite(evaluate(1.0, pole(n)))
    with pytest.raises(PoleError):
        derivative(1.0, pole(n))


def test_evaluate_rejects_infinity():
    with pytest.raises(ValueError):
        evaluate(1.0, INF)


@given(lams, points)
def test_even_bit_identical(lam, z):
    assume(not is_infinite(evaluate(lam, z)))
    assert evaluate(lam, -z) == evaluate(lam, z)


@given(lams, points)
def test_negation_exact(lam, z):
    w = evaluate(lam, z)
    assume(not is_infinite(w))
    assert evaluate(-lam, z) == -w


@given(lams, points)
def test_conjugation(lam, z):
    w = evaluate(lam, z)
    assume(not is_infinite(w))
    c = evaluate(lam.conjugate(), z.conjugate())
    assert abs(c - w.conjugate()) <= 1e-12 * abs(w)


@given(lams, points)
def test_rotation_first_step(lam, z):
    w = evaluate(lam, z)
    assume(not is_infinite(w))
    assert abs(evaluate(1j * lam, z) - 1j * w) <= 1e-12 * abs(w)


def test_rotation_later_steps_use_minus_i():
    # f_{i lam}^k = -i f_lam^k for k >= 2
    lam, z = 0.6 + 0.2j, 0.9 - 0.4j
    a = iterate(lam, z, 5, 0.0).points
    b = iterate(1j * lam, z, 5, 0.0).points
    assert abs(b[1] - 1j * a[1]) < 1e-14
    for k in range(2, 6):
        assert abs(b[k] + 1j * a[k]) < 1e-12 * max(1, abs(a[k]))


@given(lams, points)
def test_array_matches_scalar(lam, z):
    w = evaluate(lam, z)
    wa = complex(evaluate_array(lam, np.array([z]))[0])
    if is_infinite(w):
        assert is_infinite(wa)
    else:
        assert wa == w


@given(lams, points)
def test_derivative_finite_difference(lam, z):
    assume(abs(cmath.cos(z * z)) > 1e-2)
    h = 1e-6
    d = derivative(lam, z)
    fp, fm = evaluate(lam, z + h), evaluate(lam, z - h)
    # central differences carry roundoff ~ eps*|f|/h
    assume(abs(d) > 1e-3 * max(abs(fp), abs(fm)))
    fd = (fp - fm) / (2 * h)
    assert abs(d - fd) <= 1e-5 * abs(d)


def test_derivative_array_nan_at_pole():
    d = derivative_array(1.0, np.array([pole(0), 1.0]))
    assert np.isnan(d[0]) and d[1] == derivative(1.0, 1.0)


def test_large_imaginary_part_is_finite():
    # z^2 with imaginary part 50: tan -> i
    z = cmath.sqrt(1 + 50j)
    assert abs(evaluate(0.85, z) - 0.85j) < 1e-12
    assert abs(derivative(0.85, z)) < 1e-30


def test_modulus_matches_definition():
    z = np.array([3 + 4j, -1e-200 + 0j, 1e150 + 1e150j])
    m = modulus(z)
    assert m[0] == 5.0
    assert np.all(np.isfinite(m[:2]))


def test_orbit_derivative_chain_rule():
    lam, z = 0.85, 0.9 + 0.3j
    w = evaluate(lam, z)
    assert orbit_derivative(lam, z, 2) == pytest.approx(derivative(lam, z) * derivative(lam, w), rel=1e-14)


class TestIterate:
    def test_origin_fixed(self):
        orb = iterate(0.85, 0, 50)
        assert orb.fate is Fate.CONVERGED
        assert np.all(orb.points == 0)
        assert len(orb.points) == orb.steps_used + 1

    def test_budget(self):
        orb = iterate(0.85, 1.0 + 0.3j, 7, convergence_tol=0.0)
        assert orb.fate in (Fate.BUDGET_EXHAUSTED, Fate.HIT_POLE)
        assert len(orb.points) == orb.steps_used + 1

    def test_rejects_bad_budget(self):
        with pytest.raises(ValueError):
            iterate(0.85, 1, 0)

    @pytest.mark.parametrize("key", [(0,), (1,), (-2,), (0, 1), (1, -1, 2), (2, 0, -1, 1), (0, 0, 1, -2, 1)])
    def test_pre_pole_hits_pole_on_schedule(self, key):
        z = pre_pole(0.85, key)
        orb = iterate(0.85, z, 20, 0.0)
        assert orb.fate is Fate.HIT_POLE
        assert orb.stop_step == len(key)
        assert is_infinite(orb.points[-1])
        assert len(orb.points) == orb.steps_used + 1

    def test_overflow(self):
        # lam huge: one step overflows
        orb = iterate(1e16, 1.0, 5)
        assert orb.fate is Fate.OVERFLOWED and orb.stop_step == 1
