import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from tanfamily.inverse import (
    AsymptoticValueExcluded,
    InverseBranchError,
    arctangent_components,
    composed_inverse,
    inverse_branch,
    inverse_branch_array,
    pre_pole,
    preimage_chain,
    principal_arctangent,
)
from tanfamily.lattice import pole, region_of
from tanfamily.mapcore import INF, Fate, evaluate, iterate

coord = st.floats(-3.0, 3.0, allow_nan=False)
targets = st.builds(complex, coord, coord)
branches = st.integers(-4, 4)
LAM = 0.85


def test_zero_in_l0_is_sqrt_pi():
    assert inverse_branch(LAM, 0, 0) == pytest.approx(math.sqrt(math.pi), abs=1e-15)


def test_high_precision_preimage():
    # w = arctan(z/lam) + pi, z = sqrt(w), 40-digit reference
    w = inverse_branch(LAM, 0, 0.5 + 0.5j)
    assert abs(w - (1.952192957952527703 + 0.1098939683573770981j)) < 1e-14


@pytest.mark.parametrize("n", range(-2, 3))
def test_infinity_maps_to_pole(n):
    assert inverse_branch(LAM, n, INF) == pole(n)


@pytest.mark.parametrize("sign", [1, -1])
def test_asymptotic_values_excluded(sign):
    with pytest.raises(AsymptoticValueExcluded):
        inverse_branch(LAM, 0, sign * 1j * LAM)


@given(targets, branches)
def test_round_trip_and_landing(z, n):
    assume(min(abs(z - 1j * LAM), abs(z + 1j * LAM)) > 1e-6)
    w = inverse_branch(LAM, n, z)
    assert region_of(w) == n
    # near z = 0 the relative error is ill-conditioned; evaluating tan at
    # |w^2| ~ pi has an absolute rounding floor of a few ulps
    assert abs(evaluate(LAM, w) - z) <= 1e-9 * abs(z) + 64 * np.finfo(float).eps * abs(w) ** 2


@given(targets)
def test_distinct_branches_distinct_preimages(z):
    assume(min(abs(z - 1j * LAM), abs(z + 1j * LAM)) > 1e-6)
    ws = [inverse_branch(LAM, n, z) for n in range(-4, 5)]
    for a, b in itertools.combinations(ws, 2):
        assert abs(a - b) > 1e-6


def test_array_matches_scalar(rng):
    z = rng.uniform(-3, 3, (200, 2)) @ np.array([1, 1j])
    for n in (-3, 0, 2):
        arr = inverse_branch_array(LAM, n, z)
        assert all(arr[i] == inverse_branch(LAM, n, complex(z[i])) for i in range(len(z)))


@pytest.mark.parametrize("z", [0.3 + 0.2j, -1.1 + 2.0j, 2.5 - 0.7j, -0.4 - 0.9j])
@pytest.mark.parametrize("lam", [0.85, 0.3 + 0.4j, -1.1 + 0.2j])
def test_component_formulas_agree_with_logarithm(lam, z):
    a = complex(principal_arctangent(lam, z))
    re, im = arctangent_components(lam, z)
    assert re == pytest.approx(a.real, abs=1e-12)
    assert im == pytest.approx(a.imag, abs=1e-12)


def test_single_key_is_inverse_branch():
    assert composed_inverse(LAM, [3], 0.2 - 0.1j) == inverse_branch(LAM, 3, 0.2 - 0.1j)


def test_composition_order_and_stages():
    key = (1, -2, 0)
    chain = preimage_chain(LAM, key, 0.4 + 0.1j)
    # stage j lies in the region of the j-th applied branch
    assert [region_of(c) for c in chain[1:]] == list(key)
    assert chain[-1] == composed_inverse(LAM, key, 0.4 + 0.1j)
    pts = iterate(LAM, chain[-1], 3, 0.0).points
    assert abs(pts[3] - (0.4 + 0.1j)) < 1e-7
    # forward itinerary reads the key backwards
    assert [region_of(complex(p)) for p in pts[:3]] == list(reversed(key))


def test_empty_key_rejected():
    with pytest.raises(ValueError):
        composed_inverse(LAM, [], 0.1)


def test_stage_index_reported():
    # the very first stage meets an omitted value
    with pytest.raises(InverseBranchError) as info:
        composed_inverse(LAM, [0, 1], 1j * LAM)
    assert info.value.stage == 0


@pytest.mark.parametrize("depth", range(1, 6))
def test_pre_poles_hit_pole_exactly_at_depth(depth):
    for key in itertools.product(range(-1, 2), repeat=depth):
        orb = iterate(LAM, pre_pole(LAM, key), depth + 3, 0.0)
        assert orb.fate is Fate.HIT_POLE
        assert orb.stop_step == depth


def test_nested_images(rng):
    # image of a probe circle under longer keys sits inside the hull of shorter ones
    circle = 3.0 * np.exp(2j * np.pi * np.arange(64) / 64)
    key = [int(v) for v in rng.integers(-2, 3, 8)]
    prev = None
    for k in range(1, len(key) + 1):
        img = composed_inverse(LAM, key[:k][::-1], circle)
        diam = np.max(np.abs(img[:, None] - img[None, :]))
        if prev is not None:
            assert diam < prev
        prev = diam
