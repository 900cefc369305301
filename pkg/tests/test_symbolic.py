import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tanfamily.inverse import pre_pole
from tanfamily.lattice import pole
from tanfamily.mapcore import INF, evaluate
from tanfamily.symbolic import (
    TERMINAL,
    BadKappa,
    EmptyWord,
    InadmissibleWord,
    Itinerary,
    LeftSymbolDomain,
    NotCantorRegime,
    SymbolPair,
    cantor_diagnostics,
    conjugacy_holds,
    cylinder_estimate,
    cylinder_points,
    diameter,
    distance_kappa,
    first_difference,
    is_decreasing,
    itinerary_of,
    point_from_itinerary,
    probe_radius,
    sample_word,
    shift,
)

from conftest import FIG2, PERIOD2

INF_SYM = math.inf
pairs = st.tuples(st.integers(-3, 3), st.integers(1, 4))
words = st.lists(pairs, min_size=1, max_size=8).map(Itinerary)
kappas = st.sampled_from([1.5, 2.0, 4.0])


class TestWords:
    def test_terminated_flag(self):
        assert Itinerary([(4, 1), (2, 0), (INF_SYM, 0)]).terminated
        assert not Itinerary([(4, 1), (2, 3)]).terminated

    @pytest.mark.parametrize(
        "bad",
        [[(1, 0), (2, 1)], [(1, 5)], [(INF_SYM, 0), (1, 1)], [(1, 1), (INF_SYM, 0)]],
    )
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            Itinerary(bad)

    def test_shift_examples(self):
        t = Itinerary([(3, 1), (5, 2), (7, 4)])
        assert shift(t) == Itinerary([(5, 2), (7, 4)])
        term = Itinerary([(4, 1), (2, 0), (INF_SYM, 0)])
        assert shift(term) == Itinerary([(2, 0), (INF_SYM, 0)])
        assert shift(term).terminated
        assert shift(shift(t)) == Itinerary([(7, 4)])

    def test_shift_too_short(self):
        with pytest.raises(EmptyWord):
            shift(Itinerary([(1, 1)]))

    def test_symbols_are_pairs(self):
        s = Itinerary([(1, 2)])[0]
        assert isinstance(s, SymbolPair) and s.x == 1 and s.l == 2


class TestMetric:
    def test_examples(self):
        s = Itinerary([(1, 1), (2, 2), (3, 3)])
        assert distance_kappa(s, s) == 0
        assert distance_kappa(s, Itinerary([(0, 1), (2, 2), (3, 3)])) == 1
        assert distance_kappa(s, Itinerary([(1, 1), (2, 2), (4, 3)]), 2) == 0.25
        # a missing symbol counts as a difference
        assert distance_kappa(s, Itinerary([(1, 1), (2, 2)]), 2) == 0.25

    @pytest.mark.parametrize("kappa", [1.0, 0.5, -2])
    def test_bad_kappa(self, kappa):
        s = Itinerary([(1, 1)])
        with pytest.raises(BadKappa):
            distance_kappa(s, s, kappa)

    @given(words, words, kappas)
    def test_symmetric_exact(self, s, t, kappa):
        assert distance_kappa(s, t, kappa) == distance_kappa(t, s, kappa)

    @given(words, words, words, kappas)
    def test_triangle(self, s, t, u, kappa):
        assert distance_kappa(s, t, kappa) <= distance_kappa(s, u, kappa) + distance_kappa(u, t, kappa)

    @given(words, words)
    def test_zero_iff_equal(self, s, t):
        assert (distance_kappa(s, t) == 0) == (s == t)

    @given(words, words, kappas)
    def test_shift_lipschitz(self, s, t, kappa):
        if len(s) > 1 and len(t) > 1:
            d = distance_kappa(s, t, kappa)
            # kappa * kappa**-i may round one ulp below kappa**-(i-1)
            assert distance_kappa(shift(s), shift(t), kappa) <= kappa * d * (1 + 4 * np.finfo(float).eps)

    def test_first_difference(self):
        assert first_difference([1, 2, 3], [1, 2, 3]) is None
        assert first_difference([1, 2], [1, 2, 3]) == 2
        assert first_difference([1, 5], [1, 2, 3]) == 1


class TestItinerary:
    @pytest.mark.parametrize("n", range(-3, 4))
    def test_pole_word(self, n):
        assert itinerary_of(FIG2, pole(n), 4) == Itinerary([(n, 0), (INF_SYM, 0)])

    def test_infinity(self):
        assert itinerary_of(FIG2, INF, 3) == Itinerary([TERMINAL])

    @pytest.mark.parametrize("key", [(0, 1), (-2, 2), (1, 1), (-1, 0)])
    def test_depth_two_pre_pole(self, key):
        # the key lists the branches in the order they are applied, so the
        # forward itinerary reads it backwards
        t = itinerary_of(FIG2, pre_pole(FIG2, key), 5)
        assert t.regions == key[::-1]
        assert t.terminated and len(t) == 3

    def test_central_set_rejected(self):
        with pytest.raises(LeftSymbolDomain) as info:
            itinerary_of(FIG2, 0.1 + 0.1j, 3)
        assert info.value.step == 0

    def test_requires_cantor_regime(self):
        with pytest.raises(NotCantorRegime):
            itinerary_of(PERIOD2, 2.0, 3)

    def test_conjugacy_sampled_pre_poles(self, rng):
        for _ in range(100):
            depth = int(rng.integers(1, 7))
            key = [int(v) for v in rng.integers(-2, 3, depth)]
            z = pre_pole(FIG2, key)
            assert conjugacy_holds(FIG2, z, depth + 1)

    def test_injective_on_pre_poles(self):
        seen = {}
        for depth in range(1, 4):
            for key in itertools.product(range(-2, 3), repeat=depth):
                t = itinerary_of(FIG2, pre_pole(FIG2, key), depth + 1)
                assert t not in seen.values()
                seen[key] = t


class TestInverseCoding:
    def test_pole_word(self):
        assert point_from_itinerary(FIG2, Itinerary([(3, 0), (INF_SYM, 0)])) == pole(3)

    def test_terminated_word_gives_pre_pole(self):
        z = pre_pole(FIG2, (1, -2, 0))
        t = itinerary_of(FIG2, z, 5)
        assert point_from_itinerary(FIG2, t) == z

    def test_wrong_labels_rejected(self):
        z = pre_pole(FIG2, (1, 0))
        t = itinerary_of(FIG2, z, 4)
        s = t.symbols
        flipped = Itinerary([(s[0].x, s[0].l % 4 + 1)] + list(s[1:]))
        with pytest.raises(InadmissibleWord):
            point_from_itinerary(FIG2, flipped)

    def test_empty(self):
        with pytest.raises(ValueError):
            point_from_itinerary(FIG2, Itinerary([]))

    @pytest.mark.parametrize("depth", range(1, 6))
    def test_round_trip(self, depth, rng):
        for _ in range(20):
            w = sample_word(FIG2, depth, rng)
            z = point_from_itinerary(FIG2, w)
            assert itinerary_of(FIG2, z, depth) == w

    def test_cauchy_like(self):
        w = sample_word(FIG2, 12, np.random.default_rng(5))
        p4, p8, p12 = (point_from_itinerary(FIG2, w, d) for d in (4, 8, 12))
        assert abs(p8 - p12) < abs(p4 - p8)

    def test_estimate_bounds_center(self):
        w = sample_word(FIG2, 8, np.random.default_rng(2))
        center, diam = cylinder_estimate(FIG2, w)
        pts = cylinder_points(FIG2, w)
        assert np.max(np.abs(pts - center)) <= diam
        assert diam < 1e-3


class TestCylinders:
    def test_probe_radius_between(self):
        r = probe_radius(FIG2)
        assert FIG2 < r < math.sqrt(math.pi / 2)

    def test_probe_radius_unavailable(self):
        with pytest.raises(ValueError):
            probe_radius(1.3)

    def test_nested_and_shrinking(self):
        w = sample_word(FIG2, 6, np.random.default_rng(9))
        diams = [diameter(cylinder_points(FIG2, w.symbols[:d])) for d in range(1, 7)]
        assert all(b < a for a, b in zip(diams, diams[1:]))

    def test_cylinder_points_return_to_probe_boundary(self):
        # samples are preimages of the boundary of V = {|z| > r}
        w = sample_word(FIG2, 4, np.random.default_rng(4))
        pts = cylinder_points(FIG2, w)
        assert len(pts) > 10
        r = probe_radius(FIG2)
        for z in pts[:: max(1, len(pts) // 20)]:
            for _ in range(4):
                z = evaluate(FIG2, z)
            assert abs(z) >= r * (1 - 1e-6)

    def test_is_decreasing_floor(self):
        assert is_decreasing([1.0, 0.5, 0.1], [0, 0, 0])
        assert not is_decreasing([1.0, 0.5, 0.6], [0, 0, 0])
        assert is_decreasing([1.0, 1e-17, 1e-17], [0, 1e-16, 1e-16])


class TestDiagnostics:
    @pytest.fixture(scope="class")
    @staticmethod
    def report():
        return cantor_diagnostics(FIG2, sample_words=12, depth=10, seed=7)

    def test_monotone(self, report):
        assert report.all_monotone
        assert report.max_final_diameter < 1e-3

    def test_conjugacy(self, report):
        assert report.conjugacy_checked > 0
        assert report.conjugacy_passed == report.conjugacy_checked

    def test_disjoint(self, report):
        assert report.min_separation > 0

    def test_json(self, report):
        d = json.loads(report.to_json())
        assert d["kappa"] == 2.0 and d["depth"] == 10
        assert len(d["words"]) == 12
        assert d["probes"]["circle_points"] == 64

    def test_deterministic(self, report):
        again = cantor_diagnostics(FIG2, sample_words=12, depth=10, seed=7)
        assert again.to_json() == report.to_json()

    def test_bad_kappa(self):
        with pytest.raises(BadKappa):
            cantor_diagnostics(FIG2, 2, 3, kappa=1.0)

    def test_regime(self):
        with pytest.raises(NotCantorRegime):
            cantor_diagnostics(PERIOD2, 2, 3)


def test_forward_image_of_pole_word_shifts():
    z = pre_pole(FIG2, (2, -1))
    assert itinerary_of(FIG2, evaluate(FIG2, z), 3) == shift(itinerary_of(FIG2, z, 4))
