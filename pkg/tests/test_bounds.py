import csv
import io
import math

import numpy as np
import pytest

from trigzeros.bounds import (
    babenko_bound,
    compare_bounds,
    grid_points,
    kozma_oravecz_radius,
    mod_p_bound,
    sign_change_bound,
    steinerberger_radius,
    torus_radius,
    torus_radius_applies,
    torus_radius_max_spectrum,
    verify_grid_property,
)
from trigzeros.trig import Spectrum, torus_distance


def test_babenko_and_sign_change():
    assert [babenko_bound(d) for d in (1, 2, 9)] == pytest.approx([0.5, 2 / 3, 0.9])
    assert [sign_change_bound(d) for d in (1, 2, 10)] == pytest.approx([1 / 3, 0.4, 10 / 21])
    with pytest.raises(ValueError):
        babenko_bound(0)


class TestTorusRadius:
    def test_examples(self):
        assert torus_radius(1, 5) == pytest.approx(0.3, abs=1e-15)
        assert abs(torus_radius(2, 3) - math.sqrt(10) / 6) <= 1e-12
        assert torus_radius(1, 7919) == pytest.approx(0.5, abs=1e-3)

    @pytest.mark.parametrize("p", [1, 2, 4, 9])
    def test_rejects(self, p):
        with pytest.raises(ValueError):
            torus_radius(2, p)

    def test_max_spectrum(self):
        assert [torus_radius_max_spectrum(n, p) for n, p in ((1, 5), (2, 3), (1, 3))] == [1, 3, 0]

    def test_below_diameter(self):
        for n in (1, 2, 3):
            for p in (3, 5, 7, 11):
                assert torus_radius(n, p) < 0.5 * math.sqrt(n)


class TestLiteratureRadii:
    def test_kozma_oravecz(self):
        assert kozma_oravecz_radius([(5,), (-5,)]) == pytest.approx(0.1)
        assert kozma_oravecz_radius([(3, 4), (-3, -4)]) == pytest.approx(0.1)
        assert kozma_oravecz_radius([(1,), (-1,)]) == pytest.approx(0.5)

    def test_symmetrizes_with_warning(self):
        with pytest.warns(UserWarning):
            assert kozma_oravecz_radius(Spectrum.of([5])) == pytest.approx(0.1)

    def test_steinerberger(self):
        assert steinerberger_radius([(5,), (-5,)], 1) == pytest.approx(0.2)
        assert steinerberger_radius([(3, 4), (-3, -4)], 2) == pytest.approx(2**1.5 / 5)
        assert steinerberger_radius([(5,), (-5,), (10,), (-10,)], 1) == pytest.approx(0.3)

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            kozma_oravecz_radius([(0, 0)])


class TestModP:
    def test_examples(self):
        assert mod_p_bound(Spectrum.of([1, 6]), 5) == pytest.approx(0.5)
        assert mod_p_bound(Spectrum.of([1, 2, 3, 4]), 5) == pytest.approx(0.8)
        assert mod_p_bound(Spectrum.of([5]), 5) is None

    def test_non_prime(self):
        with pytest.raises(ValueError):
            mod_p_bound(Spectrum.of([1]), 6)


class TestGrid:
    def test_points(self):
        assert np.allclose(grid_points(1, 3)[:, 0], [0, 1 / 3, 2 / 3])
        assert grid_points(2, 2).shape == (4, 2)
        assert np.allclose(grid_points(1, 2)[:, 0], [0, 0.5])

    def test_cap(self):
        with pytest.raises(ValueError):
            grid_points(8, 7)

    def test_circle_of_three(self):
        chk = verify_grid_property(1, 3)
        assert chk.passed
        assert np.all(np.abs(chk.cover_distances - 1 / 6) <= 1e-12)
        assert chk.centers[0, 0] == pytest.approx(0.5)

    def test_two_by_three(self):
        chk = verify_grid_property(2, 3)
        assert chk.passed and np.allclose(chk.centers[0], [0.5, 0.5])
        L = grid_points(2, 3)
        inside = torus_distance(L, chk.centers[0]) <= math.sqrt(10) / 6 + 1e-12
        assert inside.sum() == 8 and not inside[0]

    def test_pair(self):
        chk = verify_grid_property(1, 2)
        assert chk.passed and np.allclose(chk.cover_distances, 0)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_all_small_cases(self, n, p):
        assert verify_grid_property(n, p).passed


class TestCompare:
    def test_large_frequency_favors_kozma_oravecz(self):
        rep = compare_bounds(Spectrum.of([100]), 1, 3)
        assert rep.winner == "kozma_oravecz" and rep.kozma_oravecz == pytest.approx(1 / 200)
        assert rep.torus_radius is None

    def test_small_frequency_favors_torus(self):
        rep = compare_bounds(Spectrum.of([1]), 1, 5)
        assert rep.winner == "torus_radius"
        assert rep.torus_radius == pytest.approx(0.3) and rep.kozma_oravecz == pytest.approx(0.5)

    def test_applicability(self):
        assert torus_radius_applies(Spectrum.of([(1, 0), (0, 1), (1, 1)]), 3)
        assert not torus_radius_applies(Spectrum.of([(3, 0)]), 3)
        assert not torus_radius_applies(Spectrum.of([1, 2]), 5)

    def test_csv(self):
        rows = list(csv.DictReader(io.StringIO(compare_bounds(Spectrum.of([1]), 1, 5).to_csv())))
        assert len(rows) == 1 and rows[0]["winner"] == "torus_radius"

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            compare_bounds(Spectrum.of([1]), 2, 3)
