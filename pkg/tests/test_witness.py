import itertools
import math

import numpy as np
import pytest

from trigzeros import witness as wmod
from trigzeros.linprog import HullCertificate
from trigzeros.trig import GeodesicBall, Interval, Spectrum, TrigPoly, curve_from_spectrum, evaluate
from trigzeros.witness import (
    Indeterminate,
    PositivityWitness,
    SignChangeCertificate,
    babenko_threshold,
    ball_positivity,
    circular_cliques,
    find_zeros,
    interval_positivity,
    length_sweep,
    min_diameter_sign_change,
    polygon_seeds,
    rotation_verdicts,
    sweep_csv,
    verdict_of,
)


def dense_min(w: PositivityWitness, factor=10):
    return w.min_on_grid(factor * w.grid_resolution)


class TestFindZeros:
    def test_sine_full_circle(self):
        zs = find_zeros(TrigPoly(Spectrum.of([1]), [(0, 1)]), Interval(0, 1), 64)
        assert np.allclose(zs, [0.0, 0.5], atol=1e-10)

    def test_cos_double(self):
        zs = find_zeros(TrigPoly(Spectrum.of([2]), [(1, 0)]), Interval(0, 0.5), 64)
        assert np.allclose(zs, [0.125, 0.375], atol=1e-10)

    def test_zero_inside_arc(self):
        f = TrigPoly(Spectrum.of([1, 3]), [(0, 1), (0, 0.1)])
        zs = find_zeros(f, Interval(0.4, 0.2), 64)
        assert len(zs) == 1 and zs[0] == pytest.approx(0.5, abs=1e-10)

    def test_warns_without_sign_change(self):
        with pytest.warns(UserWarning):
            assert find_zeros(TrigPoly(Spectrum.of([1]), [(0, 1)]), Interval(0.1, 0.3), 16) == []


class TestIntervalPositivity:
    def test_short_arc_has_witness(self):
        res = interval_positivity(Spectrum.initial(2), Interval(0, 0.6))
        assert isinstance(res, PositivityWitness)
        assert res.margin > 0 and dense_min(res) > 0

    def test_long_arc_is_blocked(self):
        res = interval_positivity(Spectrum.initial(2), Interval(0, 0.7))
        assert isinstance(res, HullCertificate) and res.inside

    def test_closed_half_circle(self):
        assert verdict_of(interval_positivity(Spectrum.of([1]), Interval(0.3, 0.5))) == "infeasible"

    def test_witness_roundtrip(self):
        res = interval_positivity(Spectrum.of([1, 3]), Interval(0.1, 0.3))
        again = PositivityWitness.from_dict(res.to_dict())
        assert again.poly == res.poly and again.region == res.region

    @pytest.mark.parametrize("freqs,length", [([1], 0.45), ([1, 2], 0.62), ([2, 5], 0.2), ([1, 2, 3], 0.7)])
    def test_witness_soundness_on_finer_grid(self, freqs, length):
        res = interval_positivity(Spectrum.of(freqs), Interval(0.17, length), 512)
        assert isinstance(res, PositivityWitness)
        assert dense_min(res) > 0

    def test_indeterminate_when_verification_always_fails(self, monkeypatch):
        monkeypatch.setattr(PositivityWitness, "min_on_grid", lambda self, r: -1.0)
        res = interval_positivity(Spectrum.of([1]), Interval(0, 0.3), 64)
        assert isinstance(res, Indeterminate)
        assert res.to_dict()["kind"] == "indeterminate"


class TestBallPositivity:
    S = Spectrum.of([(1, 0), (0, 1), (1, 1)])

    def test_torus_radius_ball_blocked(self):
        res = ball_positivity(self.S, GeodesicBall((0.5, 0.5), math.sqrt(10) / 6), 64)
        assert verdict_of(res) == "infeasible"

    def test_small_ball_has_witness(self):
        res = ball_positivity(self.S, GeodesicBall((0.2, 0.7), 0.05), 64)
        assert isinstance(res, PositivityWitness) and dense_min(res, 4) > 0

    def test_circle_ball(self):
        res = ball_positivity(Spectrum.of([1]), GeodesicBall((0.4,), 0.3), 512)
        assert verdict_of(res) == "infeasible"

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            ball_positivity(self.S, GeodesicBall((0.5,), 0.1))


class TestThreshold:
    @pytest.mark.parametrize("d", [1, 2])
    def test_matches_closed_form(self, d):
        res = babenko_threshold(Spectrum.initial(d))
        assert res.length == pytest.approx(d / (d + 1), abs=0.01)
        lo, hi = res.bracket
        assert lo <= res.length <= hi and hi - lo <= 5e-3

    def test_bracket_is_certified(self):
        S = Spectrum.initial(2)
        res = babenko_threshold(S)
        assert res.witness.region.length == pytest.approx(res.bracket[0])
        assert dense_min(res.witness) > 0
        cert = res.certificate
        assert cert.residual <= 1e-9 and len(cert.weights) <= 2 * len(S) + 1
        assert np.all(cert.support <= res.bracket[1] + 1e-12)
        # consistency: the certified set really blocks the witness found below
        assert evaluate(res.witness.poly, cert.support).min() <= 0

    def test_steps_recorded_without_timing(self):
        res = babenko_threshold(Spectrum.of([1]), tol=0.05)
        assert res.steps and all(r.wall_ms is None for r in res.steps)
        assert "wall_ms" in sweep_csv(res.steps).splitlines()[0]


class TestSweeps:
    def test_length_sweep_is_monotone(self):
        rows = length_sweep(Spectrum.initial(2), np.linspace(0.5, 0.8, 13))
        verdicts = [r.verdict for r in rows]
        first_block = verdicts.index("infeasible")
        assert all(v == "witness" for v in verdicts[:first_block])
        assert all(v == "infeasible" for v in verdicts[first_block:])

    def test_parallel_matches_serial(self):
        S, lengths = Spectrum.of([1, 3]), [0.3, 0.45, 0.55, 0.6]
        assert sweep_csv(length_sweep(S, lengths, jobs=1)) == sweep_csv(length_sweep(S, lengths, jobs=2))

    @pytest.mark.parametrize("length,expected", [(0.6, "witness"), (0.7, "infeasible")])
    def test_rotation_invariance(self, length, expected):
        starts = [k / 8 + 0.013 for k in range(8)]
        assert rotation_verdicts(Spectrum.initial(2), length, starts) == [expected] * 8


class TestSignChangeSets:
    def test_triangle(self):
        res = min_diameter_sign_change(Spectrum.of([1]))
        assert res.delta == pytest.approx(1 / 3, abs=0.01)
        assert len(res.certificate.support) == 3
        assert np.allclose(res.certificate.weights, 1 / 3)
        gaps = np.diff(np.sort(res.certificate.support))
        assert np.allclose(gaps, 1 / 3)

    def test_raked_pentagon(self):
        res = min_diameter_sign_change(Spectrum.of([1, 3]))
        assert res.delta == pytest.approx(0.4, abs=0.015)
        assert res.lower < res.delta
        assert res.certificate.residual <= 1e-9

    def test_initial_two_within_bound(self):
        res = min_diameter_sign_change(Spectrum.initial(2))
        assert res.delta <= 0.4 + 5e-3

    def test_certificate_roundtrip(self):
        cert = SignChangeCertificate.build(Spectrum.of([1]), [0, 1 / 3, 2 / 3], [1 / 3] * 3)
        again = SignChangeCertificate.from_dict(cert.to_dict())
        assert again.diameter == pytest.approx(1 / 3) and again.residual <= 1e-15

    def test_grid_cap(self):
        with pytest.raises(ValueError):
            min_diameter_sign_change(Spectrum.of([1]), grid_size=121)

    @pytest.mark.parametrize("N,j", [(9, 2), (11, 3), (12, 4)])
    def test_anchored_cliques_cover_all_rotations(self, N, j):
        anchored = {tuple(c) for c in circular_cliques(N, j)}
        every = {tuple(c) for c in circular_cliques(N, j, anchored=False)}
        rotated = {tuple(sorted((v + s) % N for v in c)) for c in anchored for s in range(N)}
        assert rotated == every

    def test_polygon_seeds(self):
        assert polygon_seeds(15, 5) == [[0, 5, 10]]
        assert polygon_seeds(15, 6) == [[0, 5, 10], [0, 3, 6, 9, 12]]
        assert polygon_seeds(15, 4) == []


def test_mod_p_interval_claim_has_a_counterexample():
    """``sin 2 pi t + 0.224 cos 12 pi t`` has spectrum {1, 6}, whose residues
    mod 5 form one class, yet it is strictly positive on the closed arc
    ``[0, 1/2]``; checked by dense sampling plus a Lipschitz bound."""
    c = 0.224
    f = TrigPoly(Spectrum.of([1, 6]), [(0.0, 1.0), (c, 0.0)])
    m = 2_000_000
    t = np.linspace(0.0, 0.5, m + 1)
    low = np.sin(2 * np.pi * t) + c * np.cos(12 * np.pi * t)
    lipschitz = 2 * np.pi + 12 * np.pi * c
    certified = low.min() - lipschitz * (0.5 / m) / 2
    assert certified > 0.2
    assert np.allclose(evaluate(f, t[::1000]), low[::1000])
    # the search agrees: a positive polynomial exists on every rotation tested
    starts = [k / 16 for k in range(16)]
    assert set(rotation_verdicts(Spectrum.of([1, 6]), 0.5, starts)) == {"witness"}
