import itertools

import numpy as np
import pytest

from trigzeros.caratheodory import (
    CurveDecomposition,
    convex_position_check,
    decompose_origin,
    is_prime,
    span_length,
    zp_orbit_points,
)
from trigzeros.trig import Spectrum, curve_from_spectrum


def brute_force_triples(spectrum, N=720, tol=1e-9):
    """Spans of every 3-subset ``{0, i/N, j/N}`` whose curve points contain
    the origin in their hull (weights from the normal equations)."""
    t = np.arange(N) / N
    G = curve_from_spectrum(spectrum, t.reshape(-1, 1))
    G1 = np.hstack([G, np.ones((N, 1))])
    i, j = np.triu_indices(N, k=1)
    keep = i > 0
    i, j = i[keep], j[keep]
    A = np.stack([np.broadcast_to(G1[0], (i.size, G1.shape[1])), G1[i], G1[j]], axis=-1)
    rhs = np.zeros(G1.shape[1])
    rhs[-1] = 1.0
    M = np.einsum("kri,krj->kij", A, A)
    ok = np.abs(np.linalg.det(M)) > 1e-12
    w = np.linalg.solve(M[ok], np.einsum("kri,r->ki", A[ok], rhs)[..., None])[..., 0]
    resid = np.abs(np.einsum("kri,ki->kr", A[ok], w) - rhs).max(axis=1)
    good = (resid <= tol) & (w.min(axis=1) >= -tol)
    spans = [span_length([0.0, a / N, b / N]) for a, b in zip(i[ok][good], j[ok][good])]
    return np.array(spans)


class TestDecompose:
    def test_single_frequency_is_antipodal(self):
        dec = decompose_origin(Spectrum.of([1]))
        assert dec.params.size == 2
        assert np.allclose(dec.weights, 0.5)
        assert span_length(dec.params) == pytest.approx(0.5)

    @pytest.mark.parametrize("d", [2, 3])
    def test_initial_spectra(self, d):
        dec = decompose_origin(Spectrum.initial(d))
        assert dec.params.size <= d + 1
        assert dec.residual <= 1e-8
        assert dec.span_length <= d / (d + 1) + 1e-3

    def test_initial_two_against_brute_force(self):
        dec = decompose_origin(Spectrum.initial(2))
        spans = brute_force_triples(Spectrum.initial(2))
        assert spans.size > 0
        # no feasible triple on the grid is shorter than the one we found
        assert spans.min() >= dec.span_length - 2 / 720
        assert spans.min() == pytest.approx(2 / 3, abs=2 / 720)

    def test_raked_spectrum(self):
        S = Spectrum.of([1, 3])
        dec = decompose_origin(S)
        assert dec.params.size <= 3 and dec.residual <= 1e-8
        assert brute_force_triples(S).size > 0

    @pytest.mark.parametrize("N", [97, 101, 211])
    def test_off_grid_samples(self, N):
        dec = decompose_origin(Spectrum.initial(2), sample_size=N)
        assert dec.params.size <= 3 and dec.residual <= 1e-8
        assert dec.span_length <= 2 / 3 + 2 / N

    def test_roundtrip(self):
        dec = decompose_origin(Spectrum.initial(2))
        again = CurveDecomposition.from_dict(dec.to_dict())
        assert np.allclose(again.params, dec.params) and again.residual == dec.residual

    def test_rejects_torus_and_small_samples(self):
        with pytest.raises(ValueError):
            decompose_origin(Spectrum.of([(1, 0)]))
        with pytest.raises(ValueError):
            decompose_origin(Spectrum.initial(3), sample_size=10)


def test_span_length():
    assert span_length([0.0, 0.5]) == pytest.approx(0.5)
    assert span_length([0.9, 0.1]) == pytest.approx(0.2)
    assert span_length([0.3]) == 0.0


class TestConvexPosition:
    def test_heptagon_on_gamma2(self):
        pts = curve_from_spectrum(Spectrum.initial(2), (np.arange(7) / 7).reshape(-1, 1))
        assert convex_position_check(pts) == (True, None)

    def test_point_inside_triangle(self):
        pts = [[0, 0], [4, 0], [0, 4], [1, 1]]
        assert convex_position_check(pts) == (False, 3)

    def test_two_points(self):
        assert convex_position_check([[0.0, 1.0], [2.0, 3.0]]) == (True, None)


class TestOrbits:
    def test_triangle(self):
        with pytest.warns(UserWarning):
            orb = zp_orbit_points(1, 3)
        assert np.allclose(orb.points.sum(axis=0), 0, atol=1e-12)
        assert np.allclose(np.linalg.norm(orb.points, axis=1), 1.0)

    def test_antipodal_pair(self):
        with pytest.warns(UserWarning):
            orb = zp_orbit_points(1, 2)
        assert orb.convex_position
        assert np.allclose(orb.points[0], -orb.points[1])

    def test_eleven_points_match_determinant_criterion(self):
        orb = zp_orbit_points(2, 11)
        assert orb.convex_position
        # cyclic-polytope test: every sorted 5-subset gives a determinant of
        # the same strict sign, which forces every point to be a vertex
        M = np.hstack([np.ones((11, 1)), orb.points])
        signs = {np.sign(np.linalg.det(M[list(c)])) for c in itertools.combinations(range(11), 5)}
        assert signs in ({1.0}, {-1.0})
        assert 0 < orb.epsilon < 1

    def test_non_prime(self):
        with pytest.raises(ValueError):
            zp_orbit_points(2, 12)


def test_is_prime():
    assert [p for p in range(20) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19]
