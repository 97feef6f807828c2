import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trigzeros.cubature import (
    CubatureRule,
    equispaced_rule,
    gauss_legendre_rule,
    polynomial_exactness,
    rule_from_certificate,
    tchakaloff,
    trig_exactness,
)
from trigzeros.trig import Spectrum
from trigzeros.witness import SignChangeCertificate, min_diameter_sign_change


class TestTchakaloff:
    @pytest.mark.parametrize("freqs", [[1], [1, 2], [(1, 0), (0, 1)], [2, 7], [(1, 1), (2, 0), (0, 3)]])
    def test_node_count_and_exactness(self, freqs):
        S = Spectrum.of(freqs)
        rule = tchakaloff(S, 64 if S.n == 1 else 28)
        assert len(rule) <= 2 * len(S) + 1
        assert rule.max_residual <= 1e-9
        assert np.all(rule.weights > 0)

    def test_sample_too_small(self):
        with pytest.raises(ValueError):
            tchakaloff(Spectrum.of([1, 2]), 10)

    def test_serialized_fields(self):
        doc = tchakaloff(Spectrum.of([1]), 12).to_dict()
        assert set(doc) == {"nodes", "weights", "exact_space", "max_residual"}


class TestEquispaced:
    def test_small_cases(self):
        assert np.allclose(equispaced_rule(1).nodes, [0, 0.5])
        assert np.allclose(equispaced_rule(2).nodes, [0, 1 / 3, 2 / 3])
        assert np.allclose(equispaced_rule(3).nodes, [0, 0.25, 0.5, 0.75])

    @pytest.mark.parametrize("d", range(1, 9))
    def test_exact_with_half_the_nodes(self, d):
        rule = equispaced_rule(d)
        assert rule.max_residual <= 1e-12
        assert len(rule) == d + 1 < 2 * d + 1

    def test_not_exact_one_degree_higher(self):
        rule = equispaced_rule(3)
        report = trig_exactness(Spectrum.of([4]), rule.nodes, rule.weights)
        assert report["cos(4)"] == pytest.approx(1.0)


class TestFromCertificate:
    def test_triangle_is_exact_on_two_frequencies(self):
        cert = SignChangeCertificate.build(Spectrum.of([1]), [0, 1 / 3, 2 / 3], [1 / 3] * 3)
        rule = rule_from_certificate(cert, Spectrum.of([1]))
        assert rule.max_residual <= 1e-12
        assert max(trig_exactness(Spectrum.initial(2), rule.nodes, rule.weights).values()) <= 1e-12

    def test_antipodal_pair(self):
        cert = SignChangeCertificate.build(Spectrum.of([1]), [0.1, 0.6], [0.5, 0.5])
        assert len(rule_from_certificate(cert, Spectrum.of([1]))) == 2

    def test_raked_pentagon(self):
        S = Spectrum.of([1, 3])
        cert = min_diameter_sign_change(S).certificate
        rule = rule_from_certificate(cert, S)
        assert len(rule) == 5 and rule.max_residual <= 1e-7

    def test_rejects_bad_certificate(self):
        cert = SignChangeCertificate.build(Spectrum.of([1]), [0.0, 0.1], [0.5, 0.5])
        with pytest.raises(ValueError):
            rule_from_certificate(cert, Spectrum.of([1]))


class TestGaussLegendre:
    def test_midpoint(self):
        rule = gauss_legendre_rule(1)
        assert rule.nodes.tolist() == [0.5] and rule.weights.tolist() == [1.0]

    def test_two_points(self):
        rule = gauss_legendre_rule(2)
        h = 1 / (2 * math.sqrt(3))
        assert np.allclose(rule.nodes, [0.5 - h, 0.5 + h], atol=1e-15)
        assert np.allclose(rule.weights, 0.5)

    def test_fourth_moment(self):
        rule = gauss_legendre_rule(3)
        assert rule.weights @ rule.nodes**4 == pytest.approx(0.2, abs=1e-12)

    @pytest.mark.parametrize("m", range(1, 17))
    def test_against_numpy(self, m):
        rule = gauss_legendre_rule(m)
        x, w = np.polynomial.legendre.leggauss(m)
        assert np.allclose(rule.nodes, (x + 1) / 2, atol=1e-13)
        assert np.allclose(rule.weights, w / 2, atol=1e-13)
        assert rule.max_residual <= 1e-10

    def test_degree_beyond_exactness(self):
        rule = gauss_legendre_rule(2)
        assert polynomial_exactness(rule.nodes, rule.weights, 4)["t^4"] > 1e-4

    @pytest.mark.parametrize("m", [0, 65])
    def test_range(self, m):
        with pytest.raises(ValueError):
            gauss_legendre_rule(m)


@given(st.integers(1, 12))
def test_node_counts(d):
    # equispaced beats the generic positive-rule bound on the full space
    assert len(equispaced_rule(d)) < 2 * d + 1 <= 2 * len(Spectrum.initial(d)) + 1


def test_rule_residual_property():
    rule = CubatureRule(np.array([0.0]), np.array([1.0]), "x", {"a": 1e-3, "b": 2e-3})
    assert rule.max_residual == 2e-3
