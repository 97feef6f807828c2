"""Positive-weight integration rules and their exactness reports.

Every rule integrates against the uniform probability measure: the torus with
Lebesgue measure for trigonometric rules, ``[0, 1]`` for Gauss-Legendre.
Exactness is always measured against closed-form integrals: every trig
monomial integrates to 0, the constant to 1 and ``t**j`` to ``1 / (j + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linprog import caratheodory_reduce, origin_in_hull
from .trig import Spectrum, curve_from_spectrum
from .witness import SignChangeCertificate

DEDUP_TOL = 1e-10
CERT_TOL = 1e-8
MAX_NEWTON = 100


@dataclass
class CubatureRule:
    nodes: np.ndarray  # (k,) on [0, 1] or the circle, (k, n) on the torus
    weights: np.ndarray
    exact_space: str
    exactness: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.exactness.values(), default=0.0)

    def __len__(self) -> int:
        return len(self.weights)

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes.tolist(),
            "weights": [float(w) for w in self.weights],
            "exact_space": self.exact_space,
            "max_residual": float(self.max_residual),
        }


def _merge_nodes(nodes: np.ndarray, weights: np.ndarray, periodic: bool = True):
    """Merge nodes closer than ``DEDUP_TOL`` (summing weights)."""
    pts = nodes.reshape(len(weights), -1)
    out_p, out_w = [], []
    for p, w in zip(pts, weights):
        for i, q in enumerate(out_p):
            diff = np.abs(p - q)
            if periodic:
                diff = np.minimum(diff, 1.0 - diff)
            if diff.max() <= DEDUP_TOL:
                out_w[i] += w
                break
        else:
            out_p.append(p.copy())
            out_w.append(float(w))
    out = np.array(out_p)
    return (out[:, 0] if nodes.ndim == 1 else out), np.array(out_w)


def trig_exactness(spectrum: Spectrum, nodes, weights) -> dict:
    """``|rule(f) - integral(f)|`` for each cos/sin basis function of the
    spectrum and for the constant."""
    pts = np.asarray(nodes, dtype=float).reshape(len(weights), spectrum.n)
    sums = np.asarray(weights) @ curve_from_spectrum(spectrum, pts)
    report = {"1": abs(float(np.sum(weights)) - 1.0)}
    for i, alpha in enumerate(spectrum.freqs):
        tag = ",".join(map(str, alpha))
        report[f"cos({tag})"] = abs(float(sums[2 * i]))
        report[f"sin({tag})"] = abs(float(sums[2 * i + 1]))
    return report


def _sample_grid(n: int, per_axis: int) -> np.ndarray:
    axes = [np.arange(per_axis) / per_axis] * n
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)


def tchakaloff(spectrum: Spectrum, sample_size: int) -> CubatureRule:
    """Positive rule with at most ``2|S| + 1`` nodes exact on the span of the
    spectrum's trig basis and the constants.

    ``sample_size`` points per axis are laid on a product grid; simplex weights
    matching every moment are found by the hull LP and then reduced.
    """
    k = 2 * len(spectrum) + 1
    if sample_size < 4 * k:
        raise ValueError(f"sample_size must be at least {4 * k}")
    pts = _sample_grid(spectrum.n, int(sample_size))
    G = curve_from_spectrum(spectrum, pts)
    # all moments of the curve coordinates vanish, so the target is the origin
    cert = origin_in_hull(G)
    if not cert.inside:
        raise RuntimeError("moment equations infeasible on this sample; refine it")
    red = caratheodory_reduce(G, cert.weights)
    nodes = pts[red.indices]
    if spectrum.n == 1:
        nodes = nodes[:, 0]
    nodes, weights = _merge_nodes(nodes, red.weights)
    return CubatureRule(nodes, weights, f"trig[{spectrum}]+const", trig_exactness(spectrum, nodes, weights))


def equispaced_rule(d: int) -> CubatureRule:
    """``d + 1`` equally spaced nodes with equal weights; exact on all trig
    polynomials of degree at most ``d`` plus constants."""
    if d < 1:
        raise ValueError("d must be positive")
    nodes = np.arange(d + 1) / (d + 1)
    weights = np.full(d + 1, 1.0 / (d + 1))
    spectrum = Spectrum.initial(d)
    return CubatureRule(nodes, weights, f"T_{d}", trig_exactness(spectrum, nodes, weights))


def rule_from_certificate(cert: SignChangeCertificate, spectrum: Spectrum) -> CubatureRule:
    """Read a sign-change certificate as an integration rule: its support and
    weights integrate every function in the spectrum's span plus constants."""
    pts = np.asarray(cert.support, dtype=float)
    G = curve_from_spectrum(spectrum, pts.reshape(len(cert.weights), spectrum.n))
    resid = float(np.abs(np.asarray(cert.weights) @ G).max())
    if resid > CERT_TOL:
        raise ValueError(f"certificate residual {resid:.3g} exceeds {CERT_TOL}")
    nodes, weights = _merge_nodes(pts, np.asarray(cert.weights, dtype=float))
    weights = weights / weights.sum()
    return CubatureRule(nodes, weights, f"trig[{spectrum}]+const", trig_exactness(spectrum, nodes, weights))


def _legendre(m: int, x: np.ndarray):
    """``P_m(x)`` and ``P_m'(x)`` by the three-term recurrence."""
    p0, p1 = np.ones_like(x), x.copy()
    if m == 0:
        return p0, np.zeros_like(x)
    for k in range(2, m + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = m * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def polynomial_exactness(nodes, weights, degree: int) -> dict:
    t = np.asarray(nodes, dtype=float)
    w = np.asarray(weights, dtype=float)
    return {f"t^{j}": abs(float(w @ t**j) - 1.0 / (j + 1)) for j in range(degree + 1)}


def gauss_legendre_rule(m: int) -> CubatureRule:
    """``m``-point Gauss-Legendre rule on ``[0, 1]``, weights summing to 1.

    Roots of ``P_m`` come from Newton's method started at the Chebyshev-like
    guesses ``cos(pi (i - 1/4) / (m + 1/2))``.
    """
    if not 1 <= m <= 64:
        raise ValueError("m must be between 1 and 64")
    i = np.arange(1, m + 1)
    x = np.cos(np.pi * (i - 0.25) / (m + 0.5))
    for _ in range(MAX_NEWTON):
        p, dp = _legendre(m, x)
        dx = p / dp
        x = x - dx
        if np.abs(dx).max() < 1e-15:
            break
    else:
        raise RuntimeError("Newton iteration for Legendre roots did not converge")
    _, dp = _legendre(m, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    nodes = (x[order] + 1.0) / 2.0
    weights = w[order] / w.sum()
    return CubatureRule(nodes, weights, f"poly_deg<={2 * m - 1}",
                        polynomial_exactness(nodes, weights, 2 * m - 1))
