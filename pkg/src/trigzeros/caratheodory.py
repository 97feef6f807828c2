"""Writing the origin as a short convex combination of curve points."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import least_squares, nnls

from .linprog import caratheodory_reduce, origin_in_hull
from .trig import Spectrum, curve_from_spectrum

logger = logging.getLogger(__name__)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
RESIDUAL_TOL = 1e-8


class DecompositionStall(RuntimeError):
    """Reduction could not get below the requested support size."""

    def __init__(self, message: str, decomposition: "CurveDecomposition"):
        super().__init__(message)
        self.decomposition = decomposition


@dataclass
class CurveDecomposition:
    params: np.ndarray
    weights: np.ndarray
    residual: float
    span_length: float

    def to_dict(self) -> dict:
        return {
            "params": [float(t) for t in self.params],
            "weights": [float(w) for w in self.weights],
            "residual": float(self.residual),
            "span_length": float(self.span_length),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CurveDecomposition":
        return cls(np.array(doc["params"]), np.array(doc["weights"]),
                   float(doc["residual"]), float(doc["span_length"]))


def span_length(params) -> float:
    """Length of the shortest closed arc containing all the given circle points."""
    t = np.sort(np.mod(np.asarray(params, dtype=float), 1.0))
    if t.size <= 1:
        return 0.0
    gaps = np.diff(np.append(t, t[0] + 1.0))
    return float(1.0 - gaps.max())


def _curve(spectrum, t):
    return curve_from_spectrum(spectrum, np.asarray(t, dtype=float).reshape(-1, 1))


def _best_weights(spectrum, t, penalty=1e3):
    """Simplex weights minimizing ``||sum w_i gamma(t_i)||``; the sum-to-one
    condition enters as a heavily weighted extra row."""
    G = _curve(spectrum, t)
    M = np.vstack([G.T, penalty * np.ones(len(t))])
    rhs = np.zeros(M.shape[0])
    rhs[-1] = penalty
    w, norm = nnls(M, rhs)
    return w, norm


def _golden_min(fn, lo, hi, iters):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
    return c if fc < fd else d


def refine(spectrum: Spectrum, params, width: float, rounds: int = 3, iters: int = 50):
    """Coordinate descent on the parameters, then a Gauss-Newton polish.

    Each coordinate is moved by golden-section search within ``+-width`` of its
    current value, in index order.  Returns ``(params, weights)``.
    """
    t = np.array(params, dtype=float)
    for _ in range(rounds):
        for i in range(t.size):
            def objective(v, i=i):
                trial = t.copy()
                trial[i] = v
                return _best_weights(spectrum, trial)[1]

            t[i] = _golden_min(objective, t[i] - width, t[i] + width, iters)
    w, _ = _best_weights(spectrum, t)
    w = w / w.sum()
    k = t.size

    def equations(z):
        tt, ww = z[:k], z[k:]
        return np.append(ww @ _curve(spectrum, tt), ww.sum() - 1.0)

    sol = least_squares(
        equations,
        np.concatenate([t, w]),
        bounds=(np.r_[np.full(k, -np.inf), np.zeros(k)], np.r_[np.full(k, np.inf), np.ones(k)]),
        method="trf",
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=200,
    )
    t, w = sol.x[:k], np.maximum(sol.x[k:], 0.0)
    return np.mod(t, 1.0), w / w.sum()


def _clusters(params, weights, gap):
    """Merge sorted circle points closer than ``gap`` into weighted means."""
    order = np.argsort(params)
    t, w = params[order], weights[order]
    groups = [[0]]
    for i in range(1, t.size):
        if t[i] - t[i - 1] <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    if len(groups) > 1 and t[0] + 1.0 - t[-1] <= gap:
        groups[0] = groups.pop() + groups[0]
    out_t, out_w = [], []
    for g in groups:
        gw = w[g].sum()
        # unwrap around the cut before averaging
        tg = np.unwrap(2 * np.pi * t[g]) / (2 * np.pi)
        out_t.append(float(np.mod(tg @ w[g] / gw, 1.0)))
        out_w.append(gw)
    return np.array(out_t), np.array(out_w)


def decompose_origin(
    spectrum: Spectrum,
    sample_size: int = 720,
    strict: Optional[bool] = None,
) -> CurveDecomposition:
    """Express the origin as a convex combination of few points of the curve.

    The sample is first cut down to the shortest arc ``[0, L]`` whose points
    still contain the origin in their hull (rotations are free because the
    curve is rotation-equivariant).  The LP weights on that arc are reduced to
    at most ``2|S| + 1`` points, nearby points are merged, the parameters are
    refined locally and a second reduction pass is run.

    The target support size is ``|S| + 1``.  With ``strict`` (the default for
    ``S = {1, ..., d}``) failing to reach it raises :class:`DecompositionStall`;
    otherwise the best decomposition found is returned.
    """
    if spectrum.n != 1:
        raise ValueError("decompose_origin needs a univariate spectrum")
    d = len(spectrum)
    N = int(sample_size)
    if N < 4 * d + 4:
        raise ValueError(f"sample_size must be at least {4 * d + 4}")
    if strict is None:
        strict = spectrum.univariate() == list(range(1, d + 1))
    ts = np.arange(N) / N
    V = _curve(spectrum, ts)
    full = origin_in_hull(V)
    if not full.inside:
        raise RuntimeError("origin not in the hull of the sampled curve")

    lo, hi, cert = 0, N - 1, full
    while hi - lo > 1:
        mid = (lo + hi) // 2
        c = origin_in_hull(V[: mid + 1])
        if c.inside:
            hi, cert = mid, c
        else:
            lo = mid
    arc = np.arange(hi + 1)
    red = caratheodory_reduce(V[arc], cert.weights)
    params, weights = ts[arc][red.indices], red.weights
    target = d + 1

    best = _finish(spectrum, params, weights)
    if best.params.size > target or best.residual > RESIDUAL_TOL:
        merged_t, merged_w = _clusters(params, weights, 2.5 / N)
        if merged_t.size > target:
            keep = np.sort(np.argsort(-merged_w, kind="stable")[:target])
            merged_t, merged_w = merged_t[keep], merged_w[keep]
        t, w = refine(spectrum, merged_t, width=2.0 / N)
        candidate = _finish(spectrum, t, w)
        if candidate.residual <= RESIDUAL_TOL and (
            candidate.params.size < best.params.size or best.residual > RESIDUAL_TOL
        ):
            best = candidate
    if best.residual > RESIDUAL_TOL:
        raise DecompositionStall(f"residual {best.residual:.3g} above {RESIDUAL_TOL}", best)
    if best.params.size > target:
        msg = f"support {best.params.size} exceeds target {target}"
        if strict:
            raise DecompositionStall(msg, best)
        logger.warning(msg)
    return best


def _finish(spectrum, params, weights) -> CurveDecomposition:
    """Drop negligible weights, run a Caratheodory pass and measure the result."""
    keep = weights > 1e-10
    params, weights = params[keep], weights[keep] / weights[keep].sum()
    G = _curve(spectrum, params)
    target = weights @ G
    red = caratheodory_reduce(G, weights, target=target, tol=1e-6)
    params, weights = params[red.indices], red.weights
    resid = float(np.abs(weights @ _curve(spectrum, params)).max())
    order = np.argsort(params)
    return CurveDecomposition(params[order], weights[order], resid, span_length(params))


# --------------------------------------------------------------------------
# convex position and Z/p orbits


def convex_position_check(points) -> tuple[bool, Optional[int]]:
    """True iff no point lies in the convex hull of the others.

    Returns ``(True, None)`` or ``(False, i)`` for the first offending index.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P.reshape(-1, 1)
    if P.shape[0] < 2:
        raise ValueError("need at least two points")
    for i in range(P.shape[0]):
        others = np.delete(P, i, axis=0) - P[i]
        if origin_in_hull(others).inside:
            return False, i
    return True, None


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in range(2, int(math.isqrt(p)) + 1):
        if p % q == 0:
            return False
    return True


@dataclass
class OrbitPoints:
    params: np.ndarray
    points: np.ndarray
    epsilon: float
    convex_position: bool


def zp_orbit_points(d: int, p: int, sample: int = 4096) -> OrbitPoints:
    """The orbit ``gamma_d(j / p)``, ``j = 0..p-1``, on the curve with spectrum
    ``{1, ..., d}``, with its checks.

    ``epsilon`` is the largest distance from a ``sample``-point discretization of
    the curve to the nearest orbit point.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p < 4 * d + 1:
        warnings.warn(f"p={p} is below 4d+1={4 * d + 1}", stacklevel=2)
    spectrum = Spectrum.initial(d)
    params = np.arange(p) / p
    pts = _curve(spectrum, params)
    convex, bad = convex_position_check(pts)
    if not convex:
        raise AssertionError(f"orbit point {bad} is not a vertex")
    shifted = np.mod(params + 1.0 / p, 1.0)
    if not np.allclose(np.sort(shifted), params, atol=1e-12):
        raise AssertionError("orbit is not invariant under rotation by 1/p")
    dense = _curve(spectrum, np.arange(sample) / sample)
    dist = np.sqrt(((dense[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)).min(axis=1)
    return OrbitPoints(params, pts, float(dist.max()), convex)
