"""Positivity witnesses, sign-change sets and threshold searches.

A *witness* is a trig polynomial with the given spectrum that is strictly
positive on a region; its absence means the origin lies in the convex hull of
the curve over the region, so every polynomial with that spectrum changes sign
there.  All searches work on finite grids, so positivity on the grid
over-approximates positivity on the region and thresholds are biased upward by
about one grid pitch.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional, Sequence, Union

import networkx as nx
import numpy as np

from .linprog import DEFAULT_MARGIN, HullCertificate, caratheodory_reduce, certify, origin_in_hull
from .trig import (
    GeodesicBall,
    Interval,
    Region,
    Spectrum,
    TrigPoly,
    circle_distance,
    curve_from_spectrum,
    evaluate,
    region_from_dict,
)

DEFAULT_GRID_1D = 2048
DEFAULT_GRID_2D = 64
DEFAULT_TOL = 5e-3
VERIFY_FACTOR = 4
MAX_RETRIES = 3
ZERO_TOL = 1e-12


# --------------------------------------------------------------------------
# sweeps


@dataclass
class SweepRow:
    parameter: float
    verdict: str
    margin_or_residual: float
    grid: int
    wall_ms: Optional[float] = None


SWEEP_COLUMNS = ("parameter", "verdict", "margin_or_residual", "grid", "wall_ms")


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        wall = "" if r.wall_ms is None else f"{r.wall_ms:.1f}"
        writer.writerow([repr(float(r.parameter)), r.verdict, repr(float(r.margin_or_residual)), r.grid, wall])
    return buf.getvalue()


def sweep(fn: Callable, params: Sequence, jobs: int = 1) -> list:
    """Map ``fn`` over ``params``; results come back in parameter order.

    ``fn`` must be picklable when ``jobs > 1``.
    """
    params = list(params)
    if jobs <= 1 or len(params) <= 1:
        return [fn(p) for p in params]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, params))


# --------------------------------------------------------------------------
# zeros


def find_zeros(f: TrigPoly, region: Interval, resolution: int) -> list[float]:
    """Sign changes of a univariate ``f`` on an arc, refined by bisection.

    The arc is cut into ``resolution`` equal steps.  Grid points where ``f`` is
    exactly zero are reported as they are; zeros that do not change sign
    between grid points are not detected.
    """
    if f.n != 1:
        raise ValueError("find_zeros needs a univariate polynomial")
    m = int(resolution)
    if m < 1:
        raise ValueError("resolution must be positive")
    full = region.length >= 1.0
    offsets = np.arange(m + 1) * (region.length / m)
    ts = region.start + offsets
    vals = evaluate(f, np.mod(ts, 1.0))
    if full:
        vals[-1] = vals[0]
    zeros = [ts[i] for i in range(m + 1) if vals[i] == 0.0]
    for i in range(m):
        if vals[i] * vals[i + 1] < 0:
            lo, hi, flo = ts[i], ts[i + 1], vals[i]
            while hi - lo > ZERO_TOL:
                mid = 0.5 * (lo + hi)
                fm = evaluate(f, mid % 1.0)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if (fm < 0) == (flo < 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            zeros.append(0.5 * (lo + hi))
    out: list[float] = []
    for z in sorted(float(z) % 1.0 for z in zeros):
        if not out or circle_distance(z, out[-1]) > 1e-10:
            out.append(z)
    if len(out) > 1 and circle_distance(out[0], out[-1]) <= 1e-10:
        out.pop()
    if not out:
        warnings.warn(
            "no sign change found; zeros without a sign change may be missed "
            f"at resolution {m}",
            stacklevel=2,
        )
    return out


# --------------------------------------------------------------------------
# positivity witnesses


@dataclass
class PositivityWitness:
    """Coefficients of a polynomial positive on ``region``.

    ``margin`` is the minimum over the verification grid, which is
    ``verify_resolution`` (at least 4x finer than ``grid_resolution``).
    """

    spectrum: Spectrum
    coeffs: np.ndarray
    region: Region
    margin: float
    grid_resolution: int
    verify_resolution: int

    @property
    def poly(self) -> TrigPoly:
        return TrigPoly.from_vector(self.spectrum, self.coeffs)

    def min_on_grid(self, resolution: int) -> float:
        pts = self.region.grid(resolution)
        return float(np.min(evaluate(self.poly, _batch(pts, self.spectrum.n))))

    def to_dict(self) -> dict:
        return {
            "kind": "witness",
            "spectrum": self.spectrum.to_dict(),
            "coeffs": [float(c) for c in self.coeffs],
            "region": self.region.to_dict(),
            "margin": float(self.margin),
            "grid_resolution": self.grid_resolution,
            "verify_resolution": self.verify_resolution,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PositivityWitness":
        return cls(
            Spectrum.from_dict(doc["spectrum"]),
            np.array(doc["coeffs"], dtype=float),
            region_from_dict(doc["region"]),
            doc["margin"],
            doc["grid_resolution"],
            doc["verify_resolution"],
        )


@dataclass
class Indeterminate:
    """The coarse grid admitted a witness that failed every finer check."""

    region: Region
    grid_resolution: int
    reason: str

    def to_dict(self) -> dict:
        return {
            "kind": "indeterminate",
            "region": self.region.to_dict(),
            "grid_resolution": self.grid_resolution,
            "reason": self.reason,
        }


PositivityResult = Union[PositivityWitness, HullCertificate, Indeterminate]


def _batch(pts, n):
    pts = np.asarray(pts, dtype=float)
    return pts.reshape(-1, 1) if n == 1 else pts


def _region_positivity(spectrum: Spectrum, region: Region, resolution: int, margin: float) -> PositivityResult:
    res = int(resolution)
    for _ in range(MAX_RETRIES + 1):
        pts = region.grid(res)
        if len(pts) == 0:
            raise ValueError(f"region contains no grid point at resolution {res}")
        a, hull = certify(curve_from_spectrum(spectrum, _batch(pts, spectrum.n)), margin)
        if a is None:
            return hull
        fine = VERIFY_FACTOR * res
        w = PositivityWitness(spectrum, a, region, 0.0, res, fine)
        w.margin = w.min_on_grid(fine)
        if w.margin > 0:
            return w
        res *= 2
    return Indeterminate(region, res // 2, "witness not positive on the verification grid")


def interval_positivity(
    spectrum: Spectrum,
    interval: Interval,
    grid_resolution: int = DEFAULT_GRID_1D,
    margin: float = DEFAULT_MARGIN,
) -> PositivityResult:
    """Search for a polynomial with this spectrum positive on a closed arc.

    ``grid_resolution`` counts points per unit length.  Returns a verified
    :class:`PositivityWitness`, the ``inside`` hull certificate when none
    exists on the grid, or :class:`Indeterminate`.
    """
    if spectrum.n != 1:
        raise ValueError("interval_positivity needs a univariate spectrum")
    return _region_positivity(spectrum, interval, grid_resolution, margin)


def ball_positivity(
    spectrum: Spectrum,
    ball: GeodesicBall,
    grid_resolution_per_axis: int = DEFAULT_GRID_2D,
    margin: float = DEFAULT_MARGIN,
) -> PositivityResult:
    """As :func:`interval_positivity` for a geodesic ball in the torus, sampled
    by the product grid points that fall inside it."""
    if ball.n != spectrum.n:
        raise ValueError("ball and spectrum dimensions differ")
    return _region_positivity(spectrum, ball, grid_resolution_per_axis, margin)


def verdict_of(result: PositivityResult) -> str:
    if isinstance(result, PositivityWitness):
        return "witness"
    if isinstance(result, HullCertificate):
        return "infeasible"
    return "indeterminate"


def _interval_row(args, spectrum, grid, margin, timing) -> SweepRow:
    start, length = args
    t0 = time.perf_counter()
    res = interval_positivity(spectrum, Interval(start, length), grid, margin)
    wall = (time.perf_counter() - t0) * 1e3 if timing else None
    value = res.margin if isinstance(res, PositivityWitness) else getattr(res, "residual", math.nan)
    return SweepRow(length, verdict_of(res), value, grid, wall)


def length_sweep(
    spectrum: Spectrum,
    lengths: Sequence[float],
    start: float = 0.0,
    grid_resolution: int = DEFAULT_GRID_1D,
    margin: float = DEFAULT_MARGIN,
    jobs: int = 1,
    timing: bool = False,
) -> list[SweepRow]:
    """Interval positivity verdicts over a list of lengths."""
    fn = partial(_interval_row, spectrum=spectrum, grid=grid_resolution, margin=margin, timing=timing)
    return sweep(fn, [(start, float(L)) for L in lengths], jobs)


def rotation_verdicts(
    spectrum: Spectrum,
    length: float,
    starts: Sequence[float],
    grid_resolution: int = DEFAULT_GRID_1D,
    margin: float = DEFAULT_MARGIN,
    jobs: int = 1,
) -> list[str]:
    """Verdicts for rotated copies of an arc of fixed length."""
    fn = partial(_interval_row, spectrum=spectrum, grid=grid_resolution, margin=margin, timing=False)
    return [r.verdict for r in sweep(fn, [(float(s), length) for s in starts], jobs)]


# --------------------------------------------------------------------------
# phase transition in the arc length


@dataclass
class ThresholdResult:
    """Bisection outcome: a witness exists below ``bracket[0]`` and none at
    ``bracket[1]``.  ``band`` is the one-sided discretization allowance."""

    spectrum: Spectrum
    length: float
    bracket: tuple
    band: float
    grid: int
    steps: list = field(default_factory=list)
    indeterminate: bool = False
    witness: Optional["PositivityWitness"] = None
    certificate: Optional["SignChangeCertificate"] = None

    def to_dict(self) -> dict:
        return {
            "spectrum": self.spectrum.to_dict(),
            "length": float(self.length),
            "bracket": [float(v) for v in self.bracket],
            "band": float(self.band),
            "grid": self.grid,
            "indeterminate": self.indeterminate,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


def babenko_threshold(
    spectrum: Spectrum,
    tol: float = DEFAULT_TOL,
    grid_resolution: int = DEFAULT_GRID_1D,
    margin: float = DEFAULT_MARGIN,
    timing: bool = False,
) -> ThresholdResult:
    """Shortest arc length ``L`` such that no polynomial with this spectrum is
    positive on ``[0, L]``, located by bisection.

    Arcs of the same length are equivalent under rotation, so only arcs starting
    at 0 are probed.  Indeterminate probes count as infeasible and are flagged.
    """
    if spectrum.n != 1:
        raise ValueError("babenko_threshold needs a univariate spectrum")
    if tol < 2.0 / grid_resolution:
        raise ValueError("tol must be at least 2 / grid_resolution")
    steps: list[SweepRow] = []
    flagged = False
    last = {}

    def probe(L: float) -> bool:
        nonlocal flagged
        t0 = time.perf_counter()
        res = interval_positivity(spectrum, Interval(0.0, L), grid_resolution, margin)
        last[verdict_of(res)] = (L, res)
        wall = (time.perf_counter() - t0) * 1e3 if timing else None
        verdict = verdict_of(res)
        value = res.margin if isinstance(res, PositivityWitness) else getattr(res, "residual", math.nan)
        steps.append(SweepRow(L, verdict, value, grid_resolution, wall))
        flagged |= verdict == "indeterminate"
        return verdict == "witness"

    lo, hi = tol, 1.0
    if not probe(lo) or probe(hi):
        raise RuntimeError("no phase transition in (0, 1)")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            lo = mid
        else:
            hi = mid
    witness = last["witness"][1]
    cert = None
    if "infeasible" in last:
        L, hull = last["infeasible"]
        cert = certificate_from_hull(spectrum, Interval(0.0, L).grid(grid_resolution), hull)
    return ThresholdResult(
        spectrum, 0.5 * (lo + hi), (lo, hi), 2.0 / grid_resolution, grid_resolution, steps, flagged,
        witness, cert,
    )


def certificate_from_hull(spectrum: Spectrum, points, hull: HullCertificate) -> "SignChangeCertificate":
    """Compress an ``inside`` hull certificate over ``points`` to a sign-change
    certificate with at most ``2|S| + 1`` support points."""
    pts = np.asarray(points, dtype=float)
    V = curve_from_spectrum(spectrum, _batch(pts, spectrum.n))
    red = caratheodory_reduce(V, hull.weights)
    return SignChangeCertificate.build(spectrum, pts[red.indices], red.weights)


# --------------------------------------------------------------------------
# minimum-diameter sign-change sets


@dataclass
class SignChangeCertificate:
    """Finite set on which every polynomial with the spectrum changes sign,
    witnessed by weights with ``sum w_i gamma(x_i) = 0``."""

    support: np.ndarray
    weights: np.ndarray
    diameter: float
    residual: float

    def to_dict(self) -> dict:
        return {
            "support": self.support.tolist(),
            "weights": [float(w) for w in self.weights],
            "diameter": float(self.diameter),
            "residual": float(self.residual),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SignChangeCertificate":
        return cls(np.array(doc["support"], dtype=float), np.array(doc["weights"], dtype=float),
                   float(doc["diameter"]), float(doc["residual"]))

    @classmethod
    def build(cls, spectrum: Spectrum, support, weights) -> "SignChangeCertificate":
        support = np.asarray(support, dtype=float)
        weights = np.asarray(weights, dtype=float)
        pts = _batch(support, spectrum.n)
        from .trig import torus_distance

        diam = 0.0
        for i, j in itertools.combinations(range(len(pts)), 2):
            diam = max(diam, torus_distance(pts[i], pts[j]))
        resid = float(np.abs(weights @ curve_from_spectrum(spectrum, pts)).max())
        return cls(support, weights, float(diam), resid)


@dataclass
class SignSetResult:
    spectrum: Spectrum
    delta: float
    certificate: Optional[SignChangeCertificate]
    lower: float
    grid_size: int
    cliques_tested: int
    indeterminate: bool = False

    def to_dict(self) -> dict:
        return {
            "spectrum": self.spectrum.to_dict(),
            "delta": float(self.delta),
            "lower": float(self.lower),
            "grid_size": self.grid_size,
            "cliques_tested": self.cliques_tested,
            "indeterminate": self.indeterminate,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


def _step_distance(i: int, j: int, N: int) -> int:
    k = (i - j) % N
    return min(k, N - k)


def polygon_seeds(N: int, j: int) -> list[list[int]]:
    """Vertices of regular odd polygons on the N-grid with diameter <= j/N."""
    seeds = []
    for m in range(3, N + 1, 2):
        if N % m == 0 and (m // 2) * (N // m) <= j:
            seeds.append([k * (N // m) for k in range(m)])
    return seeds


def circular_cliques(N: int, j: int, anchored: bool = True):
    """Maximal vertex sets of the N-grid with pairwise step distance <= j.

    With ``anchored`` only the cliques containing vertex 0 are produced, which
    covers every clique up to rotation.
    """
    if 2 * j >= N:
        yield list(range(N))
        return
    if anchored:
        nodes = [k % N for k in range(-j, j + 1) if k != 0]
    else:
        nodes = list(range(N))
    G = nx.Graph()
    G.add_nodes_from(nodes)
    for a, b in itertools.combinations(nodes, 2):
        if _step_distance(a, b, N) <= j:
            G.add_edge(a, b)
    if anchored:
        if not nodes:
            yield [0]
            return
        for c in nx.find_cliques(G):
            yield sorted([0] + c)
    else:
        for c in nx.find_cliques(G):
            yield sorted(c)


def min_diameter_sign_change(
    spectrum: Spectrum,
    tol: float = DEFAULT_TOL,
    grid_size: int = 105,
    budget: int = 200_000,
) -> SignSetResult:
    """Smallest grid diameter of a set on which every polynomial with this
    spectrum changes sign.

    Bisects over the step distance ``j`` (diameter ``j / grid_size``).  For each
    ``j`` the regular odd polygons fitting the diameter are tried first, then
    every maximal clique of the circular distance graph through vertex 0 (the
    curve is rotation-equivariant, so one rotation class suffices).
    """
    if spectrum.n != 1:
        raise ValueError("min_diameter_sign_change needs a univariate spectrum")
    N = int(grid_size)
    if N > 120:
        raise ValueError("grid_size above the combinatorial budget of 120")
    ts = np.arange(N) / N
    V = curve_from_spectrum(spectrum, ts.reshape(-1, 1))
    tested = 0
    exhausted = False

    def feasible(j: int) -> Optional[tuple]:
        nonlocal tested, exhausted
        candidates = itertools.chain(polygon_seeds(N, j), circular_cliques(N, j))
        for clique in candidates:
            if tested >= budget:
                exhausted = True
                return None
            tested += 1
            cert = origin_in_hull(V[clique])
            if cert.inside:
                return clique, cert.weights
        return None

    lo, hi = 0, N // 2
    found = feasible(hi)
    if found is None:
        raise RuntimeError("no sign-change set even for the full grid")
    while hi - lo > 1 and (hi - lo) / N > tol and not exhausted:
        mid = (lo + hi) // 2
        hit = feasible(mid)
        if hit is None:
            lo = mid
        else:
            hi, found = mid, hit
    clique, w = found
    red = caratheodory_reduce(V[clique], w)
    support = ts[np.asarray(clique)[red.indices]]
    cert = SignChangeCertificate.build(spectrum, support, red.weights)
    return SignSetResult(spectrum, hi / N, cert, lo / N, N, tested, exhausted)
