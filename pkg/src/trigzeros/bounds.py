"""Closed-form zero-distribution bounds and the p-grid covering construction."""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .caratheodory import is_prime
from .trig import Spectrum, torus_diameter, torus_distance

GRID_CAP = 10**6


def babenko_bound(d: int) -> float:
    """Arc length on which every zero-mean polynomial of degree d vanishes."""
    if d < 1:
        raise ValueError("d must be positive")
    return d / (d + 1)


def sign_change_bound(d: int) -> float:
    if d < 1:
        raise ValueError("d must be positive")
    return d / (2 * d + 1)


def torus_radius(n: int, p: int) -> float:
    """``sqrt((n - 1)/4 + ((p - 2) / (2p))**2)``."""
    if not is_prime(p) or p < 3:
        raise ValueError(f"p={p} must be a prime >= 3")
    return math.sqrt(0.25 * (n - 1) + ((p - 2) / (2 * p)) ** 2)


def torus_radius_max_spectrum(n: int, p: int) -> int:
    """Largest spectrum size for which the torus radius applies."""
    return math.floor(p**n / 2 - 1)


def _symmetrize(freqs) -> list[tuple]:
    vecs = [tuple(int(v) for v in np.atleast_1d(a)) for a in freqs]
    if any(all(v == 0 for v in a) for a in vecs):
        raise ValueError("the zero vector is not allowed in a spectrum")
    s = set(vecs)
    sym = s | {tuple(-v for v in a) for a in s}
    if sym != s:
        warnings.warn("spectrum is not symmetric; adding the negated frequencies", stacklevel=3)
    return sorted(sym)


def _freqs(spectrum) -> list:
    return list(spectrum.freqs) if isinstance(spectrum, Spectrum) else list(spectrum)


def kozma_oravecz_radius(spectrum) -> float:
    """``sum over lambda in S of 1 / (4 |lambda|)`` for symmetric S."""
    sym = _symmetrize(_freqs(spectrum))
    return float(sum(1.0 / (4.0 * math.sqrt(sum(v * v for v in a))) for a in sym))


def steinerberger_radius(spectrum, n: int) -> float:
    """``n**1.5 * sum over distinct norms L of 1 / L`` for symmetric S."""
    sym = _symmetrize(_freqs(spectrum))
    norms = sorted({sum(v * v for v in a) for a in sym})
    return float(n**1.5 * sum(1.0 / math.sqrt(q) for q in norms))


def mod_p_bound(spectrum: Spectrum, p: int) -> Optional[float]:
    """``r / (r + 1)`` with r the number of residues mod p in S; None when some
    frequency is divisible by p."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    ks = spectrum.univariate()
    if any(k % p == 0 for k in ks):
        return None
    r = len({k % p for k in ks})
    return r / (r + 1)


def grid_points(n: int, p: int) -> np.ndarray:
    """The ``p**n`` points ``(k_1/p, ..., k_n/p)`` as an array of shape (p**n, n)."""
    if p**n > GRID_CAP:
        raise ValueError(f"grid of {p}**{n} points exceeds the cap {GRID_CAP}")
    axes = [np.arange(p) / p] * n
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)


@dataclass
class GridCheck:
    n: int
    p: int
    radius: float
    passed: bool
    centers: np.ndarray
    cover_distances: np.ndarray  # max distance from each center to L minus its point


def _grid_radius(n: int, p: int) -> float:
    # same closed form as torus_radius, but p = 2 is allowed here
    return math.sqrt(0.25 * (n - 1) + ((p - 2) / (2 * p)) ** 2)


def verify_grid_property(n: int, p: int) -> GridCheck:
    """Check that removing any grid point leaves the rest in one ball of the
    torus radius, using the antipode of the removed point as center."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    L = grid_points(n, p)
    r = _grid_radius(n, p)
    centers = np.mod(L + 0.5, 1.0)
    cover = np.empty(len(L))
    for i, c in enumerate(centers):
        dist = torus_distance(L, c)
        dist[i] = 0.0
        cover[i] = dist.max()
    passed = bool(np.all(cover <= r + 1e-12))
    return GridCheck(n, p, r, passed, centers, cover)


@dataclass
class BoundReport:
    spectrum: Spectrum
    n: int
    p: int
    babenko: Optional[float]
    sign_change: Optional[float]
    torus_radius: Optional[float]
    kozma_oravecz: float
    steinerberger: float
    torus_diameter: float
    winner: str
    notes: tuple = ()

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["spectrum"] = self.spectrum.to_dict()
        doc["notes"] = list(self.notes)
        return doc

    CSV_FIELDS = ("spectrum", "n", "p", "babenko", "sign_change", "torus_radius",
                  "kozma_oravecz", "steinerberger", "torus_diameter", "winner")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_FIELDS)
        row = []
        for name in self.CSV_FIELDS:
            v = getattr(self, name)
            if name == "spectrum":
                v = str(v)
            elif isinstance(v, float):
                v = repr(v)
            elif v is None:
                v = ""
            row.append(v)
        writer.writerow(row)
        return buf.getvalue()


def torus_radius_applies(spectrum: Spectrum, p: int) -> bool:
    """Size and divisibility hypotheses for the torus radius."""
    if p < 3 or not is_prime(p):
        return False
    if len(spectrum) > torus_radius_max_spectrum(spectrum.n, p):
        return False
    return all(any(a % p for a in alpha) for alpha in spectrum.freqs)


def compare_bounds(spectrum: Spectrum, n: int, p: int) -> BoundReport:
    """Evaluate every applicable radius and pick the smallest."""
    if spectrum.n != n:
        raise ValueError("spectrum dimension does not match n")
    notes = ["literature radii use the symmetrized spectrum S u -S"]
    d = len(spectrum)
    babenko = sign_change = None
    if n == 1:
        babenko = babenko_bound(d)
        sign_change = sign_change_bound(d)
    tr = torus_radius(n, p) if torus_radius_applies(spectrum, p) else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ko = kozma_oravecz_radius(spectrum)
        st = steinerberger_radius(spectrum, n)
    radii = {"kozma_oravecz": ko, "steinerberger": st}
    if tr is not None:
        radii["torus_radius"] = tr
    winner = min(radii, key=lambda k: (radii[k], k))
    inv_sum = st / n**1.5
    if tr is not None and inv_sum > 1.0 / (2 * n) and not tr < st:
        raise AssertionError(f"torus radius {tr} does not improve on {st}")
    return BoundReport(spectrum, n, p, babenko, sign_change, tr, ko, st,
                       torus_diameter(n), winner, tuple(notes))
