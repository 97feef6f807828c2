"""Trigonometric polynomials on the circle and the flat torus.

Points on the n-torus are plain arrays of shape ``(n,)`` (or ``(N, n)`` for a
batch) with coordinates read modulo 1.  A frequency is a tuple of nonnegative
integers, a :class:`Spectrum` an ordered set of them, and a :class:`TrigPoly`
attaches a (cosine, sine) coefficient pair to each frequency::

    f(x) = sum_alpha a_alpha cos(2 pi <alpha, x>) + b_alpha sin(2 pi <alpha, x>)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

TWO_PI = 2.0 * math.pi
BOUNDARY_TOL = 1e-12

Frequency = tuple


def _as_frequency(alpha) -> tuple:
    if isinstance(alpha, (int, np.integer)):
        alpha = (int(alpha),)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) == 0:
        raise ValueError("frequency must have at least one entry")
    if any(a < 0 for a in alpha):
        raise ValueError(f"frequency {alpha} has a negative entry")
    if all(a == 0 for a in alpha):
        raise ValueError("the zero frequency is not allowed")
    return alpha


@dataclass(frozen=True)
class Spectrum:
    """Nonempty, duplicate-free, lexicographically sorted set of frequencies."""

    n: int
    freqs: tuple

    def __post_init__(self):
        freqs = tuple(_as_frequency(a) for a in self.freqs)
        if not freqs:
            raise ValueError("spectrum must be nonempty")
        if any(len(a) != self.n for a in freqs):
            raise ValueError(f"all frequencies must have dimension {self.n}")
        if len(set(freqs)) != len(freqs):
            raise ValueError("duplicate frequency in spectrum")
        object.__setattr__(self, "freqs", tuple(sorted(freqs)))

    @classmethod
    def of(cls, freqs: Iterable) -> "Spectrum":
        """Build a spectrum from ints (univariate) or integer tuples."""
        freqs = [_as_frequency(a) for a in freqs]
        if not freqs:
            raise ValueError("spectrum must be nonempty")
        return cls(len(freqs[0]), tuple(freqs))

    @classmethod
    def initial(cls, d: int) -> "Spectrum":
        """The univariate spectrum {1, ..., d}."""
        return cls.of(range(1, d + 1))

    def __len__(self) -> int:
        return len(self.freqs)

    @property
    def matrix(self) -> np.ndarray:
        """Frequencies as an integer array of shape ``(|S|, n)``."""
        return np.array(self.freqs, dtype=float)

    @property
    def dim(self) -> int:
        """Ambient dimension 2|S| of the curve."""
        return 2 * len(self.freqs)

    @property
    def max_entry(self) -> int:
        return max(max(a) for a in self.freqs)

    def univariate(self) -> list[int]:
        if self.n != 1:
            raise ValueError("spectrum is not univariate")
        return [a[0] for a in self.freqs]

    def to_dict(self) -> dict:
        return {"n": self.n, "terms": [{"alpha": list(a)} for a in self.freqs]}

    @classmethod
    def from_dict(cls, doc: dict) -> "Spectrum":
        return cls(int(doc["n"]), tuple(tuple(t["alpha"]) for t in doc["terms"]))

    def __str__(self) -> str:
        if self.n == 1:
            return ",".join(str(a[0]) for a in self.freqs)
        return ";".join(",".join(map(str, a)) for a in self.freqs)


def parse_spectrum(text: str) -> Spectrum:
    """Parse ``"1,2,3"`` (univariate) or ``"1,0;0,1;1,1"`` (multivariate)."""
    text = text.strip()
    if ";" in text:
        parts = [p for p in text.split(";") if p.strip()]
        return Spectrum.of(tuple(int(v) for v in p.split(",")) for p in parts)
    return Spectrum.of(int(v) for v in text.split(",") if v.strip())


@dataclass(frozen=True)
class TrigPoly:
    """Real trigonometric polynomial without constant term.

    ``coeffs[i] = (a, b)`` pairs with ``spectrum.freqs[i]``; ``a`` multiplies the
    cosine and ``b`` the sine.  Zero pairs are allowed, in which case the spectrum
    is taken as declared rather than as the support of ``f``.
    """

    spectrum: Spectrum
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple((float(a), float(b)) for a, b in self.coeffs)
        if len(coeffs) != len(self.spectrum):
            raise ValueError("coefficient list must align with the spectrum")
        if not all(math.isfinite(v) for pair in coeffs for v in pair):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_vector(cls, spectrum: Spectrum, vec: Sequence[float]) -> "TrigPoly":
        """Inverse of :attr:`vector` (the curve-coordinate functional)."""
        vec = np.asarray(vec, dtype=float).reshape(-1, 2)
        return cls(spectrum, tuple(map(tuple, vec)))

    @classmethod
    def from_terms(cls, terms: dict) -> "TrigPoly":
        """``{alpha: (a, b)}`` with int or tuple keys."""
        spectrum = Spectrum.of(terms.keys())
        lookup = {_as_frequency(k): v for k, v in terms.items()}
        return cls(spectrum, tuple(lookup[a] for a in spectrum.freqs))

    @property
    def n(self) -> int:
        return self.spectrum.n

    @property
    def vector(self) -> np.ndarray:
        """Coefficients flattened as (a_1, b_1, a_2, b_2, ...)."""
        return np.array(self.coeffs, dtype=float).ravel()

    def __call__(self, x) -> Union[float, np.ndarray]:
        return evaluate(self, x)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"alpha": list(alpha), "a": a, "b": b}
                for alpha, (a, b) in zip(self.spectrum.freqs, self.coeffs)
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TrigPoly":
        spectrum = Spectrum(int(doc["n"]), tuple(tuple(t["alpha"]) for t in doc["terms"]))
        lookup = {tuple(t["alpha"]): (t.get("a", 0.0), t.get("b", 0.0)) for t in doc["terms"]}
        return cls(spectrum, tuple(lookup[a] for a in spectrum.freqs))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TrigPoly":
        return cls.from_dict(json.loads(text))


def _points(x, n: int) -> tuple[np.ndarray, bool]:
    """Return ``(N, n)`` array of points and whether the input was a single point."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if n == 1 and arr.ndim == 1:
        # a single 1-point or a batch of circle points
        single = arr.shape[0] == 1 and np.ndim(x) == 0
        return arr.reshape(-1, 1), single
    if arr.ndim == 1:
        if arr.shape[0] != n:
            raise ValueError(f"point has dimension {arr.shape[0]}, expected {n}")
        return arr.reshape(1, n), True
    if arr.ndim != 2 or arr.shape[1] != n:
        raise ValueError(f"points have shape {arr.shape}, expected (N, {n})")
    return arr, False


def _phases(spectrum: Spectrum, pts: np.ndarray) -> np.ndarray:
    # reduce <alpha, x> mod 1 before scaling so large frequencies keep precision
    inner = pts @ spectrum.matrix.T
    return TWO_PI * (inner - np.floor(inner))


def evaluate(f: TrigPoly, x) -> Union[float, np.ndarray]:
    """Evaluate ``f`` at a point, or at each row of an ``(N, n)`` array.

    For ``n == 1`` a 1-d array is read as a batch of circle points.
    """
    pts, single = _points(x, f.n)
    phase = _phases(f.spectrum, pts)
    coeffs = np.array(f.coeffs)
    values = np.cos(phase) @ coeffs[:, 0] + np.sin(phase) @ coeffs[:, 1]
    return float(values[0]) if single else values


def curve_from_spectrum(spectrum: Spectrum, x) -> np.ndarray:
    """The curve x -> (cos 2pi<alpha,x>, sin 2pi<alpha,x>)_alpha in spectrum order.

    Returns shape ``(2|S|,)`` for a single point and ``(N, 2|S|)`` for a batch.
    """
    pts, single = _points(x, spectrum.n)
    phase = _phases(spectrum, pts)
    out = np.empty((pts.shape[0], 2 * len(spectrum)))
    out[:, 0::2] = np.cos(phase)
    out[:, 1::2] = np.sin(phase)
    return out[0] if single else out


def rotate(f: TrigPoly, shift) -> TrigPoly:
    """Return g with ``g(x) = f(x + shift)``."""
    s = np.asarray(shift, dtype=float).reshape(f.n)
    theta = TWO_PI * (f.spectrum.matrix @ s)
    c, sn = np.cos(theta), np.sin(theta)
    ab = np.array(f.coeffs)
    a = ab[:, 0] * c + ab[:, 1] * sn
    b = -ab[:, 0] * sn + ab[:, 1] * c
    return TrigPoly(f.spectrum, tuple(zip(a, b)))


def circle_distance(s, t):
    """Geodesic distance on the circle of circumference 1."""
    diff = np.mod(np.asarray(s, dtype=float) - np.asarray(t, dtype=float), 1.0)
    dist = np.minimum(diff, 1.0 - diff)
    return float(dist) if np.ndim(dist) == 0 else dist


def torus_distance(x, y):
    """Flat-torus distance: l2 norm of the per-coordinate circle distances.

    Broadcasts over leading axes; the last axis is the coordinate axis.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1:] != y.shape[-1:] and x.ndim and y.ndim:
        raise ValueError("points must have the same dimension")
    if x.ndim == 0 or y.ndim == 0:
        return circle_distance(x, y)
    dist = np.sqrt(np.sum(circle_distance(x, y) ** 2, axis=-1))
    return float(dist) if np.ndim(dist) == 0 else dist


def torus_diameter(n: int) -> float:
    return 0.5 * math.sqrt(n)


def mean(f: TrigPoly, quadrature_resolution: int) -> float:
    """Mean of ``f`` over the torus by the equispaced product rule.

    The rule is exact for every frequency below the Nyquist limit, so the result
    is zero up to rounding.
    """
    r = int(quadrature_resolution)
    if r < 2 * f.spectrum.max_entry + 1:
        raise ValueError(
            f"resolution {r} too small; need at least {2 * f.spectrum.max_entry + 1}"
        )
    axes = [np.arange(r) / r] * f.n
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, f.n)
    return float(np.mean(evaluate(f, grid)))


@dataclass(frozen=True)
class Interval:
    """Closed arc ``{start + s mod 1 : 0 <= s <= length}``."""

    start: float
    length: float

    def __post_init__(self):
        if not 0.0 <= self.length <= 1.0:
            raise ValueError("interval length must lie in [0, 1]")
        object.__setattr__(self, "start", float(self.start) % 1.0)
        object.__setattr__(self, "length", float(self.length))

    @property
    def n(self) -> int:
        return 1

    def grid(self, per_unit: int) -> np.ndarray:
        """Equispaced points covering the arc, endpoints included.

        The spacing is at most ``1 / per_unit``; a full circle omits the
        duplicate endpoint.
        """
        if self.length >= 1.0:
            m = max(int(per_unit), 1)
            return np.arange(m) / m
        m = max(int(math.ceil(per_unit * self.length - 1e-9)), 1)
        return np.mod(self.start + self.length * np.arange(m + 1) / m, 1.0)

    def to_dict(self) -> dict:
        return {"type": "interval", "start": self.start, "length": self.length}


@dataclass(frozen=True)
class GeodesicBall:
    center: tuple
    radius: float

    def __post_init__(self):
        center = tuple(float(c) % 1.0 for c in np.atleast_1d(self.center))
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if self.radius > torus_diameter(len(center)) + BOUNDARY_TOL:
            raise ValueError("radius exceeds the torus diameter")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def n(self) -> int:
        return len(self.center)

    def grid(self, per_axis: int) -> np.ndarray:
        """Points of the product grid ``(k / per_axis)`` that lie in the ball."""
        axes = [np.arange(per_axis) / per_axis] * self.n
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.n)
        return pts[contains(self, pts)]

    def to_dict(self) -> dict:
        return {"type": "ball", "center": list(self.center), "radius": self.radius}


Region = Union[Interval, GeodesicBall]


def region_from_dict(doc: dict) -> Region:
    if doc["type"] == "interval":
        return Interval(doc["start"], doc["length"])
    return GeodesicBall(tuple(doc["center"]), doc["radius"])


def contains(region: Region, x, tol: float = BOUNDARY_TOL):
    """Closed containment with a symmetric boundary tolerance.

    Accepts a single point or a batch; returns a bool or a bool array.
    """
    if isinstance(region, Interval):
        t = np.asarray(x, dtype=float)
        if t.ndim == 2:
            if t.shape[1] != 1:
                raise ValueError("intervals live on the circle")
            t = t[:, 0]
        offset = np.mod(t - region.start, 1.0)
        inside = (offset <= region.length + tol) | (offset >= 1.0 - tol)
    else:
        pts, single = _points(x, region.n)
        inside = torus_distance(pts, np.array(region.center)) <= region.radius + tol
        if single:
            inside = inside[0]
    return bool(inside) if np.ndim(inside) == 0 else inside
