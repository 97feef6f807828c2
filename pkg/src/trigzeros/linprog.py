"""Dense two-phase revised simplex and the hull/positivity certificate pair.

The solver works on the standard form ``min c.x, A x = b, x >= 0`` after
rewriting row senses and variable bounds.  Problems here have few rows and
many columns (one column per sample point), so the basis is kept as a small
dense matrix and refactorized at every pivot.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

FEAS_TOL = 1e-9
DEFAULT_MARGIN = 1e-6
MAX_ITER = 100_000
STALL_PIVOTS = 50
# certificate routines pivot by largest reduced cost (Bland after a stall);
# pure Bland needs ~1000x more pivots on dense sample LPs
CERT_RULE = "dantzig"


class LpError(RuntimeError):
    """Numerical breakdown of the simplex method."""


class IterationLimit(LpError):
    pass


class DualityError(AssertionError):
    """The hull certificate and the positivity LP disagree beyond tolerance."""


@dataclass
class LpProblem:
    """``optimize c.x  s.t.  A[i] . x (sense_i) b[i],  lo <= x <= hi``.

    ``senses`` entries are ``"<="``, ``"="`` or ``">="``; ``bounds`` holds one
    ``(lo, hi)`` pair per variable, with ``None`` or an infinite value for a
    missing bound.  The default bound is ``(0, None)``.
    """

    c: np.ndarray
    A: np.ndarray
    senses: Sequence[str]
    b: np.ndarray
    bounds: Optional[Sequence[tuple]] = None
    maximize: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.A = np.asarray(self.A, dtype=float).reshape(-1, self.c.size)
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.senses = list(self.senses)
        m, n = self.A.shape
        if self.b.size != m or len(self.senses) != m:
            raise ValueError("constraint matrix, senses and rhs disagree in length")
        if any(s not in ("<=", "=", ">=") for s in self.senses):
            raise ValueError(f"unknown row sense in {self.senses}")
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        if len(self.bounds) != n:
            raise ValueError("need one bound pair per variable")
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.A))
                and np.all(np.isfinite(self.b))):
            raise ValueError("LP data must be finite")


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    duals: Optional[np.ndarray] = None
    # phase-one duals when infeasible: y with y.A_j <= 0 on the standard form
    # columns and y.b > 0
    farkas: Optional[np.ndarray] = None
    iterations: int = 0


def _finite(v) -> bool:
    return v is not None and math.isfinite(v)


def _standardize(p: LpProblem):
    """Rewrite ``p`` as ``min cs.y, As y = bs, y >= 0`` with ``x = x0 + T y``."""
    m, n = p.A.shape
    cols, x0 = [], np.zeros(n)
    extra_rows = []  # (column index in T, upper bound) for boxed variables
    for j, (lo, hi) in enumerate(p.bounds):
        e = np.zeros(n)
        e[j] = 1.0
        if _finite(lo):
            x0[j] = lo
            cols.append(e)
            if _finite(hi):
                if hi < lo:
                    raise ValueError(f"variable {j} has empty bounds")
                extra_rows.append((len(cols) - 1, hi - lo))
        elif _finite(hi):
            x0[j] = hi
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    T = np.array(cols).T.reshape(n, -1)
    k = T.shape[1]
    A = p.A @ T
    b = p.b - p.A @ x0
    senses = list(p.senses)
    for col, ub in extra_rows:
        row = np.zeros(k)
        row[col] = 1.0
        A = np.vstack([A, row])
        b = np.append(b, ub)
        senses.append("<=")
    n_slack = sum(s != "=" for s in senses)
    S = np.zeros((A.shape[0], n_slack))
    j = 0
    for i, s in enumerate(senses):
        if s == "<=":
            S[i, j] = 1.0
            j += 1
        elif s == ">=":
            S[i, j] = -1.0
            j += 1
    As = np.hstack([A, S])
    sign = np.where(b < 0, -1.0, 1.0)
    As = As * sign[:, None]
    bs = b * sign
    c = -p.c if p.maximize else p.c
    cs = np.concatenate([c @ T, np.zeros(n_slack)])
    return As, bs, cs, T, x0, sign


class _Simplex:
    """Revised simplex state on a standard-form problem."""

    def __init__(self, A, b, rule, tol, max_iter):
        self.A, self.b = A, b
        self.rule, self.tol, self.max_iter = rule, tol, max_iter
        self.iterations = 0

    def _solve(self, basis, rhs, transpose=False):
        B = self.A[:, basis]
        try:
            return np.linalg.solve(B.T if transpose else B, rhs)
        except np.linalg.LinAlgError as exc:
            raise LpError(f"singular basis (cond={np.linalg.cond(B):.3g})") from exc

    def run(self, c, basis, allowed):
        """Iterate to optimality; returns ``"optimal"`` or ``"unbounded"``."""
        tol = self.tol
        A = self.A
        rule = self.rule
        best_obj, stall = math.inf, 0
        while True:
            if self.iterations >= self.max_iter:
                raise IterationLimit(f"no convergence within {self.max_iter} pivots")
            xB = self._solve(basis, self.b)
            y = self._solve(basis, c[basis], transpose=True)
            d = c - y @ A
            d[basis] = 0.0
            d[~allowed] = 0.0
            candidates = np.flatnonzero(d < -tol)
            if candidates.size == 0:
                return "optimal"
            if rule == "dantzig":
                obj = float(c[basis] @ xB)
                if obj < best_obj - tol:
                    best_obj, stall = obj, 0
                else:
                    stall += 1
                    if stall > STALL_PIVOTS:
                        # degenerate run; Bland's rule cannot cycle
                        rule = "bland"
            if rule == "bland":
                q = candidates[0]
            else:
                q = candidates[np.argmin(d[candidates])]
            u = self._solve(basis, A[:, q])
            pos = np.flatnonzero(u > tol)
            if pos.size == 0:
                return "unbounded"
            ratios = np.maximum(xB[pos], 0.0) / u[pos]
            best = ratios.min()
            ties = pos[ratios <= best + tol * max(1.0, abs(best))]
            # lowest variable index among the tied rows
            r = ties[np.argmin(np.asarray(basis)[ties])]
            basis[r] = q
            self.iterations += 1


def solve_lp(
    p: LpProblem,
    rule: str = "bland",
    tol: float = FEAS_TOL,
    max_iter: int = MAX_ITER,
) -> LpResult:
    """Solve ``p`` with a two-phase dense simplex.

    ``rule`` is ``"bland"`` (smallest improving index; terminates) or
    ``"dantzig"`` (most negative reduced cost, switching to Bland after
    ``STALL_PIVOTS`` pivots without progress).  Ratio-test ties go to the
    lowest basic index.
    """
    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    As, bs, cs, T, x0, sign = _standardize(p)
    m, k = As.shape
    # phase one: one artificial per row
    A1 = np.hstack([As, np.eye(m)])
    c1 = np.concatenate([np.zeros(k), np.ones(m)])
    sx = _Simplex(A1, bs, rule, tol, max_iter)
    basis = list(range(k, k + m))
    allowed = np.ones(k + m, dtype=bool)
    sx.run(c1, basis, allowed)
    xB = sx._solve(basis, bs)
    infeas = float(c1[basis] @ xB)
    if infeas > tol * max(1.0, np.abs(bs).max(initial=0.0)):
        y = sx._solve(basis, c1[basis], transpose=True)
        return LpResult("infeasible", farkas=y * sign, iterations=sx.iterations)

    # drive zero-level artificials out of the basis; drop redundant rows
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if basis[r] < k:
            continue
        row = sx._solve(basis, np.eye(m)[r], transpose=True) @ As
        row[[j for j in basis if j < k]] = 0.0
        j = np.flatnonzero(np.abs(row) > 1e-7)
        if j.size:
            basis[r] = int(j[0])
        else:
            keep[r] = False
    rows = np.flatnonzero(keep)
    basis = [basis[r] for r in rows]
    A2, b2 = As[rows], bs[rows]
    sx2 = _Simplex(A2, b2, rule, tol, max_iter - sx.iterations)
    allowed = np.ones(k, dtype=bool)
    status = sx2.run(cs, basis, allowed)
    iterations = sx.iterations + sx2.iterations
    if status == "unbounded":
        return LpResult("unbounded", iterations=iterations)
    xs = np.zeros(k)
    xs[basis] = sx2._solve(basis, b2)
    xs = np.maximum(xs, 0.0)
    x = x0 + T @ xs[: T.shape[1]]
    y = np.zeros(m)
    y[rows] = sx2._solve(basis, cs[basis], transpose=True)
    y = y * sign
    # duals for the rows of the original problem only (box rows are appended)
    y = y[: p.A.shape[0]]
    obj = float(p.c @ x)
    if p.maximize:
        y = -y
    return LpResult("optimal", x=x, objective=obj, duals=y, iterations=iterations)


# --------------------------------------------------------------------------
# hull certificates


@dataclass
class HullCertificate:
    """Either ``0 = sum w_i v_i`` with ``w`` in the simplex, or a functional
    ``a`` with ``<a, v_i> > 0`` for every point.

    ``residual`` is ``||sum w_i v_i||_inf`` for ``"inside"`` and the recomputed
    separation margin ``min_i <a, v_i>`` for ``"separated"``.
    """

    verdict: str  # "inside" | "separated"
    residual: float
    weights: Optional[np.ndarray] = None
    functional: Optional[np.ndarray] = None

    @property
    def inside(self) -> bool:
        return self.verdict == "inside"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "weights": [] if self.weights is None else [float(w) for w in self.weights],
            "functional": [] if self.functional is None else [float(a) for a in self.functional],
            "residual": float(self.residual),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "HullCertificate":
        return cls(
            doc["verdict"],
            float(doc["residual"]),
            np.array(doc["weights"]) if doc["verdict"] == "inside" else None,
            np.array(doc["functional"]) if doc["verdict"] == "separated" else None,
        )

    def check(self, points, tol: float = 1e-8) -> bool:
        """Re-verify the certificate against ``points`` from stored data alone."""
        V = np.asarray(points, dtype=float)
        if self.inside:
            w = self.weights
            return bool(
                np.all(w >= -1e-12)
                and abs(w.sum() - 1.0) <= 1e-9
                and np.abs(w @ V).max() <= tol
            )
        return bool((V @ self.functional).min() > 0.0)


def _points_matrix(points) -> np.ndarray:
    V = np.asarray(points, dtype=float)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    if V.shape[0] == 0:
        raise ValueError("need at least one point")
    if not np.all(np.isfinite(V)):
        raise ValueError("points must be finite")
    return V


def origin_in_hull(points, tol: float = 1e-9, rule: str = CERT_RULE) -> HullCertificate:
    """Decide whether the origin lies in the convex hull of ``points``.

    Solves ``sum w_i v_i = 0, sum w_i = 1, w >= 0``.  When phase one fails, its
    dual gives a strictly separating functional, scaled to unit max-norm.
    """
    V = _points_matrix(points)
    N, d = V.shape
    A = np.vstack([V.T, np.ones(N)])
    b = np.zeros(d + 1)
    b[-1] = 1.0
    res = solve_lp(LpProblem(np.zeros(N), A, ["="] * (d + 1), b), rule=rule)
    if res.status == "optimal":
        w = np.maximum(res.x, 0.0)
        w = w / w.sum()
        resid = float(np.abs(w @ V).max())
        if resid <= tol:
            return HullCertificate("inside", resid, weights=w)
        logger.info("hull LP feasible but residual %.3g > tol; separating instead", resid)
        a, margin = max_separation(V, rule)
        return HullCertificate("separated", margin, functional=a)
    a = -res.farkas[:d]
    scale = np.abs(a).max()
    if scale > 0:
        a = a / scale
    margin = float((V @ a).min()) if scale > 0 else 0.0
    if margin <= 0.0:
        # phase-one dual too weak numerically; fall back to the max-margin LP
        a, margin = max_separation(V, rule)
    return HullCertificate("separated", margin, functional=a)


def max_separation(points, rule: str = CERT_RULE) -> tuple[np.ndarray, float]:
    """Largest ``t`` with ``<a, v_i> >= t`` for all i over ``||a||_inf <= 1``.

    Solved through its dual, ``min ||sum w_i v_i||_1`` over the simplex, which
    has one row per coordinate instead of one per point.  Returns ``(a, t)``;
    ``t`` is zero (up to rounding) when the origin is in the hull.
    """
    V = _points_matrix(points)
    N, d = V.shape
    # columns: w (N), mu_plus (d), mu_minus (d)
    A = np.zeros((d + 1, N + 2 * d))
    A[:d, :N] = V.T
    A[:d, N:N + d] = -np.eye(d)
    A[:d, N + d:] = np.eye(d)
    A[d, :N] = 1.0
    b = np.zeros(d + 1)
    b[-1] = 1.0
    c = np.concatenate([np.zeros(N), np.ones(2 * d)])
    res = solve_lp(LpProblem(c, A, ["="] * (d + 1), b), rule=rule)
    if res.status != "optimal":
        raise LpError(f"separation LP ended {res.status}")
    a = np.clip(-res.duals[:d], -1.0, 1.0)
    return a, float((V @ a).min())


def certify(points, margin: float = DEFAULT_MARGIN) -> tuple[Optional[np.ndarray], HullCertificate]:
    """Run both sides of the duality: the max-margin functional and the hull LP.

    Returns ``(a, hull)`` where ``a`` has ``||a||_inf <= 1`` and
    ``<a, v_i> >= margin`` for all i, or is None.  A contradiction between the
    two answers beyond tolerance raises :class:`DualityError`.
    """
    if margin < FEAS_TOL:
        raise ValueError(f"margin {margin} is below the feasibility tolerance {FEAS_TOL}")
    V = _points_matrix(points)
    a, t = max_separation(V)
    found = a if t >= margin - FEAS_TOL else None
    hull = origin_in_hull(V)
    d = V.shape[1]
    if found is not None and hull.inside and t > d * (FEAS_TOL + hull.residual):
        raise DualityError(
            f"positive functional with margin {t:.3g} but hull residual {hull.residual:.3g}"
        )
    if found is None and not hull.inside and hull.residual >= margin + FEAS_TOL:
        raise DualityError(
            f"hull separated with margin {hull.residual:.3g} but max margin LP gave {t:.3g}"
        )
    if found is None and not hull.inside:
        logger.info("degenerate instance: separated with margin %.3g < %.3g", hull.residual, margin)
    return found, hull


def separate_points(points, margin: float = DEFAULT_MARGIN) -> Optional[np.ndarray]:
    """Functional ``a`` with ``||a||_inf <= 1`` and ``<a, v_i> >= margin``, or None."""
    return certify(points, margin)[0]


def positivity_feasible(spectrum, sample, margin: float = DEFAULT_MARGIN) -> Optional[np.ndarray]:
    """Coefficients of a trig polynomial with spectrum ``spectrum`` that is at
    least ``margin`` on every sample point, or None if there is none."""
    from .trig import curve_from_spectrum

    pts = np.asarray(sample, dtype=float)
    if pts.size == 0:
        raise ValueError("sample must be nonempty")
    if spectrum.n == 1:
        pts = pts.reshape(-1, 1)
    return separate_points(curve_from_spectrum(spectrum, pts), margin)


# --------------------------------------------------------------------------
# Caratheodory reduction


@dataclass
class Reduction:
    indices: np.ndarray
    weights: np.ndarray
    residual: float = field(default=0.0)


def caratheodory_reduce(points, weights, target=None, tol: float = 1e-9) -> Reduction:
    """Shrink a convex combination to at most ``d + 1`` points.

    Repeatedly takes an affine dependence ``mu`` of the active points (a null
    vector of the stacked ``[V^T; 1]``) and moves weight along it until one
    weight hits zero.  Zero weights are dropped up front.
    """
    V = _points_matrix(points)
    N, d = V.shape
    w = np.asarray(weights, dtype=float).ravel().copy()
    if w.size != N:
        raise ValueError("one weight per point required")
    if np.any(w < -1e-12):
        raise ValueError("weights must be nonnegative")
    target = np.zeros(d) if target is None else np.asarray(target, dtype=float).ravel()
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1")
    idx = np.flatnonzero(w > 0)
    w = w[idx]
    while idx.size > d + 1:
        M = np.vstack([V[idx].T, np.ones(idx.size)])
        _, s, vt = np.linalg.svd(M)
        mu = vt[-1]
        if mu.max() <= 0:
            mu = -mu
        pos = mu > 1e-14 * np.abs(mu).max()
        if not pos.any():
            raise LpError("degenerate affine dependence")
        ratio = w[pos] / mu[pos]
        step = ratio.min()
        w = w - step * mu
        w[np.flatnonzero(pos)[np.argmin(ratio)]] = 0.0
        keep = w > 1e-15
        idx, w = idx[keep], w[keep]
    w = np.maximum(w, 0.0)
    w = w / w.sum()
    resid = float(np.abs(w @ V[idx] - target).max())
    if resid > tol:
        raise LpError(f"reduction lost accuracy: residual {resid:.3g}")
    return Reduction(idx, w, resid)
