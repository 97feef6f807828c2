"""The acceptance battery: one check per headline claim of the package.

Each check returns a :class:`Check` whose ``detail`` string holds the measured
numbers.  Details never contain timings, so two runs with the same seed give
identical reports; wall-clock limits enter only through ``passed``.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bounds import (
    compare_bounds,
    torus_radius,
    torus_radius_max_spectrum,
    verify_grid_property,
)
from .caratheodory import decompose_origin
from .cubature import equispaced_rule, gauss_legendre_rule, rule_from_certificate, tchakaloff
from .linprog import DualityError, origin_in_hull, positivity_feasible
from .trig import GeodesicBall, Interval, Spectrum, curve_from_spectrum
from .witness import (
    DEFAULT_GRID_1D,
    babenko_threshold,
    ball_positivity,
    interval_positivity,
    min_diameter_sign_change,
    rotation_verdicts,
    verdict_of,
)

DUALITY_BAND = 1e-7
DUALITY_CASES = 500
BOUND_CASES = 20
MOD_P_ROTATIONS = 16


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed, "detail": self.detail}


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def check_babenko(seed: int = 0, jobs: int = 1) -> tuple[bool, str]:
    parts, ok = [], True
    for d in (1, 2, 3):
        t0 = time.perf_counter()
        res = babenko_threshold(Spectrum.initial(d), tol=5e-3, grid_resolution=DEFAULT_GRID_1D)
        fast = time.perf_counter() - t0 < 60.0
        good = abs(res.length - d / (d + 1)) <= 0.01 and fast and not res.indeterminate
        ok &= good
        parts.append(f"d={d} L*={_fmt(res.length)} target={_fmt(d / (d + 1))}")
    return ok, "; ".join(parts)


def check_sign_change_diameter(seed: int = 0, jobs: int = 1) -> tuple[bool, str]:
    parts, ok = [], True
    for freqs, target, tol in (([1], 1 / 3, 0.01), ([1, 3], 2 / 5, 0.015)):
        S = Spectrum.of(freqs)
        t0 = time.perf_counter()
        res = min_diameter_sign_change(S, grid_size=105)
        fast = time.perf_counter() - t0 < 300.0
        good = abs(res.delta - target) <= tol and fast and res.certificate.residual <= 1e-8
        ok &= good
        parts.append(f"S={S} delta={_fmt(res.delta)} target={_fmt(target)}")
    return ok, "; ".join(parts)


def check_decomposition(seed: int = 0, jobs: int = 1) -> tuple[bool, str]:
    parts, ok = [], True
    for d in (1, 2, 3):
        dec = decompose_origin(Spectrum.initial(d))
        good = (
            dec.params.size <= d + 1
            and dec.residual <= 1e-8
            and dec.span_length <= d / (d + 1) + 2e-3
        )
        ok &= good
        parts.append(f"d={d} points={dec.params.size} span={_fmt(dec.span_length)} residual={dec.residual:.1e}")
    return ok, "; ".join(parts)


def check_torus_radius(seed: int = 0, jobs: int = 1) -> tuple[bool, str]:
    S = Spectrum.of([(1, 0), (0, 1), (1, 1)])
    r = math.sqrt(10.0) / 6.0
    closed = abs(torus_radius(2, 3) - r) <= 1e-12
    big = verdict_of(ball_positivity(S, GeodesicBall((0.5, 0.5), r), 64))
    small = verdict_of(ball_positivity(S, GeodesicBall((0.5, 0.5), 0.05), 64))
    ok = closed and big == "infeasible" and small == "witness"
    return ok, f"r={_fmt(r)} at r: {big}; at 0.05: {small}; closed form match={closed}"


def check_grid_lemma(seed: int = 0, jobs: int = 1) -> tuple[bool, str]:
    failed = []
    for n in (1, 2, 3):
        for p in (2, 3, 5, 7):
            if not verify_grid_property(n, p).passed:
                failed.append(f"({n},{p})")
    cover = verify_grid_property(1, 3).cover_distances
    exact = bool(np.all(np.abs(cover - 1 / 6) <= 1e-12))
    ok = not failed and exact
    return ok, f"12 cases, failures={failed or 'none'}; (1,3) cover={_fmt(cover.max())}"


def check_cubature(seed: int = 0, jobs: int = 1) -> tuple[bool, str]:
    ok = True
    eq = max(equispaced_rule(d).max_residual for d in range(1, 9))
    ok &= eq <= 1e-12 and all(len(equispaced_rule(d)) == d + 1 < 2 * d + 1 for d in range(1, 9))
    tch_resid, tch_ok = 0.0, True
    for freqs in ([1], [1, 2], [1, 3], [1, 2, 3], [(1, 0), (0, 1)], [(1, 0), (0, 1), (1, 1)]):
        S = Spectrum.of(freqs)
        rule = tchakaloff(S, 32 if S.n == 2 else 64)
        tch_ok &= len(rule) <= 2 * len(S) + 1
        tch_resid = max(tch_resid, rule.max_residual)
    ok &= tch_ok and tch_resid <= 1e-9
    gl = max(gauss_legendre_rule(m).max_residual for m in range(1, 17))
    ok &= gl <= 1e-10
    S13 = Spectrum.of([1, 3])
    cert = min_diameter_sign_change(S13, grid_size=105).certificate
    pent = rule_from_certificate(cert, S13).max_residual
    ok &= pent <= 1e-7
    return ok, (
        f"equispaced max residual={eq:.1e}; tchakaloff max residual={tch_resid:.1e}; "
        f"gauss-legendre max residual={gl:.1e}; pentagon residual={pent:.1e}"
    )


def _random_case(rng: np.random.Generator):
    n = int(rng.integers(1, 3))
    size = int(rng.integers(1, 5))  # curve dimension 2|S| <= 8
    pool = set()
    while len(pool) < size:
        alpha = tuple(int(v) for v in rng.integers(0, 9 if n == 1 else 4, size=n))
        if any(alpha):
            pool.add(alpha)
    S = Spectrum.of(sorted(pool))
    k = int(rng.integers(1, 4 * size + 3))
    spread = float(rng.uniform(0.05, 1.0))
    sample = np.mod(rng.uniform(0, 1, n) + spread * rng.uniform(0, 1, (k, n)), 1.0)
    return S, sample if n > 1 else sample[:, 0]


def check_duality(seed: int = 0, jobs: int = 1) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    inside = separated = band = errors = 0
    worst = 0.0
    for _ in range(DUALITY_CASES):
        S, sample = _random_case(rng)
        V = curve_from_spectrum(S, sample.reshape(len(sample), S.n))
        hull = origin_in_hull(V)
        try:
            a = positivity_feasible(S, sample, margin=DUALITY_BAND)
        except DualityError:
            errors += 1
            continue
        if hull.inside:
            inside += 1
            worst = max(worst, hull.residual)
            errors += a is not None
        elif hull.residual < DUALITY_BAND:
            band += 1
        else:
            separated += 1
            errors += a is None
    ok = errors == 0 and worst <= 1e-9
    return ok, (
        f"{DUALITY_CASES} cases: inside={inside} separated={separated} band={band} "
        f"contradictions={errors}; worst inside residual={worst:.1e}"
    )


def check_mod_p(seed: int = 0, jobs: int = 1) -> tuple[bool, str]:
    S = Spectrum.of([1, 6])
    starts = [k / MOD_P_ROTATIONS for k in range(MOD_P_ROTATIONS)]
    verdicts = rotation_verdicts(S, 0.5, starts, jobs=jobs)
    blocked = sum(v == "infeasible" for v in verdicts)
    short = verdict_of(interval_positivity(S, Interval(0.0, 0.45)))
    ok = blocked == len(starts) and short == "witness"
    return ok, f"length 0.5: infeasible at {blocked}/{len(starts)} rotations; length 0.45: {short}"


def _random_bound_case(rng: np.random.Generator):
    cap = 0
    while cap < 1:
        n = int(rng.integers(1, 3))
        p = int(rng.choice([3, 5, 7]))
        cap = torus_radius_max_spectrum(n, p)
    size = int(rng.integers(1, min(cap, 4) + 1))
    pool = set()
    while len(pool) < size:
        alpha = tuple(int(v) for v in rng.integers(0, 6, size=n))
        if any(a % p for a in alpha):
            pool.add(alpha)
    return Spectrum.of(sorted(pool)), n, p


def check_bound_comparison(seed: int = 0, jobs: int = 1) -> tuple[bool, str]:
    rng = np.random.default_rng(seed + 1)
    accepted = wins = 0
    tried = 0
    while accepted < BOUND_CASES:
        tried += 1
        S, n, p = _random_bound_case(rng)
        inv = sum(1.0 / math.sqrt(sum(v * v for v in a)) for a in S.freqs)
        if inv <= 1.0 / (2 * n):
            continue
        accepted += 1
        try:
            rep = compare_bounds(S, n, p)
        except AssertionError:
            continue
        wins += rep.torus_radius is not None and rep.torus_radius < rep.steinerberger
    return wins == BOUND_CASES, f"{wins}/{BOUND_CASES} spectra with torus radius below steinerberger ({tried} drawn)"


CHECKS: list[tuple[int, str, Callable]] = [
    (1, "arc-length phase transition", check_babenko),
    (2, "sign-change diameter", check_sign_change_diameter),
    (3, "short convex combination", check_decomposition),
    (4, "torus radius", check_torus_radius),
    (5, "grid covering", check_grid_lemma),
    (6, "cubature exactness", check_cubature),
    (7, "hull/positivity duality", check_duality),
    (8, "mod-p interval bound", check_mod_p),
    (9, "bound comparison", check_bound_comparison),
]


def run_suite(seed: int = 0, jobs: int = 1, only=None) -> list[Check]:
    out = []
    for number, name, fn in CHECKS:
        if only is not None and number not in only:
            continue
        t0 = time.perf_counter()
        try:
            passed, detail = fn(seed=seed, jobs=jobs)
        except Exception as exc:  # a crash is a failed criterion, not a crashed battery
            passed, detail = False, f"error: {type(exc).__name__}: {exc}"
        out.append(Check(number, name, bool(passed), detail, time.perf_counter() - t0))
    return out


def report_table(checks: list[Check]) -> str:
    lines = [f"{c.number:>2} {'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}" for c in checks]
    lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} passed")
    return "\n".join(lines) + "\n"


def report_csv(checks: list[Check]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["number", "name", "passed", "detail"])
    for c in checks:
        writer.writerow([c.number, c.name, c.passed, c.detail])
    return buf.getvalue()
