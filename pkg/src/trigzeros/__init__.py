"""Zeros of trigonometric polynomials: positivity witnesses, sign-change sets,
short convex combinations on the trigonometric moment curve, cubature rules
and radius bounds on the torus."""

__version__ = "0.1.0"

from .bounds import BoundReport, compare_bounds, torus_radius, verify_grid_property
from .caratheodory import CurveDecomposition, decompose_origin, zp_orbit_points
from .cubature import CubatureRule, equispaced_rule, gauss_legendre_rule, rule_from_certificate, tchakaloff
from .linprog import HullCertificate, caratheodory_reduce, origin_in_hull, positivity_feasible, solve_lp
from .trig import GeodesicBall, Interval, Spectrum, TrigPoly, curve_from_spectrum, evaluate, parse_spectrum
from .witness import (
    PositivityWitness,
    SignChangeCertificate,
    babenko_threshold,
    ball_positivity,
    interval_positivity,
    min_diameter_sign_change,
)
