"""
Constructive members of the Caratheodory class P, the bounded boundary
rotation classes P_m and the shifted classes P_m(beta).

A function in P_m is built from a signed atomic measure ``mu`` with atoms
``(t_j, w_j)``::

    p(z) = sum_j w_j (1 - z e^{i t_j}) / (1 + z e^{i t_j}),

normalised so that ``sum w_j = 1`` (hence ``p(0) = 1``) and
``sum |w_j| <= m / 2``. With nonnegative weights this is a convex
combination of Caratheodory kernels, so ``m = 2`` gives P. Every generated
coefficient satisfies ``|p_n| <= 2 sum |w_j| <= m``.

The membership test is the defining integral evaluated by the trapezoid
rule on a few circles. It can only refute membership, never prove it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BadConstantTerm,
    ExcludedAlpha,
    InvalidMeasure,
    ParamOutOfRange,
    RadiusOutOfRange,
)
from .series import NormalizedFunction, TruncatedSeries, evaluate_on_circle

TWO_PI = 2.0 * math.pi
WEIGHT_TOL = 1e-12
COEFF_TOL = 1e-9
DEFAULT_RADII = (0.5, 0.8, 0.95)
DEFAULT_N_THETA = 4096
# membership slack as a fraction of m*pi
DEFAULT_REL_TOL = 1e-3
EXCLUSION_RADIUS = 1e-6


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite signed measure on the circle: ``atoms = ((t, w), ...)``."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        atoms = tuple((float(t) % TWO_PI, float(w)) for t, w in self.atoms)
        if not atoms:
            raise InvalidMeasure("a measure needs at least one atom")
        if not all(math.isfinite(t) and math.isfinite(w) for t, w in atoms):
            raise InvalidMeasure("atoms must be finite")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_arrays(cls, angles, weights) -> AtomicMeasure:
        return cls(tuple(zip(np.asarray(angles, float).tolist(), np.asarray(weights, float).tolist())))

    @property
    def angles(self) -> np.ndarray:
        return np.array([t for t, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    @property
    def mass(self) -> float:
        return math.fsum(w for _, w in self.atoms)

    @property
    def total_variation(self) -> float:
        return math.fsum(abs(w) for _, w in self.atoms)

    def validate(self, m: float | None = None) -> None:
        if abs(self.mass - 1.0) > WEIGHT_TOL:
            raise InvalidMeasure(f"weights sum to {self.mass!r}, expected 1")
        if m is not None and self.total_variation > m / 2 + WEIGHT_TOL:
            raise InvalidMeasure(
                f"total variation {self.total_variation!r} exceeds m/2 = {m / 2!r}"
            )

    def to_dict(self) -> dict:
        return {"atoms": [{"t": t, "w": w} for t, w in self.atoms]}

    @classmethod
    def from_dict(cls, d: dict) -> AtomicMeasure:
        return cls(tuple((a["t"], a["w"]) for a in d["atoms"]))


@dataclass(frozen=True)
class ClassSpec:
    """Parameters of P_m(beta) plus the convolution kernel and, for BV, alpha."""

    m: float
    beta: float
    kernel: NormalizedFunction
    alpha: complex | None = None

    def __post_init__(self):
        if not (self.m >= 2):
            raise ParamOutOfRange(f"need m >= 2, got m = {self.m}")
        if not (0 <= self.beta < 1):
            raise ParamOutOfRange(f"need 0 <= beta < 1, got beta = {self.beta}")
        object.__setattr__(self, "kernel", NormalizedFunction.of(self.kernel))
        if self.alpha is not None:
            alpha = complex(self.alpha)
            if abs(alpha + 1) == 0:
                raise ExcludedAlpha("alpha = -1 is excluded (the bounds need 1 + alpha != 0)")
            object.__setattr__(self, "alpha", alpha)

    @property
    def scale(self) -> float:
        """``m (1 - beta)``, the common coefficient bound."""
        return self.m * (1.0 - self.beta)

    @property
    def k2(self) -> complex:
        return self.kernel[2]

    @property
    def k3(self) -> complex:
        return self.kernel[3]

    @property
    def is_bv(self) -> bool:
        return self.alpha is not None

    def to_dict(self) -> dict:
        d = {"m": self.m, "beta": self.beta}
        d["alpha"] = None if self.alpha is None else [self.alpha.real, self.alpha.imag]
        d["kernel"] = self.kernel.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ClassSpec:
        alpha = d.get("alpha")
        if alpha is not None:
            alpha = complex(alpha[0], alpha[1])
        return cls(d["m"], d["beta"], NormalizedFunction.of(TruncatedSeries.from_dict(d["kernel"])), alpha)


@dataclass(frozen=True)
class RadiusResult:
    radius: float
    integral: float
    passed: bool
    tail_estimate: float


@dataclass(frozen=True)
class MembershipDiagnostics:
    bound: float          # m * pi
    tol: float
    per_radius: tuple[RadiusResult, ...]
    passed: bool
    max_integral: float
    max_radius: float

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "tol": self.tol,
            "passed": self.passed,
            "max_integral": self.max_integral,
            "max_radius": self.max_radius,
            "per_radius": [
                {"r": r.radius, "integral": r.integral, "passed": r.passed, "tail": r.tail_estimate}
                for r in self.per_radius
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> MembershipDiagnostics:
        rows = tuple(
            RadiusResult(x["r"], x["integral"], x["passed"], x["tail"]) for x in d["per_radius"]
        )
        return cls(d["bound"], d["tol"], rows, d["passed"], d["max_integral"], d["max_radius"])


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    bound: float
    max_modulus: float
    first_violation: int | None = None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "bound": self.bound,
            "max_modulus": self.max_modulus,
            "first_violation": self.first_violation,
        }

    @classmethod
    def from_dict(cls, d: dict) -> CheckResult:
        return cls(d["passed"], d["bound"], d["max_modulus"], d["first_violation"])


def kernel_series(t: float, order: int) -> TruncatedSeries:
    """``(1 - z e^{it}) / (1 + z e^{it})`` = ``1 + sum 2 (-1)^n e^{int} z^n``."""
    n = np.arange(order + 1)
    c = 2.0 * (-1.0) ** n * np.exp(1j * n * t)
    c[0] = 1.0
    return TruncatedSeries(c)


def pm_from_measure(mu: AtomicMeasure, order: int, m: float | None = None) -> TruncatedSeries:
    """Series of ``p`` for the atomic measure ``mu``; validated against ``m`` if given."""
    mu.validate(m)
    n = np.arange(1, order + 1)
    phases = np.exp(1j * np.outer(n, mu.angles))     # (order, atoms)
    c = np.empty(order + 1, dtype=complex)
    c[0] = 1.0
    c[1:] = 2.0 * (-1.0) ** n * (phases @ mu.weights)
    return TruncatedSeries(c)


def pm_from_pair(p1: TruncatedSeries, p2: TruncatedSeries, m: float) -> TruncatedSeries:
    """``(m/4 + 1/2) p1 - (m/4 - 1/2) p2`` for Caratheodory series ``p1``, ``p2``."""
    for name, p in (("p1", p1), ("p2", p2)):
        if abs(p[0] - 1) > WEIGHT_TOL:
            raise BadConstantTerm(f"{name} must have constant term 1, got {p[0]}")
    if m < 2:
        raise ParamOutOfRange(f"need m >= 2, got m = {m}")
    return (m / 4 + 0.5) * p1 - (m / 4 - 0.5) * p2


def shift_beta(p: TruncatedSeries, beta: float) -> TruncatedSeries:
    """``(1 - beta) p + beta``; the nonconstant coefficients are scaled exactly."""
    c = (1.0 - beta) * p.coeffs
    c[0] = (1.0 - beta) * p.coeffs[0] + beta
    return TruncatedSeries(c)


def contract(Phi: TruncatedSeries, amplitude: float, dilation: float) -> TruncatedSeries:
    """``1 + amplitude * (Phi(dilation * z) - 1)``.

    Both maps keep P_m(beta) invariant for amplitude, dilation in [0, 1]:
    dilation moves the defining integral to a smaller circle, and the
    amplitude map only raises beta.
    """
    if not (0 <= amplitude <= 1 and 0 <= dilation <= 1):
        raise ValueError("amplitude and dilation must lie in [0, 1]")
    c = Phi.coeffs.copy()
    c[1:] *= amplitude * dilation ** np.arange(1, c.size)
    return TruncatedSeries(c)


def project_weights(weights: np.ndarray, m: float) -> np.ndarray:
    """Map arbitrary real weights onto ``{sum w = 1, sum |w| <= m/2}``.

    First shift all weights equally so they sum to one, then pull them toward
    the uniform positive measure (which has total variation 1) by the smallest
    amount that brings the total variation under ``m / 2``.
    """
    w = np.asarray(weights, dtype=float)
    n = w.size
    w = w + (1.0 - w.sum()) / n
    cap = m / 2.0
    if np.abs(w).sum() <= cap:
        return w
    u = np.full(n, 1.0 / n)
    lo, hi = 0.0, 1.0
    # total variation is convex in the mixing parameter and equals 1 at hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if np.abs((1 - mid) * w + mid * u).sum() <= cap:
            hi = mid
        else:
            lo = mid
    out = (1 - hi) * w + hi * u
    if m == 2:
        # numerical residue may leave -1e-17 weights; for P they must be exactly >= 0
        out = np.clip(out, 0.0, None)
        out /= out.sum()
    return out


def random_pm_beta(
    spec: ClassSpec, seed: int, n_atoms: int, order: int
) -> tuple[AtomicMeasure, TruncatedSeries]:
    """Deterministic random member of P_m(beta) with its generating measure."""
    if n_atoms < 1:
        raise ValueError("n_atoms must be at least 1")
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, TWO_PI, n_atoms)
    raw = rng.uniform(-1.0, 1.0, n_atoms)
    mu = AtomicMeasure.from_arrays(angles, project_weights(raw, spec.m))
    p = pm_from_measure(mu, order, spec.m)
    return mu, shift_beta(p, spec.beta)


def _tail_estimate(c: np.ndarray, r: float) -> float:
    # geometric extrapolation from the last few coefficients
    tail = np.abs(c[-4:]) if c.size >= 4 else np.abs(c)
    peak = float(tail.max()) if tail.size else 0.0
    n = c.size
    return peak * r**n / (1.0 - r)


def membership_quadrature(
    P: TruncatedSeries,
    spec: ClassSpec,
    radii: Sequence[float] = DEFAULT_RADII,
    n_theta: int = DEFAULT_N_THETA,
    rel_tol: float = DEFAULT_REL_TOL,
) -> MembershipDiagnostics:
    """Trapezoid approximation of ``int |Re P - beta| / (1 - beta) dtheta`` on each circle.

    Passing means the value stays below ``m pi`` plus ``rel_tol * m pi`` at
    every tested radius.
    """
    if n_theta < 256:
        raise ValueError("n_theta must be at least 256")
    bound = spec.m * math.pi
    tol = rel_tol * bound
    rows = []
    for r in radii:
        if not (0 < r < 1):
            raise RadiusOutOfRange(f"radius {r} not in (0, 1)")
        vals = evaluate_on_circle(P, r, n_theta)
        integral = float(np.abs(vals.real - spec.beta).mean() * TWO_PI / (1.0 - spec.beta))
        rows.append(RadiusResult(float(r), integral, integral <= bound + tol, _tail_estimate(P.coeffs, r)))
    worst = max(rows, key=lambda x: x.integral)
    return MembershipDiagnostics(
        bound=bound,
        tol=tol,
        per_radius=tuple(rows),
        passed=all(x.passed for x in rows),
        max_integral=worst.integral,
        max_radius=worst.radius,
    )


def coefficient_bound_check(Phi: TruncatedSeries, spec: ClassSpec, tol: float = COEFF_TOL) -> CheckResult:
    """Necessary condition ``|h_n| <= m (1 - beta)`` for all retained ``n >= 1``."""
    bound = spec.scale
    mods = np.abs(Phi.coeffs[1:])
    if mods.size == 0:
        return CheckResult(True, bound, 0.0)
    bad = np.flatnonzero(mods > bound + tol)
    first = int(bad[0]) + 1 if bad.size else None
    return CheckResult(first is None, bound, float(mods.max()), first)


def near_excluded_alpha(alpha: complex, radius: float = EXCLUSION_RADIUS) -> bool:
    return abs(alpha + 1) < radius or abs(alpha + 0.5) < radius
