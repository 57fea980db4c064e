"""
Class-defining functionals and coefficient extraction.

``r_operator``  : F(z)/z with F = f * k (Hadamard product)
``v_operator``  : (1 - a) z F'/F + a (1 + z F''/F')

Both map a normalized f to a series with constant term 1. Applying them to
g = f^{-1} gives the second ("inverse side") condition. The closed forms for
the first two coefficients on both sides, and the algebra that recovers
a_2, a_3 from (p_1, p_2, q_2), live here too so the harness can compare the
series pipeline against them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .classes import near_excluded_alpha
from .errors import (
    DegenerateConvolution,
    ExcludedAlpha,
    HypothesisViolated,
    KernelCoefficientZero,
)
from .series import (
    NormalizedFunction,
    TruncatedSeries,
    derivative,
    div,
    hadamard,
    revert,
    shift,
)


@dataclass(frozen=True)
class ExtractedCoefficients:
    a2: complex
    a3: complex
    p1: complex
    p2: complex
    q2: complex

    @property
    def combo(self) -> complex:
        return 2 * self.a2**2 - self.a3

    def to_dict(self) -> dict:
        pair = lambda z: [z.real, z.imag]  # noqa: E731
        return {
            "a2": pair(self.a2),
            "a3": pair(self.a3),
            "combo": pair(self.combo),
            "p1": pair(self.p1),
            "p2": pair(self.p2),
            "q2": pair(self.q2),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ExtractedCoefficients:
        c = lambda key: complex(*d[key])  # noqa: E731
        return cls(c("a2"), c("a3"), c("p1"), c("p2"), c("q2"))


def r_operator(f: TruncatedSeries, k: TruncatedSeries) -> TruncatedSeries:
    """``(f * k)(z) / z``; coefficient n is ``a_{n+1} k_{n+1}``."""
    F = hadamard(f, k)
    return TruncatedSeries(F.coeffs[1:])


def v_operator(f: TruncatedSeries, k: TruncatedSeries, alpha: complex) -> TruncatedSeries:
    """``(1 - alpha) z F'/F + alpha (1 + z F''/F')`` for ``F = f * k``."""
    F = hadamard(f, k)
    if F.order < 2 or F[1] == 0:
        raise DegenerateConvolution("f * k must have a nonvanishing linear coefficient")
    dF = derivative(F)
    starlike = div(dF, TruncatedSeries(F.coeffs[1:]))       # z F'/F
    convex = 1 + shift(div(derivative(dF), dF))              # 1 + z F''/F'
    n = min(starlike.order, convex.order) + 1
    out = (1 - alpha) * starlike.coeffs[:n] + alpha * convex.coeffs[:n]
    return TruncatedSeries(out)


def v_expansion_closed_form(a2, a3, k2, k3, alpha) -> tuple[complex, complex]:
    """First two nonconstant coefficients of the v-operator applied to f."""
    c1 = (1 + alpha) * a2 * k2
    c2 = 2 * (1 + 2 * alpha) * a3 * k3 - (1 + 3 * alpha) * a2**2 * k2**2
    return complex(c1), complex(c2)


def inverse_v_expansion_closed_form(a2, a3, k2, k3, alpha) -> tuple[complex, complex]:
    """Same two coefficients for g = f^{-1}."""
    q1 = -(1 + alpha) * a2 * k2
    q2 = (4 * (1 + 2 * alpha) * k3 - (1 + 3 * alpha) * k2**2) * a2**2 - 2 * (1 + 2 * alpha) * a3 * k3
    return complex(q1), complex(q2)


def inverse_side_series(
    f: TruncatedSeries, k: TruncatedSeries, alpha: complex | None = None
) -> TruncatedSeries:
    g = revert(f)
    if alpha is None:
        return r_operator(g, k)
    return v_operator(g, k, alpha)


def construct_f_from_p_BR(
    p: TruncatedSeries, k: TruncatedSeries, strict: bool = False
) -> NormalizedFunction:
    """Solve ``a_n k_n = p_{n-1}`` for f.

    Stops at the last order before the first vanishing kernel coefficient and
    warns (or raises :class:`KernelCoefficientZero` when ``strict``).
    The returned order tells the caller how far the construction got.
    """
    top = min(p.order + 1, k.order)
    kc = k.coeffs[: top + 1]
    zeros = [n for n in range(2, top + 1) if kc[n] == 0]
    if zeros:
        first = zeros[0]
        if strict or first == 2:
            raise KernelCoefficientZero(first)
        warnings.warn(f"kernel coefficient k_{first} vanishes; f truncated at order {first - 1}")
        top = first - 1
    c = np.zeros(top + 1, dtype=complex)
    c[1] = 1.0
    c[2:] = p.coeffs[1:top] / kc[2 : top + 1]
    return NormalizedFunction(c)


def _check_alpha_kernel(k2, k3, alpha) -> None:
    if near_excluded_alpha(alpha):
        raise ExcludedAlpha(f"alpha = {alpha} is within 1e-6 of -1 or -1/2")
    if k2 == 0:
        raise KernelCoefficientZero(2)
    if k3 == 0:
        raise KernelCoefficientZero(3)


def construct_f_from_p_BV(p: TruncatedSeries, k: TruncatedSeries, alpha: complex) -> NormalizedFunction:
    """Cubic ``f = z + a_2 z^2 + a_3 z^3`` whose v-operator matches ``p`` through ``z^2``."""
    alpha = complex(alpha)
    k2, k3 = k[2], k[3]
    _check_alpha_kernel(k2, k3, alpha)
    p1, p2 = p[1], p[2]
    a2 = p1 / ((1 + alpha) * k2)
    a3 = (p2 + (1 + 3 * alpha) / (1 + alpha) ** 2 * p1**2) / (2 * (1 + 2 * alpha) * k3)
    return NormalizedFunction.from_tail([a2, a3])


@dataclass(frozen=True)
class IdentityReport:
    deviations: dict
    max_deviation: float
    conditioning: float

    def to_dict(self) -> dict:
        return {
            "deviations": dict(self.deviations),
            "max_deviation": self.max_deviation,
            "conditioning": self.conditioning,
        }


def _rel(x: complex, ref: complex) -> float:
    return abs(x - ref) / max(1.0, abs(ref))


def identity_suite(a2, a3, k2, k3, alpha) -> IdentityReport:
    """Push (a_2, a_3) forward to (p_1, p_2, q_2) and recover them every way the algebra allows.

    Deviations are relative, ``|x - ref| / max(1, |ref|)``.
    """
    a2, a3, k2, k3, alpha = map(complex, (a2, a3, k2, k3, alpha))
    if k2 == 0 or k3 == 0:
        raise HypothesisViolated("k2 and k3 must be nonzero")
    if alpha == -1 or alpha == -0.5:
        raise HypothesisViolated(f"alpha = {alpha} is excluded")
    u, v, w = 1 + alpha, 1 + 2 * alpha, 1 + 3 * alpha
    D = 2 * v * k3 - w * k2**2
    if D == 0:
        raise HypothesisViolated("2(1+2a)k3 - (1+3a)k2^2 vanishes")

    p1, p2 = v_expansion_closed_form(a2, a3, k2, k3, alpha)
    _, q2 = inverse_v_expansion_closed_form(a2, a3, k2, k3, alpha)

    a2_sq = (p2 + q2) / (2 * D)
    a3_sum_diff = (p2 + q2) / (2 * D) + (p2 - q2) / (4 * v * k3)
    a3_from_p = (p2 + w / u**2 * p1**2) / (2 * v * k3)
    a3_from_q = (-q2 + (4 * v * k3 - w * k2**2) / (k2**2 * u**2) * p1**2) / (2 * v * k3)
    deviations = {
        "a2_from_p1": _rel(p1 / (u * k2), a2),
        "a2_squared_from_p2_q2": _rel(a2_sq, a2**2),
        "a3_minus_a2_squared": _rel((p2 - q2) / (4 * v * k3), a3 - a2**2),
        "a3_from_sum_and_difference": _rel(a3_sum_diff, a3),
        "a3_from_p1_p2": _rel(a3_from_p, a3),
        "a3_from_p1_q2": _rel(a3_from_q, a3),
    }
    scale = abs(2 * v * k3) + abs(w * k2**2)
    conditioning = max(1 / abs(u), 1 / abs(v), scale / abs(D))
    return IdentityReport(deviations, max(deviations.values()), conditioning)


def br_identity_deviations(f: TruncatedSeries, k: TruncatedSeries) -> dict:
    """Series pipeline vs the closed forms ``p_1 = a_2 k_2``, ``p_2 = a_3 k_3``,
    ``q_1 = -a_2 k_2``, ``q_2 = k_3 (2 a_2^2 - a_3)``."""
    a2, a3, k2, k3 = f[2], f[3], k[2], k[3]
    p = r_operator(f, k)
    q = inverse_side_series(f, k)
    return {
        "p1": _rel(p[1], a2 * k2),
        "p2": _rel(p[2], a3 * k3),
        "q1": _rel(q[1], -a2 * k2),
        "q2": _rel(q[2], k3 * (2 * a2**2 - a3)),
    }


def bv_identity_deviations(f: TruncatedSeries, k: TruncatedSeries, alpha: complex) -> dict:
    """Series pipeline vs the closed-form expansions on both sides."""
    a2, a3, k2, k3 = f[2], f[3], k[2], k[3]
    p = v_operator(f, k, alpha)
    q = inverse_side_series(f, k, alpha)
    c1, c2 = v_expansion_closed_form(a2, a3, k2, k3, alpha)
    d1, d2 = inverse_v_expansion_closed_form(a2, a3, k2, k3, alpha)
    return {
        "p1": _rel(p[1], c1),
        "p2": _rel(p[2], c2),
        "q1": _rel(q[1], d1),
        "q2": _rel(q[2], d2),
    }
