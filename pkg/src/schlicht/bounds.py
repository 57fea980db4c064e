"""
Closed-form coefficient bounds for the BR and BV classes.

Every bound is a minimum over a few candidate expressions. The report keeps
all candidates and the index of the one that won (ties go to the earliest
listed), so the minimum can be recomputed and audited.

With ``M = m (1 - beta)``:

BR (kernel coefficients k2, k3)::

    |a2| <= min( sqrt(M / |k3|),  M / |k2| )
    |a3| <= M / |k3|
    |2 a2^2 - a3| <= M / |k3|

BV (additionally alpha, with D = 2(1+2a) k3 - (1+3a) k2^2)::

    |a2| <= min( sqrt(M / |D|),  M / (|1+a| |k2|) )
    |a3| <= min( M/|D| + T,
                 T (1 + M |1+3a| / |1+a|^2),
                 T (1 + M |4(1+2a) k3 - (1+3a) k2^2| / (|k2|^2 |1+a|^2)) )

where ``T = M / (2 |1+2a| |k3|)``. The a3 bound needs ``a != -1/2``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .errors import (
    DegenerateDenominator,
    ExcludedAlpha,
    ParamOutOfRange,
    ZeroKernelCoefficient,
)

A2_BRANCHES_BR = ("sqrt_k3", "linear_k2")
A3_BRANCHES_BR = ("k3",)
A2_BRANCHES_BV = ("sqrt_denominator", "linear_k2")
A3_BRANCHES_BV = ("sum_difference", "p1_p2", "p1_q2")

CSV_COLUMNS = (
    "m", "beta", "alpha_re", "alpha_im", "k2", "k3",
    "a2_bound", "a3_bound", "combo_bound", "branches",
)


def _argmin(values) -> int:
    best = 0
    for i, v in enumerate(values):
        if v < values[best]:
            best = i
    return best


@dataclass(frozen=True)
class BoundReport:
    m: float
    beta: float
    alpha: complex | None
    k2: complex
    k3: complex
    a2_candidates: tuple[float, ...]
    a3_candidates: tuple[float, ...] | None
    combo_bound: float | None
    a2_branch_names: tuple[str, ...]
    a3_branch_names: tuple[str, ...]

    @property
    def a2_bound(self) -> float:
        return min(self.a2_candidates)

    @property
    def a3_bound(self) -> float | None:
        return None if self.a3_candidates is None else min(self.a3_candidates)

    @property
    def active_branch_a2(self) -> str:
        return self.a2_branch_names[_argmin(self.a2_candidates)]

    @property
    def active_branch_a3(self) -> str | None:
        if self.a3_candidates is None:
            return None
        return self.a3_branch_names[_argmin(self.a3_candidates)]

    def bound_for(self, target: str) -> float | None:
        return {"a2": self.a2_bound, "a3": self.a3_bound, "combo": self.combo_bound}[target]

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "beta": self.beta,
            "alpha": None if self.alpha is None else [self.alpha.real, self.alpha.imag],
            "k2": [self.k2.real, self.k2.imag],
            "k3": [self.k3.real, self.k3.imag],
            "a2_bound": self.a2_bound,
            "a3_bound": self.a3_bound,
            "combo_bound": self.combo_bound,
            "a2_candidates": list(self.a2_candidates),
            "a3_candidates": None if self.a3_candidates is None else list(self.a3_candidates),
            "active_branch_a2": self.active_branch_a2,
            "active_branch_a3": self.active_branch_a3,
        }

    def csv_row(self) -> dict:
        alpha = self.alpha if self.alpha is not None else complex("nan")
        return {
            "m": self.m,
            "beta": self.beta,
            "alpha_re": alpha.real,
            "alpha_im": alpha.imag,
            "k2": _fmt_complex(self.k2),
            "k3": _fmt_complex(self.k3),
            "a2_bound": self.a2_bound,
            "a3_bound": "" if self.a3_bound is None else self.a3_bound,
            "combo_bound": "" if self.combo_bound is None else self.combo_bound,
            "branches": f"{self.active_branch_a2};{self.active_branch_a3 or ''}",
        }


def _fmt_complex(z: complex) -> str:
    return repr(z.real) if z.imag == 0 else repr(z).strip("()")


def to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def _check_params(m, beta) -> float:
    if not (m >= 2):
        raise ParamOutOfRange(f"need m >= 2, got m = {m}")
    if not (0 <= beta < 1):
        raise ParamOutOfRange(f"need 0 <= beta < 1, got beta = {beta}")
    return m * (1.0 - beta)


def _check_kernel(k2, k3) -> None:
    if k2 == 0:
        raise ZeroKernelCoefficient(2, "the bounds require k2 != 0")
    if k3 == 0:
        raise ZeroKernelCoefficient(3, "the bounds require k3 != 0")


def bound_BR(m: float, beta: float, k2: complex, k3: complex) -> BoundReport:
    M = _check_params(m, beta)
    k2, k3 = complex(k2), complex(k3)
    _check_kernel(k2, k3)
    a3 = M / abs(k3)
    return BoundReport(
        m=m, beta=beta, alpha=None, k2=k2, k3=k3,
        a2_candidates=(math.sqrt(M / abs(k3)), M / abs(k2)),
        a3_candidates=(a3,),
        combo_bound=a3,
        a2_branch_names=A2_BRANCHES_BR,
        a3_branch_names=A3_BRANCHES_BR,
    )


def bound_BR_koebe_piecewise(m: float, beta: float) -> BoundReport:
    """Koebe-kernel, m = 2 case written as the piecewise formula in beta."""
    if m != 2:
        raise ParamOutOfRange("the piecewise Koebe formula is stated for m = 2 only")
    _check_params(m, beta)
    if beta <= 1 / 3:
        a2, branch = math.sqrt(2 * (1 - beta) / 3), 0
    else:
        a2, branch = 1 - beta, 1
    a3 = 2 * (1 - beta) / 3
    # one candidate only, so the report reproduces the piecewise value exactly
    names = (A2_BRANCHES_BR[branch],)
    return BoundReport(
        m=m, beta=beta, alpha=None, k2=2 + 0j, k3=3 + 0j,
        a2_candidates=(a2,), a3_candidates=(a3,), combo_bound=a3,
        a2_branch_names=names, a3_branch_names=A3_BRANCHES_BR,
    )


def bound_BV(m: float, beta: float, alpha: complex, k2: complex, k3: complex) -> BoundReport:
    """Bounds for BV; ``a3_bound`` is None (unavailable) at ``alpha = -1/2``."""
    M = _check_params(m, beta)
    alpha, k2, k3 = complex(alpha), complex(k2), complex(k3)
    _check_kernel(k2, k3)
    u, v, w = 1 + alpha, 1 + 2 * alpha, 1 + 3 * alpha
    if u == 0:
        raise ExcludedAlpha("alpha = -1 is excluded: the bounds need 1 + alpha != 0")
    D = 2 * v * k3 - w * k2**2
    if D == 0:
        raise DegenerateDenominator("2(1+2 alpha) k3 - (1+3 alpha) k2^2 must be nonzero")
    a2 = (math.sqrt(M / abs(D)), M / (abs(u) * abs(k2)))
    if v == 0:
        a3 = None
    else:
        T = M / (2 * abs(v) * abs(k3))
        a3 = (
            M / abs(D) + T,
            T * (1 + M * abs(w) / abs(u) ** 2),
            T * (1 + M * abs(4 * v * k3 - w * k2**2) / (abs(k2) ** 2 * abs(u) ** 2)),
        )
    return BoundReport(
        m=m, beta=beta, alpha=alpha, k2=k2, k3=k3,
        a2_candidates=a2, a3_candidates=a3, combo_bound=None,
        a2_branch_names=A2_BRANCHES_BV, a3_branch_names=A3_BRANCHES_BV,
    )


def bound_for_spec(spec) -> BoundReport:
    if spec.alpha is None:
        return bound_BR(spec.m, spec.beta, spec.k2, spec.k3)
    return bound_BV(spec.m, spec.beta, spec.alpha, spec.k2, spec.k3)


def bound_examples_fixture(m: float = 2) -> dict[str, tuple[float, float, float]]:
    """(a2, a3, combo) bounds for beta = 0 and the two classical kernels."""
    return {
        "koebe": (math.sqrt(m / 3), m / 3, m / 3),
        "halfplane": (math.sqrt(m), float(m), float(m)),
    }


# special cases alpha = 0 (starlike type) and alpha = 1 (convex type), written out directly
def starlike_bounds(m, beta, k2, k3) -> tuple[float, float]:
    M = m * (1 - beta)
    k2, k3 = complex(k2), complex(k3)
    a2 = min(math.sqrt(M / abs(2 * k3 - k2**2)), M / abs(k2))
    a3 = min(
        M / abs(2 * k3 - k2**2) + M / (2 * abs(k3)),
        M * (1 + M) / (2 * abs(k3)),
        M / (2 * abs(k3)) * (1 + M * abs(4 * k3 - k2**2) / abs(k2) ** 2),
    )
    return a2, a3


def convex_bounds(m, beta, k2, k3) -> tuple[float, float]:
    M = m * (1 - beta)
    k2, k3 = complex(k2), complex(k3)
    a2 = min(math.sqrt(M / abs(6 * k3 - 4 * k2**2)), M / (2 * abs(k2)))
    a3 = min(
        M / abs(6 * k3 - 4 * k2**2) + M / (6 * abs(k3)),
        M * (1 + M) / (6 * abs(k3)),
        M / (6 * abs(k3)) * (1 + M * abs(3 * k3 - k2**2) / abs(k2) ** 2),
    )
    return a2, a3
