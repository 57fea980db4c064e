"""
Truncated complex power series.

A :class:`TruncatedSeries` holds the MacLaurin coefficients ``c[0..N]`` of an
analytic function, where ``N`` is the order (highest retained power).
Coefficients above ``N`` are *unknown*, not zero, so binary operations that
combine series of different orders keep only what both operands determine:
``mul``, ``div``, ``hadamard`` and ``compose`` truncate to the smaller order.
``add`` is the one exception and zero-pads the shorter operand.

Values are immutable; every operation returns a new series.

    >>> f = TruncatedSeries.from_coeffs([0, 1, 2, 3, 4])   # Koebe to order 4
    >>> revert(f).coeffs.real.tolist()
    [0.0, 1.0, -2.0, 5.0, -14.0]
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DivisorVanishes,
    InnerNotVanishing,
    NonFiniteCoefficients,
    NotNormalized,
)

DEFAULT_ORDER = 128


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Coefficients ``c_0 .. c_N`` of a series truncated at order ``N``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise ValueError("a series needs at least the constant coefficient")
        if not np.all(np.isfinite(c)):
            raise NonFiniteCoefficients("series coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[complex], order: int | None = None) -> TruncatedSeries:
        """Build from a coefficient list, zero-padding or cutting to ``order``."""
        c = np.asarray(list(coeffs), dtype=complex)
        if order is None:
            return cls(c)
        out = np.zeros(order + 1, dtype=complex)
        n = min(order + 1, c.size)
        out[:n] = c[:n]
        return cls(out)

    @classmethod
    def constant(cls, value: complex, order: int = DEFAULT_ORDER) -> TruncatedSeries:
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER) -> TruncatedSeries:
        """The series ``z``."""
        c = np.zeros(order + 1, dtype=complex)
        c[1] = 1.0
        return cls(c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __getitem__(self, n: int) -> complex:
        return complex(self.coeffs[n])

    def __len__(self) -> int:
        return self.coeffs.size

    def __repr__(self) -> str:
        return f"TruncatedSeries(order={self.order}, coeffs={self.coeffs.tolist()!r})"

    def truncate(self, order: int) -> TruncatedSeries:
        if order > self.order:
            raise ValueError(f"cannot raise order {self.order} to {order} by truncation")
        return TruncatedSeries(self.coeffs[: order + 1])

    def pad(self, order: int) -> TruncatedSeries:
        """Declare the missing coefficients up to ``order`` to be exactly zero.

        Only valid when the series is really a polynomial of degree <= its order.
        """
        return TruncatedSeries.from_coeffs(self.coeffs, order=max(order, self.order))

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None for the zero series."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[0]) if nz.size else None

    @property
    def is_normalized(self) -> bool:
        return self.order >= 1 and self.coeffs[0] == 0 and self.coeffs[1] == 1

    def allclose(self, other: TruncatedSeries, atol: float = 1e-12) -> bool:
        n = min(self.order, other.order) + 1
        return bool(np.all(np.abs(self.coeffs[:n] - other.coeffs[:n]) <= atol))

    # arithmetic sugar
    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return add(self, other)
        c = self.coeffs.copy()
        c[0] += other
        return TruncatedSeries(c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        return TruncatedSeries(self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return div(self, other)
        return TruncatedSeries(self.coeffs / other)

    def __call__(self, z):
        return evaluate(self, z)

    # serialization
    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "re": self.coeffs.real.tolist(),
            "im": self.coeffs.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> TruncatedSeries:
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d["im"], dtype=float)
        if re.size != d["order"] + 1 or im.size != re.size:
            raise ValueError("coefficient arrays do not match the declared order")
        return cls(re + 1j * im)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> TruncatedSeries:
        return cls.from_dict(json.loads(text))


class NormalizedFunction(TruncatedSeries):
    """A series with ``c_0 = 0`` and ``c_1 = 1`` exactly (the class A normalization)."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_normalized:
            raise NotNormalized(
                f"expected c0 = 0 and c1 = 1, got c0 = {self.coeffs[0]}, "
                f"c1 = {self.coeffs[1] if self.order >= 1 else None}"
            )

    @classmethod
    def from_tail(cls, tail: Sequence[complex], order: int | None = None) -> NormalizedFunction:
        """``z + tail[0] z^2 + tail[1] z^3 + ...``"""
        c = [0, 1, *tail]
        return cls(TruncatedSeries.from_coeffs(c, order=order).coeffs)

    @classmethod
    def of(cls, series: TruncatedSeries) -> NormalizedFunction:
        return series if isinstance(series, cls) else cls(series.coeffs)


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    n = max(a.order, b.order) + 1
    c = np.zeros(n, dtype=complex)
    c[: a.coeffs.size] += a.coeffs
    c[: b.coeffs.size] += b.coeffs
    return TruncatedSeries(c)


def _mul_coeffs(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return np.convolve(a[:n], b[:n])[:n]


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product, truncated at the smaller order."""
    n = min(a.order, b.order) + 1
    return TruncatedSeries(_mul_coeffs(a.coeffs, b.coeffs, n))


def _div_coeffs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # a, b same length, b[0] != 0
    n = a.size
    out = np.zeros(n, dtype=complex)
    inv = 1.0 / b[0]
    for k in range(n):
        acc = a[k]
        if k:
            acc = acc - np.dot(out[:k], b[k:0:-1])
        out[k] = acc * inv
    return out


def div(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Quotient ``a / b``.

    A common power of ``z`` is cancelled first, so ``z F'(z) / F(z)`` works
    for ``F`` with ``F(0) = 0``. The result order is
    ``min(a.order, b.order) - valuation(b)``.
    """
    v = b.valuation()
    if v is None:
        raise DivisorVanishes("divisor is identically zero to its truncation order")
    n = min(a.order, b.order) + 1
    if v >= n:
        raise DivisorVanishes("divisor vanishes to the common truncation order")
    if np.any(a.coeffs[:v] != 0):
        raise DivisorVanishes(
            f"divisor has valuation {v} but the dividend has a nonzero coefficient below it"
        )
    return TruncatedSeries(_div_coeffs(a.coeffs[v:n], b.coeffs[v:n]))


def derivative(a: TruncatedSeries) -> TruncatedSeries:
    if a.order == 0:
        return TruncatedSeries(np.zeros(1, dtype=complex))
    n = np.arange(1, a.order + 1)
    return TruncatedSeries(a.coeffs[1:] * n)


def shift(a: TruncatedSeries, k: int = 1) -> TruncatedSeries:
    """Multiply by ``z**k`` (exact, raises the order by ``k``)."""
    return TruncatedSeries(np.concatenate([np.zeros(k, dtype=complex), a.coeffs]))


def hadamard(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    n = min(f.order, g.order) + 1
    return TruncatedSeries(f.coeffs[:n] * g.coeffs[:n])


def compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """``outer(inner(z))`` by Horner's scheme in series arithmetic."""
    if inner.coeffs[0] != 0:
        raise InnerNotVanishing(f"inner series has constant term {inner.coeffs[0]}")
    n = min(outer.order, inner.order) + 1
    c_in = inner.coeffs[:n]
    c_out = outer.coeffs[:n]
    acc = np.zeros(n, dtype=complex)
    acc[0] = c_out[-1]
    for k in range(n - 2, -1, -1):
        acc = _mul_coeffs(acc, c_in, n)
        acc[0] += c_out[k]
    return TruncatedSeries(acc)


def revert(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse of a normalized series.

    Uses Lagrange inversion: with ``h = z / f(z)``, the inverse has
    ``b_n = [z^(n-1)] h^n / n``.
    """
    if not f.is_normalized:
        raise NotNormalized("revert needs c0 = 0 and c1 = 1")
    N = f.order
    out = np.zeros(N + 1, dtype=complex)
    out[1] = 1.0
    if N == 1:
        return TruncatedSeries(out)
    ones = np.zeros(N, dtype=complex)
    ones[0] = 1.0
    h = _div_coeffs(ones, f.coeffs[1:])          # z/f, order N-1
    power = h.copy()
    for n in range(2, N + 1):
        power = _mul_coeffs(power, h, N)
        out[n] = power[n - 1] / n
    if not np.all(np.isfinite(out)):
        raise NonFiniteCoefficients("inverse series overflowed")
    return TruncatedSeries(out)


def evaluate(a: TruncatedSeries, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    z = np.asarray(z, dtype=complex)
    acc = np.full(z.shape, a.coeffs[-1], dtype=complex)
    for c in a.coeffs[-2::-1]:
        acc = acc * z + c
    return complex(acc) if acc.ndim == 0 else acc


def evaluate_on_circle(a: TruncatedSeries, r: float, n_theta: int) -> np.ndarray:
    """Values at ``r * exp(2 pi i j / n_theta)``, ``j = 0..n_theta-1``, via one FFT.

    Coefficients above ``n_theta`` are folded, which is exact for a polynomial.
    """
    scaled = a.coeffs * r ** np.arange(a.coeffs.size)
    folded = np.zeros(n_theta, dtype=complex)
    np.add.at(folded, np.arange(scaled.size) % n_theta, scaled)
    return np.fft.ifft(folded) * n_theta
