"""Built-in convolution kernels, all normalized (k(0) = 0, k'(0) = 1)."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .series import DEFAULT_ORDER, NormalizedFunction


def koebe(order: int = DEFAULT_ORDER) -> NormalizedFunction:
    """z / (1 - z)^2, coefficients n."""
    return NormalizedFunction(np.arange(order + 1, dtype=complex))


def halfplane(order: int = DEFAULT_ORDER) -> NormalizedFunction:
    """z / (1 - z), all coefficients 1 (the identity for the Hadamard product)."""
    c = np.ones(order + 1, dtype=complex)
    c[0] = 0
    return NormalizedFunction(c)


def log_kernel(order: int = DEFAULT_ORDER) -> NormalizedFunction:
    """-log(1 - z), coefficients 1/n."""
    n = np.arange(order + 1, dtype=float)
    c = np.zeros(order + 1, dtype=complex)
    c[1:] = 1.0 / n[1:]
    return NormalizedFunction(c)


def from_coeffs(tail: Sequence[complex], order: int = DEFAULT_ORDER) -> NormalizedFunction:
    """``z + tail[0] z^2 + tail[1] z^3 + ...``; unspecified coefficients are zero."""
    return NormalizedFunction.from_tail(list(tail), order=order)


KERNELS = {"koebe": koebe, "halfplane": halfplane, "log": log_kernel}


def by_name(name: str, order: int = DEFAULT_ORDER) -> NormalizedFunction:
    try:
        return KERNELS[name](order)
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; choose from {sorted(KERNELS)}") from None
