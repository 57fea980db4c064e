"""Coefficient bounds for bi-univalent classes defined by convolution, checked numerically."""

from .bounds import BoundReport, bound_BR, bound_BR_koebe_piecewise, bound_BV, bound_examples_fixture
from .classes import AtomicMeasure, ClassSpec, membership_quadrature, random_pm_beta
from .series import NormalizedFunction, TruncatedSeries, compose, revert

__version__ = "0.1.0"
