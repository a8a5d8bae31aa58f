"""Single-particle and coincidence momentum variances, and their ratio R."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .amplitude import AmplitudeField
from .params import ControlParams

AXIS_TAGS = ("q", "k")
SLICE_FLOOR = 1e-12


class DegenerateFieldError(ValueError):
    """The field carries no probability mass."""


class SliceUnderflowError(ArithmeticError):
    """A coincidence slice has negligible weight relative to the whole field."""


@dataclass(frozen=True)
class VarianceReport:
    single_variance: float
    coinc_variance: float
    fixed_axis: str
    fixed_value: float
    ratio: float

    def __post_init__(self):
        for name in ("single_variance", "coinc_variance"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")


def _check_axis(axis: str) -> None:
    if axis not in AXIS_TAGS:
        raise ValueError(f"axis must be one of {AXIS_TAGS}, got {axis!r}")


def _variance(x: np.ndarray, mass: np.ndarray) -> float:
    p = mass / np.sum(mass)
    mean = np.sum(x * p)
    return float(max(np.sum((x - mean) ** 2 * p), 0.0))


def _oriented(field: AmplitudeField, axis: str):
    """Density with the measured axis first, plus that axis' nodes and the other's."""
    _check_axis(axis)
    rho = field.density()
    g = field.grid
    if axis == "q":
        return rho, g.q_nodes, g.k_nodes
    return rho.T, g.k_nodes, g.q_nodes


def unconditional_variance(field: AmplitudeField, axis: str = "q") -> float:
    """Variance of one coordinate with the partner left unobserved."""
    rho, x, _ = _oriented(field, axis)
    marginal = np.sum(rho, axis=1)
    if not np.sum(marginal) > 0:
        raise DegenerateFieldError("field has zero norm")
    return _variance(x, marginal)


def nearest_node(nodes: np.ndarray, value: float) -> int:
    # ties (value midway between two nodes) go to the lower index
    return int(np.argmin(np.abs(nodes - value)))


def conditional_variance(field: AmplitudeField, axis: str = "q", fixed_value: float = 0.0) -> float:
    """Variance of ``axis`` given the partner coordinate at ``fixed_value``.

    The slice is taken at the grid node nearest ``fixed_value``.
    """
    rho, x, other = _oriented(field, axis)
    lo, hi = other[0], other[-1]
    if not lo <= fixed_value <= hi:
        raise ValueError(f"fixed value {fixed_value} outside grid range [{lo}, {hi}]")
    total = np.sum(rho)
    if not total > 0:
        raise DegenerateFieldError("field has zero norm")
    j = nearest_node(other, fixed_value)
    cut = rho[:, j]
    if np.sum(cut) <= SLICE_FLOOR * total:
        raise SliceUnderflowError(
            f"slice at {other[j]:.6g} holds {np.sum(cut) / total:.3e} of the norm"
        )
    return _variance(x, cut)


def ratio_R(field: AmplitudeField, axis: str = "q", fixed_value: float = 0.0) -> VarianceReport:
    """Single over coincidence standard deviation of ``axis``.

    The partner coordinate is fixed at ``fixed_value``; R = 1 for product states.
    """
    single = unconditional_variance(field, axis)
    coinc = conditional_variance(field, axis, fixed_value)
    if coinc == 0:
        raise SliceUnderflowError("coincidence slice has zero width")
    fixed_axis = "k" if axis == "q" else "q"
    return VarianceReport(single, coinc, fixed_axis, float(fixed_value), math.sqrt(single / coinc))


def ratio_R_asymptotic(ctrl: ControlParams) -> float:
    """Large-eta estimate (eta + sqrt(2/pi) (1 + tau)) / (2 sqrt(tau))."""
    if ctrl.eta <= 1:
        warnings.warn(f"asymptotic R is only valid for eta > 1 (got {ctrl.eta})", stacklevel=2)
    return (ctrl.eta + math.sqrt(2.0 / math.pi) * (1.0 + ctrl.tau)) / (2.0 * math.sqrt(ctrl.tau))
