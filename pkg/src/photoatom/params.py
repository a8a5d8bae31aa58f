"""Dimensionless control parameters, physical-unit conversion and momentum grids."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

AXES = ("x", "y", "z")
RULES = ("midpoint", "trapezoid")

# Grid extents, in units of max(eta, 1) along dq and (1 + tau) along dk.
Q_EXTENT = 6.0
K_EXTENT = 50.0
MIN_NODES = 8


@dataclass(frozen=True)
class ControlParams:
    """The knobs that fully determine every joint amplitude.

    eta      atomic momentum spread, dq * hbar * k0 / (m * Gamma)
    tau      incident photon linewidth, dk / (Gamma / c)
    epsilon  recoil shift hbar * k0**2 / (2 * m * Gamma); usually negligible
    g_c      strength of the scattered term in the forward (transmitted) channel
    """

    eta: float
    tau: float
    epsilon: float = 0.0
    g_c: float = 0.0

    def __post_init__(self):
        for name in ("eta", "tau"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        for name in ("epsilon", "g_c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")


Bandwidth = Union[float, Sequence[float]]


def _per_axis(value: Bandwidth, name: str) -> tuple[float, float, float]:
    if np.ndim(value) == 0:
        vals = (float(value),) * 3
    else:
        vals = tuple(float(v) for v in value)
        if len(vals) != 3:
            raise ValueError(f"{name} needs one value per axis (x, y, z)")
    return vals


@dataclass(frozen=True)
class PhysicalParams:
    """Raw physical quantities in any consistent unit system.

    ``dq`` and ``dk`` are the atomic momentum and photon wavenumber bandwidths;
    either a scalar (same on every axis) or an (x, y, z) triple.
    """

    mass: float
    gamma: float
    k0: float
    c: float
    hbar: float
    dq: Bandwidth
    dk: Bandwidth

    def __post_init__(self):
        for name in ("mass", "gamma", "k0", "c", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        for name in ("dq", "dk"):
            vals = _per_axis(getattr(self, name), name)
            if not all(math.isfinite(v) and v > 0 for v in vals):
                raise ValueError(f"{name} must be finite and > 0 on every axis")
            object.__setattr__(self, name, vals)

    def eta(self, axis: str) -> float:
        return self.dq[_axis_index(axis)] * self.hbar * self.k0 / (self.mass * self.gamma)

    def tau(self, axis: str) -> float:
        return self.dk[_axis_index(axis)] * self.c / self.gamma

    @property
    def epsilon(self) -> float:
        return self.hbar * self.k0**2 / (2.0 * self.mass * self.gamma)

    @property
    def g_c(self) -> float:
        ratio = self.gamma / (self.c * self.k0)
        return math.pi / 4.0 * ratio**2 * self.tau("x") * self.tau("y")


def _axis_index(axis: str) -> int:
    try:
        return AXES.index(axis)
    except ValueError:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}") from None


def derive_controls(phys: PhysicalParams, axis_q: str = "x", axis_k: str = "z") -> ControlParams:
    """Convert physical quantities to the dimensionless controls.

    ``axis_q`` selects the atomic bandwidth that sets eta (x for the scattered
    geometry, z for the transmitted one); ``axis_k`` the photon bandwidth that
    sets tau (the incident direction, z).
    """
    return ControlParams(
        eta=phys.eta(axis_q),
        tau=phys.tau(axis_k),
        epsilon=phys.epsilon,
        g_c=phys.g_c,
    )


def rubidium_d2(dq: Bandwidth = 1.0e7, dk: Bandwidth = 1.0) -> PhysicalParams:
    """SI parameters for the 87Rb D2 line (780.24 nm, Gamma = 2 pi x 6.07 MHz).

    An ordinary optical atom: epsilon comes out near 6e-4.
    """
    from scipy import constants

    return PhysicalParams(
        mass=86.909180527 * constants.atomic_mass,
        gamma=2 * math.pi * 6.0666e6,
        k0=2 * math.pi / 780.241e-9,
        c=constants.c,
        hbar=constants.hbar,
        dq=dq,
        dk=dk,
    )


def _nodes(lo: float, hi: float, n: int, rule: str) -> np.ndarray:
    # centre + half * j / m with integer j symmetric about 0, so symmetric
    # ranges give exactly mirrored nodes
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    j = np.arange(1 - n, n, 2, dtype=float)
    return centre + half * (j / (n if rule == "midpoint" else n - 1))


def _weights(lo: float, hi: float, n: int, rule: str) -> np.ndarray:
    if rule == "midpoint":
        return np.full(n, (hi - lo) / n)
    w = np.full(n, (hi - lo) / (n - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


@dataclass(frozen=True)
class GridSpec:
    """Tensor-product quadrature grid over (dq, dk)."""

    q_min: float
    q_max: float
    k_min: float
    k_max: float
    n_q: int
    n_k: int
    rule: str = "midpoint"

    def __post_init__(self):
        if not (self.q_min < self.q_max and self.k_min < self.k_max):
            raise ValueError("grid ranges must satisfy min < max")
        if not all(math.isfinite(v) for v in (self.q_min, self.q_max, self.k_min, self.k_max)):
            raise ValueError("grid ranges must be finite")
        if int(self.n_q) != self.n_q or int(self.n_k) != self.n_k:
            raise ValueError("node counts must be integers")
        if self.n_q < MIN_NODES or self.n_k < MIN_NODES:
            raise ValueError(f"need at least {MIN_NODES} nodes per axis")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}, got {self.rule!r}")
        object.__setattr__(self, "n_q", int(self.n_q))
        object.__setattr__(self, "n_k", int(self.n_k))

    @property
    def q_nodes(self) -> np.ndarray:
        return _nodes(self.q_min, self.q_max, self.n_q, self.rule)

    @property
    def k_nodes(self) -> np.ndarray:
        return _nodes(self.k_min, self.k_max, self.n_k, self.rule)

    @property
    def q_weights(self) -> np.ndarray:
        return _weights(self.q_min, self.q_max, self.n_q, self.rule)

    @property
    def k_weights(self) -> np.ndarray:
        return _weights(self.k_min, self.k_max, self.n_k, self.rule)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_q, self.n_k)

    def transposed(self) -> "GridSpec":
        """Same grid with the roles of the two axes exchanged."""
        return GridSpec(self.k_min, self.k_max, self.q_min, self.q_max, self.n_k, self.n_q, self.rule)

    def scaled(self, extent: float = 1.0, nodes: float = 1.0) -> "GridSpec":
        """Stretch both ranges about their centres by ``extent`` and the node counts by ``nodes``."""
        qc, qh = 0.5 * (self.q_min + self.q_max), 0.5 * (self.q_max - self.q_min) * extent
        kc, kh = 0.5 * (self.k_min + self.k_max), 0.5 * (self.k_max - self.k_min) * extent
        return GridSpec(
            qc - qh, qc + qh, kc - kh, kc + kh,
            max(MIN_NODES, int(round(self.n_q * nodes))),
            max(MIN_NODES, int(round(self.n_k * nodes))),
            self.rule,
        )

    def to_dict(self) -> dict:
        return {
            "q_min": self.q_min, "q_max": self.q_max,
            "k_min": self.k_min, "k_max": self.k_max,
            "n_q": self.n_q, "n_k": self.n_k, "rule": self.rule,
        }


def default_grid(ctrl: ControlParams, n: int = 1000, rule: str = "midpoint") -> GridSpec:
    """Grid wide enough for the Gaussian in dq and the Lorentzian tails in dk.

    dq spans +-6 max(eta, 1) and dk spans +-50 (1 + tau), n nodes per axis.
    """
    if n < MIN_NODES:
        raise ValueError(f"need at least {MIN_NODES} nodes per axis, got {n}")
    q = Q_EXTENT * max(ctrl.eta, 1.0)
    k = K_EXTENT * (1.0 + ctrl.tau)
    return GridSpec(-q, q, -k, k, n, n, rule)
