"""Joint photon-atom momentum amplitudes on quadrature grids.

Three closed-form states are provided, all in dimensionless coordinates
(dq = atomic recoil momentum, dk = photon detuning):

* scattered    photon detected perpendicular to the incident beam
* transmitted  photon detected along the incident beam, where the free and
               scattered waves interfere
* spontaneous  bare emission with recoil, the reference for entanglement gain
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ControlParams, GridSpec

KINDS = ("scattered", "transmitted", "spontaneous", "synthetic")
NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class AmplitudeField:
    """Complex amplitude sampled on ``grid``; ``values[i, j]`` sits at (q_i, k_j)."""

    grid: GridSpec
    values: np.ndarray
    kind: str = "synthetic"
    normalized: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise ValueError(f"values shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("amplitude contains non-finite entries")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.normalized and abs(self.norm() - 1.0) > NORM_TOL:
            raise ValueError(f"field flagged normalized but has norm {self.norm()!r}")

    def density(self) -> np.ndarray:
        """Quadrature-weighted probability mass per node, w_q * w_k * |A|^2."""
        g = self.grid
        return np.outer(g.q_weights, g.k_weights) * np.abs(self.values) ** 2

    def norm(self) -> float:
        # fixed-order reduction: rows first, then the row totals
        return float(np.sum(np.sum(self.density(), axis=1)))

    def normalize(self) -> "AmplitudeField":
        total = self.norm()
        if not total > 0:
            raise ValueError("cannot normalize a field with zero norm")
        return AmplitudeField(self.grid, self.values / math.sqrt(total), self.kind, True)

    def transposed(self) -> "AmplitudeField":
        """Exchange the roles of the atom and photon axes."""
        return AmplitudeField(self.grid.transposed(), self.values.T, self.kind, self.normalized)

    def with_phase(self, phase: float) -> "AmplitudeField":
        return AmplitudeField(self.grid, self.values * np.exp(1j * phase), self.kind, self.normalized)


def _mesh(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    return grid.q_nodes[:, None], grid.k_nodes[None, :]


def scattered_norm(ctrl: ControlParams) -> float:
    """Analytic normalization N, N^2 = sqrt(2) (1 + tau) / (pi^1.5 tau eta)."""
    return math.sqrt(math.sqrt(2.0) * (1.0 + ctrl.tau) / (math.pi**1.5 * ctrl.tau * ctrl.eta))


def spontaneous_norm(eta: float) -> float:
    """Analytic normalization N_s, N_s^2 = sqrt(2) / (pi^1.5 eta)."""
    return math.sqrt(math.sqrt(2.0) / (math.pi**1.5 * eta))


def scattered_point(ctrl: ControlParams, dq, dk):
    """Scattered amplitude at (dq, dk); broadcasts over array arguments.

    N exp[-(dq/eta)^2] / [(s + epsilon + i)(s/tau + i)] with s = dq + dk.
    """
    dq = np.asarray(dq, dtype=float)
    s = dq + np.asarray(dk, dtype=float)
    value = (
        scattered_norm(ctrl)
        * np.exp(-((dq / ctrl.eta) ** 2))
        / ((s + ctrl.epsilon + 1j) * (s / ctrl.tau + 1j))
    )
    return value[()] if value.ndim == 0 else value


def scattered_field(ctrl: ControlParams, grid: GridSpec) -> AmplitudeField:
    q, k = _mesh(grid)
    raw = AmplitudeField(grid, scattered_point(ctrl, q, k), "scattered")
    return raw.normalize()


def spontaneous_point(eta: float, dq, dk):
    """Emission-with-recoil amplitude N_s exp[-(dq/eta)^2] / (dq + dk + i)."""
    if not eta > 0:
        raise ValueError(f"eta must be > 0, got {eta!r}")
    dq = np.asarray(dq, dtype=float)
    value = spontaneous_norm(eta) * np.exp(-((dq / eta) ** 2)) / (dq + np.asarray(dk, dtype=float) + 1j)
    return value[()] if value.ndim == 0 else value


def spontaneous_field(eta: float, grid: GridSpec) -> AmplitudeField:
    q, k = _mesh(grid)
    return AmplitudeField(grid, spontaneous_point(eta, q, k), "spontaneous").normalize()


def photon_profile(dk, tau: float):
    """Incident single-photon spectral amplitude, a complex Lorentzian of width tau."""
    return 1.0 / (1.0 + 1j * np.asarray(dk, dtype=float) / tau)


def transmitted_point(eta: float, ctrl: ControlParams, dq, dk):
    """Forward-channel amplitude before normalization.

    G(dq) P(dk) [-1 + g_c / (1 - i (dq + dk + epsilon))]: the free incident wave
    plus the scattered wave, written with the common factor pulled out.
    """
    if not eta > 0:
        raise ValueError(f"eta must be > 0, got {eta!r}")
    dq = np.asarray(dq, dtype=float)
    dk = np.asarray(dk, dtype=float)
    s = dq + dk + ctrl.epsilon
    value = np.exp(-((dq / eta) ** 2)) * photon_profile(dk, ctrl.tau) * (-1.0 + ctrl.g_c / (1.0 - 1j * s))
    return value[()] if value.ndim == 0 else value


def transmitted_field(eta: float, ctrl: ControlParams, grid: GridSpec) -> AmplitudeField:
    """Forward-channel field; ``eta`` is the atomic spread along the beam axis."""
    q, k = _mesh(grid)
    return AmplitudeField(grid, transmitted_point(eta, ctrl, q, k), "transmitted").normalize()


def separable_field(grid: GridSpec, atom, photon) -> AmplitudeField:
    """Product state atom(q) * photon(k), normalized; arguments are callables."""
    values = np.outer(atom(grid.q_nodes), photon(grid.k_nodes))
    return AmplitudeField(grid, values, "synthetic").normalize()
