"""Schmidt decomposition of joint amplitudes.

The production path factorizes sqrt(w_q) A sqrt(w_k) by SVD. The oracle path
builds the photon density matrix rho(k, k') = sum_q w_q A(q, k) A*(q, k')
explicitly and diagonalizes it with cyclic Jacobi rotations, so it shares no
linear algebra with the production path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.signal import find_peaks

from .amplitude import NORM_TOL, AmplitudeField
from .jacobi import jacobi_eigh
from .params import GridSpec

LAMBDA_FLOOR = 1e-12
ORACLE_MAX_NODES = 256
PEAK_MIN_NODES = 32


class SchmidtConvergenceError(ArithmeticError):
    """Singular value factorization failed to converge."""


class LambdaUnderflowError(ArithmeticError):
    """A Schmidt coefficient is too small to recover its atom mode."""


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    """Schmidt coefficients with the paired mode functions.

    ``photon_modes[n]`` samples phi_n on the k nodes and ``atom_modes[n]``
    samples psi_n on the q nodes, so that A(q, k) = sum_n sqrt(lambda_n)
    psi_n(q) phi_n(k). ``residue`` is sum(sigma^2) - 1 before the coefficients
    were renormalized.
    """

    lambdas: np.ndarray
    K: float
    photon_modes: np.ndarray
    atom_modes: np.ndarray
    grid: GridSpec
    residue: float = 0.0

    @property
    def n_modes(self) -> int:
        return self.photon_modes.shape[0]


def schmidt_number(spectrum) -> float:
    """K = 1 / sum(lambda^2); accepts a spectrum or a bare coefficient sequence."""
    lambdas = spectrum.lambdas if isinstance(spectrum, SchmidtSpectrum) else spectrum
    lambdas = np.asarray(lambdas, dtype=float)
    return float(1.0 / np.sum(lambdas**2))


def _weighted_matrix(field: AmplitudeField) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    sq = np.sqrt(field.grid.q_weights)
    sk = np.sqrt(field.grid.k_weights)
    return sq[:, None] * field.values * sk[None, :], sq, sk


def _fix_gauge(photon: np.ndarray, atom: np.ndarray) -> None:
    """Rotate each pair so the largest photon sample is real positive (in place)."""
    for n in range(photon.shape[0]):
        peak = photon[n, np.argmax(np.abs(photon[n]))]
        if peak != 0:
            u = peak / abs(peak)
            photon[n] *= np.conj(u)
            atom[n] *= u


def _require_normalized(field: AmplitudeField) -> None:
    if not field.normalized or abs(field.norm() - 1.0) > NORM_TOL:
        raise ValueError("Schmidt decomposition requires a normalized field")


def _svd(m: np.ndarray, vectors: bool):
    try:
        return scipy.linalg.svd(m, full_matrices=False, compute_uv=vectors, lapack_driver="gesdd")
    except np.linalg.LinAlgError as first:
        # divide-and-conquer occasionally fails where plain QR iteration does not
        try:
            return scipy.linalg.svd(m, full_matrices=False, compute_uv=vectors, lapack_driver="gesvd")
        except np.linalg.LinAlgError as second:
            raise SchmidtConvergenceError(
                f"SVD of {m.shape} matrix did not converge (gesdd: {first}; gesvd: {second})"
            ) from second


def schmidt_decompose(field: AmplitudeField, n_modes: int | None = 10) -> SchmidtSpectrum:
    """Schmidt coefficients and the leading ``n_modes`` mode pairs.

    ``n_modes=None`` keeps every mode; ``n_modes=0`` skips the singular vectors
    entirely, which is much cheaper when only K is wanted.
    """
    _require_normalized(field)
    rank = min(field.grid.shape)
    if n_modes is None:
        n_modes = rank
    if not 0 <= n_modes <= rank:
        raise ValueError(f"n_modes must lie in [0, {rank}], got {n_modes}")

    m, sq, sk = _weighted_matrix(field)
    if n_modes == 0:
        sigma = _svd(m, vectors=False)
        photon = np.zeros((0, field.grid.n_k), dtype=complex)
        atom = np.zeros((0, field.grid.n_q), dtype=complex)
    else:
        u, sigma, vh = _svd(m, vectors=True)
        photon = vh[:n_modes] / sk[None, :]
        atom = u[:, :n_modes].T / sq[None, :]
        _fix_gauge(photon, atom)

    lambdas = sigma**2
    total = float(np.sum(lambdas))
    lambdas = lambdas / total
    return SchmidtSpectrum(lambdas, schmidt_number(lambdas), photon, atom, field.grid, total - 1.0)


def reconstruct(spectrum: SchmidtSpectrum, n_terms: int | None = None) -> AmplitudeField:
    """Truncated product expansion sum_{n < n_terms} sqrt(lambda_n) psi_n(q) phi_n(k)."""
    if n_terms is None:
        n_terms = spectrum.n_modes
    if not 0 < n_terms <= spectrum.n_modes:
        raise ValueError(f"n_terms must lie in [1, {spectrum.n_modes}], got {n_terms}")
    amp = np.sqrt(spectrum.lambdas[:n_terms])
    values = (spectrum.atom_modes[:n_terms].T * amp) @ spectrum.photon_modes[:n_terms]
    out = AmplitudeField(spectrum.grid, values, "synthetic")
    return AmplitudeField(spectrum.grid, values, "synthetic", abs(out.norm() - 1.0) <= NORM_TOL)


def weighted_distance(a: AmplitudeField, b: AmplitudeField) -> float:
    """Quadrature-weighted L2 distance between two fields on the same grid."""
    diff = AmplitudeField(a.grid, a.values - b.values)
    return float(np.sqrt(diff.norm()))


def atom_modes_from_photon(field: AmplitudeField, spectrum: SchmidtSpectrum, modes=None) -> np.ndarray:
    """Atom modes psi_n(q) = lambda_n^-1/2 * integral dk A(q, k) conj(phi_n(k)).

    ``modes`` lists the mode indices wanted (default: every stored mode).
    Returns an array with one row per requested mode.
    """
    if modes is None:
        modes = range(spectrum.n_modes)
    modes = list(modes)
    for n in modes:
        if not 0 <= n < spectrum.n_modes:
            raise IndexError(f"mode {n} not stored (have {spectrum.n_modes})")
        if spectrum.lambdas[n] < LAMBDA_FLOOR:
            raise LambdaUnderflowError(f"lambda_{n} = {spectrum.lambdas[n]:.3e} below {LAMBDA_FLOOR}")
    wk = field.grid.k_weights
    phi = spectrum.photon_modes[modes]
    integral = field.values @ (np.conj(phi) * wk[None, :]).T
    return (integral / np.sqrt(spectrum.lambdas[modes])[None, :]).T


def mode_overlap(a: np.ndarray, b: np.ndarray, weights: np.ndarray) -> complex:
    """Weighted inner product <a, b> = sum_i w_i conj(a_i) b_i."""
    return complex(np.sum(weights * np.conj(a) * b))


def photon_density_matrix(field: AmplitudeField) -> np.ndarray:
    """rho(k, k') = sum_q w_q A(q, k) conj(A(q, k'))."""
    wq = field.grid.q_weights
    a = field.values
    return (a * wq[:, None]).T @ np.conj(a)


def oracle_schmidt(field: AmplitudeField, n_modes: int = 10) -> SchmidtSpectrum:
    """Brute-force spectrum via the photon density matrix and Jacobi rotations.

    Only meant for small grids (at most 256 nodes per axis). Atom modes are
    recovered from the photon modes by integrating against the amplitude, so
    ``n_modes`` is trimmed to the coefficients above the underflow floor.
    """
    _require_normalized(field)
    g = field.grid
    if max(g.shape) > ORACLE_MAX_NODES:
        raise ValueError(f"oracle limited to {ORACLE_MAX_NODES} nodes per axis, grid is {g.shape}")

    rho = photon_density_matrix(field)
    sk = np.sqrt(g.k_weights)
    h = sk[:, None] * rho * sk[None, :]
    w, v = jacobi_eigh(h)
    w, v = w[::-1], v[:, ::-1]
    lambdas = np.clip(w, 0.0, None)
    total = float(np.sum(lambdas))
    lambdas = lambdas / total

    n_modes = min(n_modes, int(np.sum(lambdas >= LAMBDA_FLOOR)))
    photon = v[:, :n_modes].T / sk[None, :]
    partial = SchmidtSpectrum(lambdas, schmidt_number(lambdas), photon,
                              np.zeros((n_modes, g.n_q), dtype=complex), g, total - 1.0)
    atom = atom_modes_from_photon(field, partial)
    _fix_gauge(photon, atom)
    return SchmidtSpectrum(lambdas, schmidt_number(lambdas), photon, atom, g, total - 1.0)


def count_peaks(mode, rel_threshold: float = 0.05) -> int:
    """Number of local maxima of |mode|^2 above ``rel_threshold`` times its maximum.

    |mode|^2 is smoothed with a 3-point moving average first; flat-topped
    maxima count once.
    """
    p = np.abs(np.asarray(mode)) ** 2
    if p.size < PEAK_MIN_NODES:
        raise ValueError(f"need at least {PEAK_MIN_NODES} samples, got {p.size}")
    padded = np.concatenate(([p[0]], p, [p[-1]]))
    smooth = (padded[:-2] + padded[1:-1] + padded[2:]) / 3.0
    peaks, _ = find_peaks(smooth, height=rel_threshold * smooth.max())
    return int(len(peaks))
