"""Parameter sweeps, straight-line fits and the entanglement pumping coefficient.

The pumping coefficient (EPC) at a given tau is the slope of K(eta) for the
scattered photon divided by the slope of K(eta) for bare spontaneous emission.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .amplitude import scattered_field, spontaneous_field
from .moments import ratio_R
from .params import ControlParams, GridSpec, default_grid
from .schmidt import schmidt_decompose

MEASURES = frozenset({"R", "K"})
SWEEP_KINDS = ("scattered", "spontaneous")
LINEAR_REGIME_ETA = 5.0

GridPolicy = Callable[[ControlParams], GridSpec]


def grid_policy(n: int = 1000, rule: str = "midpoint") -> GridPolicy:
    """Per-point default grid with ``n`` nodes per axis."""

    def policy(ctrl: ControlParams) -> GridSpec:
        return default_grid(ctrl, n, rule)

    policy.n = n
    return policy


DEFAULT_POLICY = grid_policy(1000)


@dataclass(frozen=True)
class SweepRow:
    eta: float
    tau: float
    R: float = math.nan
    K: float = math.nan
    n_q: int = 0
    n_k: int = 0
    residue: float = math.nan
    error: str = ""


@dataclass(frozen=True)
class SweepTable:
    rows: tuple
    provenance: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def select(self, eta: float | None = None, tau: float | None = None) -> "SweepTable":
        rows = tuple(
            r for r in self.rows
            if (eta is None or r.eta == eta) and (tau is None or r.tau == tau)
        )
        return SweepTable(rows, self.provenance)

    def as_dicts(self) -> list[dict]:
        return [asdict(r) for r in self.rows]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    rms_residual: float
    n_points: int

    def __call__(self, x):
        return self.slope * np.asarray(x) + self.intercept


def _field_for(kind: str, ctrl: ControlParams, grid: GridSpec):
    if kind == "scattered":
        return scattered_field(ctrl, grid)
    return spontaneous_field(ctrl.eta, grid)


def evaluate_point(eta: float, tau: float, measures=MEASURES, policy: GridPolicy = DEFAULT_POLICY,
                   kind: str = "scattered") -> SweepRow:
    """Measures at one (eta, tau); failures are captured in ``SweepRow.error``."""
    try:
        ctrl = ControlParams(eta, tau)
        grid = policy(ctrl)
        values = {"n_q": grid.n_q, "n_k": grid.n_k}
        if measures:
            fld = _field_for(kind, ctrl, grid)
            if "R" in measures:
                values["R"] = ratio_R(fld).ratio
            if "K" in measures:
                spec = schmidt_decompose(fld, n_modes=0)
                values["K"] = spec.K
                values["residue"] = spec.residue
        return SweepRow(float(eta), float(tau), **values)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return SweepRow(float(eta), float(tau), error=f"{type(exc).__name__}: {exc}")


def sweep(etas: Iterable[float], taus: Iterable[float], measures=MEASURES,
          policy: GridPolicy = DEFAULT_POLICY, kind: str = "scattered",
          workers: int = 1) -> SweepTable:
    """Evaluate ``measures`` on the (eta, tau) product, rows sorted by (eta, tau).

    ``workers > 1`` evaluates points on a thread pool; the table is identical
    either way.
    """
    if kind not in SWEEP_KINDS:
        raise ValueError(f"sweeps support {SWEEP_KINDS}, got {kind!r}")
    measures = frozenset(measures)
    unknown = measures - MEASURES
    if unknown:
        raise ValueError(f"unknown measures {sorted(unknown)}; choose from {sorted(MEASURES)}")
    points = sorted({(float(e), float(t)) for e in etas for t in taus})
    for e, t in points:
        if not (e > 0 and t > 0):
            raise ValueError(f"eta and tau must be > 0, got ({e}, {t})")

    def run(point):
        return evaluate_point(point[0], point[1], measures, policy, kind)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(run, points))
    else:
        rows = tuple(run(p) for p in points)
    provenance = {
        "kind": kind,
        "measures": sorted(measures),
        "grid_nodes": getattr(policy, "n", None),
        "version": __version__,
    }
    return SweepTable(rows, provenance)


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> FitResult:
    """Ordinary least-squares line through (xs, ys)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-D and of equal length")
    if x.size < 3:
        raise ValueError(f"need at least 3 points, got {x.size}")
    if np.ptp(x) == 0:
        raise ValueError("all abscissae are equal")
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (slope * x + intercept)
    return FitResult(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))), int(x.size))


def k_slope(etas: Sequence[float], tau: float, policy: GridPolicy = DEFAULT_POLICY,
            kind: str = "scattered") -> FitResult:
    """Straight-line fit of K against eta at fixed tau."""
    table = sweep(etas, [tau], {"K"}, policy, kind)
    bad = [r for r in table.rows if r.error]
    if bad:
        raise ArithmeticError(f"K failed at eta={bad[0].eta}: {bad[0].error}")
    return linear_fit(table.column("eta"), table.column("K"))


def spontaneous_slope(etas: Sequence[float], policy: GridPolicy = DEFAULT_POLICY) -> FitResult:
    """K(eta) fit for bare spontaneous emission (grid sized as for tau = 1)."""
    return k_slope(etas, 1.0, policy, "spontaneous")


def _check_regime(etas: Sequence[float]) -> None:
    if min(etas) < LINEAR_REGIME_ETA:
        raise ValueError(f"EPC fits need eta >= {LINEAR_REGIME_ETA}, got {min(etas)}")


def epc(tau: float, etas: Sequence[float], policy: GridPolicy = DEFAULT_POLICY,
        baseline: FitResult | None = None) -> float:
    """Entanglement pumping coefficient at ``tau``.

    ``baseline`` is the spontaneous-emission K(eta) fit; computed over the same
    ``etas`` when not supplied.
    """
    if not tau > 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    _check_regime(etas)
    if baseline is None:
        baseline = spontaneous_slope(etas, policy)
    return k_slope(etas, tau, policy).slope / baseline.slope


def epc_curve_fit(taus: Sequence[float], epcs: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares fit EPC = a / tau + b; returns (a, b, rms residual)."""
    t = np.asarray(taus, dtype=float)
    y = np.asarray(epcs, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("taus and epcs must be 1-D and of equal length")
    if t.size < 4:
        raise ValueError(f"need at least 4 points, got {t.size}")
    if np.any(t <= 0) or np.any(t > 1):
        raise ValueError("taus must lie in (0, 1]")
    if np.ptp(t) == 0:
        raise ValueError("all taus are equal")
    design = np.column_stack([1.0 / t, np.ones_like(t)])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([a, b])
    return float(a), float(b), float(np.sqrt(np.mean(resid**2)))
