"""Command-line front end writing plot-ready CSV or JSON tables.

    python -m photoatom schmidt --eta 10 --tau 1 --n 1000 --format json
    python -m photoatom epc --taus 0.1,0.2,0.3,0.5,0.7,1.0 --out epc.csv

Exit status: 0 on success, 1 for usage or validation errors, 2 when a
numerical step fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .amplitude import scattered_field, scattered_norm, transmitted_field
from .analysis import (
    epc_curve_fit,
    grid_policy,
    k_slope,
    linear_fit,
    spontaneous_slope,
    sweep,
)
from .moments import ratio_R, ratio_R_asymptotic
from .params import ControlParams, GridSpec, default_grid
from .schmidt import count_peaks, schmidt_decompose

COMMANDS = ("field", "ratio", "schmidt", "sweep", "epc", "transmitted", "converge")
FORMATS = ("csv", "json")
SIG_DIGITS = 12

# commands that dump a full grid default to a smaller one
SMALL_GRID_COMMANDS = {"field": 200, "transmitted": 200}
DEFAULT_TAUS = {"sweep": "0.1,1,10", "epc": "0.1,0.2,0.3,0.5,0.7,1.0"}
DEFAULT_ETAS = {"sweep": "5,10,15,20,30", "epc": "5,10,15,20"}
BASELINE_ETAS = (5.0, 10.0, 15.0, 20.0, 30.0)
CONVERGE_LADDER = ((0.5, 1.0), (1.0, 1.0), (2.0, 2.0))  # (node factor, extent factor)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    eta: float = 10.0
    tau: float = 1.0
    epsilon: float = 0.0
    gc: float | None = None
    n: int | None = None
    q_range: tuple | None = None
    k_range: tuple | None = None
    etas: tuple | None = None
    taus: tuple | None = None
    axis: str = "q"
    fixed: float = 0.0
    modes: int = 3
    format: str = "csv"
    out: str | None = None
    deterministic: bool = True

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        if self.format not in FORMATS:
            raise UsageError(f"format must be csv or json, got {self.format!r}")
        if self.axis not in ("q", "k"):
            raise UsageError(f"axis must be q or k, got {self.axis!r}")
        if self.modes < 1:
            raise UsageError("--modes must be at least 1")

    def effective(self) -> "RunConfig":
        """Fill command-dependent defaults so the stored config is complete."""
        updates = {}
        if self.n is None:
            updates["n"] = SMALL_GRID_COMMANDS.get(self.command, 1000)
        if self.gc is None:
            updates["gc"] = 1.0 if self.command == "transmitted" else 0.0
        if self.etas is None:
            updates["etas"] = _floats(DEFAULT_ETAS.get(self.command, "5,10,15,20,30"))
        if self.taus is None:
            updates["taus"] = _floats(DEFAULT_TAUS.get(self.command, "0.1,1,10"))
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(updates)
        return RunConfig(**values)

    def to_dict(self) -> dict:
        """Everything that affects the output; the output path does not."""
        d = {}
        for f in fields(self):
            if f.name == "out":
                continue
            v = getattr(self, f.name)
            d[f.name] = list(v) if isinstance(v, tuple) else v
        return d

    def controls(self) -> ControlParams:
        return ControlParams(self.eta, self.tau, self.epsilon, self.gc)

    def grid(self, ctrl: ControlParams) -> GridSpec:
        g = default_grid(ctrl, self.n)
        q = self.q_range or (g.q_min, g.q_max)
        k = self.k_range or (g.k_min, g.k_max)
        return GridSpec(q[0], q[1], k[0], k[1], self.n, self.n, g.rule)


def _floats(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _range(text) -> tuple:
    vals = _floats(text)
    if len(vals) != 2:
        raise UsageError(f"expected lo,hi, got {text!r}")
    return vals


# -- number formatting ------------------------------------------------------

def _round(x):
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return None
    # '%g' rounds the exact binary value half-to-even
    return float(f"{x:.{SIG_DIGITS}g}")


def _csv_cell(x) -> str:
    x = _round(x)
    if x is None:
        return "nan"
    if isinstance(x, float):
        return f"{x:.{SIG_DIGITS}g}"
    return str(x)


class Table:
    def __init__(self, name: str, columns: list[str]):
        self.name = name
        self.columns = columns
        self.rows: list[list] = []

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ValueError(f"table {self.name}: expected {len(self.columns)} cells")
        self.rows.append(list(row))
        return self


def render_json(config: dict, tables: list[Table], diagnostics: dict) -> str:
    results = {
        t.name: [{c: _round(v) for c, v in zip(t.columns, row)} for row in t.rows]
        for t in tables
    }
    doc = {"config": config, "results": results, "diagnostics": _round_tree(diagnostics)}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _round_tree(obj):
    if isinstance(obj, dict):
        return {k: _round_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_tree(v) for v in obj]
    return _round(obj)


def render_csv(config: dict, tables: list[Table], diagnostics: dict) -> str:
    lines = [
        f"# photoatom {__version__}",
        "# config: " + json.dumps(config, sort_keys=True),
        "# diagnostics: " + json.dumps(_round_tree(diagnostics), sort_keys=True),
    ]
    for t in tables:
        lines.append(f"# table: {t.name}")
        lines.append(",".join(t.columns))
        lines.extend(",".join(_csv_cell(v) for v in row) for row in t.rows)
    return "\n".join(lines) + "\n"


# -- commands ---------------------------------------------------------------

def _field_table(fld) -> Table:
    t = Table("field", ["dq", "dk", "re", "im", "abs2"])
    q, k = fld.grid.q_nodes, fld.grid.k_nodes
    v = fld.values
    for i in range(len(q)):
        for j in range(len(k)):
            z = v[i, j]
            t.add(q[i], k[j], z.real, z.imag, abs(z) ** 2)
    return t


def _spectrum_tables(spec, n_modes: int) -> list[Table]:
    lam = Table("lambdas", ["n", "lambda"])
    for i, val in enumerate(spec.lambdas[: max(n_modes, 20)]):
        lam.add(i + 1, val)
    photon = Table("photon_modes", ["dk"] + [f"{p}{i + 1}" for i in range(n_modes) for p in ("re", "im")])
    for j, k in enumerate(spec.grid.k_nodes):
        row = [k]
        for i in range(n_modes):
            row += [spec.photon_modes[i, j].real, spec.photon_modes[i, j].imag]
        photon.add(*row)
    atom = Table("atom_modes", ["dq"] + [f"{p}{i + 1}" for i in range(n_modes) for p in ("re", "im")])
    for j, q in enumerate(spec.grid.q_nodes):
        row = [q]
        for i in range(n_modes):
            row += [spec.atom_modes[i, j].real, spec.atom_modes[i, j].imag]
        atom.add(*row)
    return [lam, photon, atom]


def _peaks_table(spec, n_modes: int) -> Table:
    t = Table("peaks", ["mode", "photon_peaks", "atom_peaks"])
    for i in range(n_modes):
        t.add(i + 1, count_peaks(spec.photon_modes[i]), count_peaks(spec.atom_modes[i]))
    return t


def cmd_field(cfg: RunConfig):
    ctrl = cfg.controls()
    grid = cfg.grid(ctrl)
    fld = scattered_field(ctrl, grid)
    return [_field_table(fld)], {"grid": grid.to_dict(), "analytic_norm_N": scattered_norm(ctrl)}


def cmd_ratio(cfg: RunConfig):
    ctrl = cfg.controls()
    grid = cfg.grid(ctrl)
    rep = ratio_R(scattered_field(ctrl, grid), cfg.axis, cfg.fixed)
    asym = ratio_R_asymptotic(ctrl) if ctrl.eta > 1 else math.nan
    t = Table("ratio", ["eta", "tau", "axis", "fixed_axis", "fixed_value",
                        "single_variance", "coinc_variance", "R", "R_asymptotic"])
    t.add(ctrl.eta, ctrl.tau, cfg.axis, rep.fixed_axis, rep.fixed_value,
          rep.single_variance, rep.coinc_variance, rep.ratio, asym)
    return [t], {"grid": grid.to_dict()}


def cmd_schmidt(cfg: RunConfig):
    ctrl = cfg.controls()
    grid = cfg.grid(ctrl)
    spec = schmidt_decompose(scattered_field(ctrl, grid), cfg.modes)
    summary = Table("summary", ["eta", "tau", "K"]).add(ctrl.eta, ctrl.tau, spec.K)
    tables = [summary, _peaks_table(spec, cfg.modes)] + _spectrum_tables(spec, cfg.modes)
    return tables, {"grid": grid.to_dict(), "lambda_residue": spec.residue}


def cmd_transmitted(cfg: RunConfig):
    ctrl = cfg.controls()
    grid = cfg.grid(ctrl)
    fld = transmitted_field(ctrl.eta, ctrl, grid)
    spec = schmidt_decompose(fld, cfg.modes)
    rep = ratio_R(fld, cfg.axis, cfg.fixed)
    summary = Table("summary", ["eta", "tau", "gc", "R", "K"]).add(ctrl.eta, ctrl.tau, ctrl.g_c, rep.ratio, spec.K)
    tables = [summary, _peaks_table(spec, cfg.modes)] + _spectrum_tables(spec, cfg.modes) + [_field_table(fld)]
    return tables, {"grid": grid.to_dict(), "lambda_residue": spec.residue}


def cmd_sweep(cfg: RunConfig):
    policy = grid_policy(cfg.n)
    table = sweep(cfg.etas, cfg.taus, {"R", "K"}, policy)
    rows = Table("sweep", ["eta", "tau", "R", "K", "n_q", "n_k", "residue", "error"])
    for r in table.rows:
        rows.add(r.eta, r.tau, r.R, r.K, r.n_q, r.n_k, r.residue, r.error)
    fits = Table("fits", ["tau", "measure", "slope", "intercept", "rms_residual", "n_points"])
    for tau in cfg.taus:
        sub = table.select(tau=tau)
        ok = [r for r in sub.rows if not r.error]
        if len(ok) >= 3 and len({r.eta for r in ok}) > 1:
            for measure in ("R", "K"):
                f = linear_fit([r.eta for r in ok], [getattr(r, measure) for r in ok])
                fits.add(tau, measure, f.slope, f.intercept, f.rms_residual, f.n_points)
    failed = sum(1 for r in table.rows if r.error)
    return [rows, fits], {"failed_points": failed, "provenance": table.provenance}


def cmd_epc(cfg: RunConfig):
    policy = grid_policy(cfg.n)
    if min(cfg.etas) < 5:
        raise ValueError("EPC needs etas >= 5 (linear regime)")
    base = spontaneous_slope(BASELINE_ETAS, policy)
    t = Table("epc", ["tau", "k_slope", "k_intercept", "epc"])
    values = []
    for tau in cfg.taus:
        fit = k_slope(cfg.etas, tau, policy)
        values.append(fit.slope / base.slope)
        t.add(tau, fit.slope, fit.intercept, values[-1])
    baseline = Table("baseline", ["slope", "intercept", "rms_residual", "n_points"])
    baseline.add(base.slope, base.intercept, base.rms_residual, base.n_points)
    tables = [t, baseline]
    if len(cfg.taus) >= 4:
        a, b, rms = epc_curve_fit(cfg.taus, values)
        tables.append(Table("fit", ["a", "b", "rms_residual"]).add(a, b, rms))
    return tables, {"baseline_etas": list(BASELINE_ETAS)}


def cmd_converge(cfg: RunConfig):
    ctrl = cfg.controls()
    base = cfg.grid(ctrl)
    t = Table("ladder", ["level", "n", "q_max", "k_max", "K", "R", "K_rel_delta", "R_rel_delta"])
    prev = None
    for level, (nodes, extent) in enumerate(CONVERGE_LADDER):
        grid = base.scaled(extent, nodes)
        fld = scattered_field(ctrl, grid)
        K = schmidt_decompose(fld, 0).K
        R = ratio_R(fld, cfg.axis, cfg.fixed).ratio
        dK = math.nan if prev is None else abs(K - prev[0]) / prev[0]
        dR = math.nan if prev is None else abs(R - prev[1]) / prev[1]
        t.add(level, grid.n_q, grid.q_max, grid.k_max, K, R, dK, dR)
        prev = (K, R)
    return [t], {"ladder": [list(x) for x in CONVERGE_LADDER]}


HANDLERS = {
    "field": cmd_field,
    "ratio": cmd_ratio,
    "schmidt": cmd_schmidt,
    "sweep": cmd_sweep,
    "epc": cmd_epc,
    "transmitted": cmd_transmitted,
    "converge": cmd_converge,
}


# -- argument handling ------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="photoatom", description="Photon-atom momentum entanglement calculations.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--eta", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--gc", type=float, help="forward-channel coupling (transmitted only)")
    p.add_argument("--n", type=int, help="nodes per grid axis")
    p.add_argument("--q-range", dest="q_range", help="lo,hi for dq")
    p.add_argument("--k-range", dest="k_range", help="lo,hi for dk")
    p.add_argument("--etas", help="comma-separated eta list")
    p.add_argument("--taus", help="comma-separated tau list")
    p.add_argument("--axis", choices=("q", "k"))
    p.add_argument("--fixed", type=float, help="partner coordinate for the coincidence slice")
    p.add_argument("--modes", type=int, help="Schmidt modes to report")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--config", help="flat JSON file with the same keys as the flags")
    return p


_CONVERTERS = {
    "q_range": _range, "k_range": _range, "etas": _floats, "taus": _floats,
    "eta": float, "tau": float, "epsilon": float, "gc": float, "fixed": float,
    "n": int, "modes": int,
}


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                stored = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(stored, dict):
            raise UsageError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)}
        for key, v in stored.items():
            key = key.replace("-", "_")
            if key not in known:
                raise UsageError(f"unknown config key {key!r}")
            values[key] = v
    for key, v in vars(args).items():
        if key != "config" and v is not None:
            values[key] = v
    for key, conv in _CONVERTERS.items():
        if values.get(key) is not None:
            try:
                values[key] = conv(values[key])
            except (TypeError, ValueError):
                raise UsageError(f"bad value for {key}: {values[key]!r}") from None
    values.pop("deterministic", None)
    return RunConfig(**values).effective()


def run(cfg: RunConfig) -> str:
    """Execute ``cfg`` and return the rendered document."""
    tables, diagnostics = HANDLERS[cfg.command](cfg)
    render = render_json if cfg.format == "json" else render_csv
    return render(cfg.to_dict(), tables, diagnostics)


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        cfg.controls()  # validate parameters before any work
        if cfg.n < 8:
            raise ValueError("--n must be at least 8")
        text = run(cfg)
        if cfg.out:
            with open(cfg.out, "w", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (UsageError, ValueError, OSError) as exc:
        print(f"photoatom: error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"photoatom: numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
