"""Command-line surface: constant tables, integral tables, single solves,
the verification suite, parameter scans, effective mass, and the binding
expansion.

Exit status: 0 when no check failed (skips allowed), 1 when at least one
check failed, 2 on usage or configuration errors, 3 on internal errors.

Output is deterministic: the same argv produces byte-identical bytes (no
timestamps), and numeric tables carry full-precision values (17 significant
digits) next to a rounded display column.
"""

import os
import sys

# Reproducibility: identical invocations must emit identical bytes no matter
# how many BLAS/OpenMP threads the host would otherwise use, so the numeric
# backends are pinned to one thread here, before numpy first loads.  The
# package __init__ imports submodules lazily to keep this effective.
if "numpy" not in sys.modules:
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "VECLIB_MAXIMUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ[_var] = "1"

import argparse
import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import closedform as cf
from . import quadrature as qd
from .fockspace import FockBasis, build_modes, scale_modes
from .model import (
    DomainError,
    ParameterError,
    base_frame,
    frame_for,
    make_params,
)
from .observables import ground_state_report
from .particle import PositionGrid, radial_resolvent_l1
from .spectral import (
    assemble,
    effective_mass_numeric,
    effective_mass_riemann,
    lanczos_ground,
)
from .verify import Resolution, run_suite, suite_passed, suite_to_csv, suite_to_json


class UsageError(Exception):
    """Bad flags or config-file contents; maps to exit status 2."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

# canonical key (flag name and config-file key) -> RunConfig field
_CONFIG_KEYS = (
    ("e", "e", float),
    ("Z", "Z", float),
    ("m", "m", float),
    ("kappa", "kappa", float),
    ("lambda", "lam", float),
    ("tau", "tau", float),
    ("lambda1", "lambda1", float),
    ("grid-n", "n", int),
    ("box-L", "L", float),
    ("modes-radial", "n_radial", int),
    ("modes-angular", "n_angular", int),
    ("nmax", "n_max", int),
    ("tol", "tol", float),
    ("maxit", "maxit", int),
    ("format", "format", str),
    ("out", "out", str),
    ("select", "select", str),
    ("axis", "axis", str),
    ("from", "start", float),
    ("to", "stop", float),
    ("steps", "steps", int),
)
_KEY_TO_FIELD = {key: (field, cast) for key, field, cast in _CONFIG_KEYS}
_FIELD_TO_KEY = {field: key for key, field, _ in _CONFIG_KEYS}
_SCAN_AXES = ("e", "Z", "kappa", "lambda")


@dataclass(frozen=True)
class RunConfig:
    """Effective parameters of one invocation (defaults + config file + flags)."""

    command: str
    e: float = 0.0
    Z: float = 1.0
    m: float = 1.0
    kappa: float = 0.1
    lam: float = 10.0
    tau: float = 0.0
    lambda1: float = 1.0
    n: int = 16
    L: float = 10.0
    n_radial: int = 4
    n_angular: int = 1
    n_max: int = 2
    tol: float = 1e-9
    maxit: int = 400
    format: str = "json"
    out: str | None = None
    select: str | None = None
    axis: str | None = None
    start: float | None = None
    stop: float | None = None
    steps: int = 10

    @property
    def selection(self) -> list[str] | None:
        if self.select is None:
            return None
        parts = [p.strip() for p in self.select.split(",") if p.strip()]
        if not parts:
            raise UsageError("empty --select filter")
        return parts

    def echo(self) -> dict:
        """Effective config for output headers, canonical keys, no Nones."""
        out = {"command": self.command}
        for key, field, _ in _CONFIG_KEYS:
            value = getattr(self, field)
            if value is not None:
                out[key] = value
        return out


def _parse_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    table: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        if key in ("command", "config"):
            raise UsageError(f"{path}:{lineno}: {key!r} cannot be set from a config file")
        if key not in _KEY_TO_FIELD:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        table[key] = value
    return table


def _cast(key: str, raw: str):
    field, cast = _KEY_TO_FIELD[key]
    if cast is str:
        return raw
    try:
        if cast is int:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise UsageError(f"config key {key!r}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nelsonlab",
        description="constants, integrals, solves, and inequality checks "
        "for the cutoff atom-field model",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "constants": "closed-form constant table and the overlap charge window",
        "integrals": "shell-integral norms against their closed-form ceilings",
        "solve": "ground-state solve and observable report",
        "verify": "inequality and identity suite on a computed ground state",
        "scan": "verification suite swept along one parameter axis",
        "effmass": "effective mass: numeric second order vs mode-sum prediction",
        "binding": "second-order binding shift: ratio-one, resolvent, envelope",
    }
    for name, help_text in specs.items():
        sp = sub.add_parser(name, help=help_text)
        for flag, dest in (
            ("--e", "e"),
            ("--Z", "Z"),
            ("--m", "m"),
            ("--kappa", "kappa"),
            ("--lambda", "lam"),
            ("--tau", "tau"),
            ("--lambda1", "lambda1"),
            ("--box-L", "L"),
            ("--tol", "tol"),
        ):
            sp.add_argument(flag, dest=dest, type=float, default=None)
        for flag, dest in (
            ("--grid-n", "n"),
            ("--modes-radial", "n_radial"),
            ("--modes-angular", "n_angular"),
            ("--nmax", "n_max"),
            ("--maxit", "maxit"),
        ):
            sp.add_argument(flag, dest=dest, type=int, default=None)
        sp.add_argument("--format", choices=("json", "csv"), default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--select", default=None)
        sp.add_argument("--config", default=None)
        if name == "scan":
            sp.add_argument("--axis", choices=_SCAN_AXES, default=None)
            sp.add_argument("--from", dest="start", type=float, default=None)
            sp.add_argument("--to", dest="stop", type=float, default=None)
            sp.add_argument("--steps", type=int, default=None)
    return parser


def build_config(argv: list[str]) -> RunConfig:
    """Defaults, overlaid by the config file, overlaid by explicit flags."""
    ns = _build_parser().parse_args(argv)
    cfg = RunConfig(command=ns.command)
    file_table = {} if ns.config is None else _parse_config_file(ns.config)
    if file_table:
        updates = {
            _KEY_TO_FIELD[key][0]: _cast(key, raw) for key, raw in file_table.items()
        }
        cfg = replace(cfg, **updates)
    flag_updates = {}
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        value = getattr(ns, f.name, None)
        if value is not None:
            flag_updates[f.name] = value
    if flag_updates:
        cfg = replace(cfg, **flag_updates)
    if cfg.command == "scan" and ns.format is None and "format" not in file_table:
        cfg = replace(cfg, format="csv")  # a scan is a plot-ready sweep
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.format not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {cfg.format!r}")
    if cfg.command in ("verify", "scan") and cfg.tau != 0.0:
        raise UsageError("the verification suite runs in the defining frame; tau must be 0")
    if cfg.command == "scan":
        if cfg.axis is None or cfg.start is None or cfg.stop is None:
            raise UsageError("scan needs --axis, --from, and --to")
        if cfg.axis not in _SCAN_AXES:
            raise UsageError(f"scan axis must be one of {_SCAN_AXES}, got {cfg.axis!r}")
        if cfg.steps < 1:
            raise UsageError(f"steps must be >= 1, got {cfg.steps}")
    cfg.selection  # validated on access


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _f17(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return f"{v:.17g}"


def _display(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, str):
        return v
    return f"{v:.6g}"


def _jsonable(v):
    """Floats survive as JSON numbers; non-finite values become strings."""
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v == math.inf else "-inf" if v == -math.inf else "nan"
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return _jsonable(float(v))
    return v


def _to_json(payload: dict) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"


def _echo_lines(cfg: RunConfig) -> list[str]:
    return [f"# {k}={v}" for k, v in cfg.echo().items()]


def _table_csv(cfg: RunConfig, columns: tuple[str, ...], rows: list[dict]) -> str:
    lines = _echo_lines(cfg)
    lines.append(",".join(columns))
    for row in rows:
        cells = []
        for col in columns:
            v = row.get(col)
            cells.append(_display(v) if col == "display" else _f17(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _emit_table(cfg: RunConfig, rows: list[dict], columns: tuple[str, ...]) -> str:
    if cfg.format == "csv":
        return _table_csv(cfg, columns, rows)
    return _to_json({"config": cfg.echo(), "rows": rows})


def _row(rows: list, name: str, fn, **extra) -> None:
    """Evaluate one table entry; out-of-domain entries stay in the table."""
    try:
        value = fn()
        if isinstance(value, (float, int, np.floating)):
            value = float(value)
    except (DomainError, ParameterError) as exc:
        rows.append({"name": name, "value": None, "display": f"n/a ({exc})", **extra})
        return
    rows.append({"name": name, "value": value, "display": _display(value), **extra})


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _chain_tau(cfg: RunConfig) -> float:
    # the overlap chain needs tau in (3/4, 1]; fall back to its reference 0.9
    return cfg.tau if 0.75 < cfg.tau <= 1.0 else 0.9


def cmd_constants(cfg: RunConfig) -> tuple[str, int]:
    params = make_params(cfg.e, cfg.Z, m=cfg.m, kappa=cfg.kappa, lam=cfg.lam)
    e, Z = params.e, params.Z
    rows: list[dict] = []
    _row(rows, "alpha", lambda: e * e / (4.0 * math.pi))
    _row(rows, "alphaZ", lambda: params.alphaZ)
    _row(rows, "E_at", lambda: cf.atomic_level(e, Z))
    _row(rows, "C_UV", lambda: cf.c_uv(e, Z))

    def star_pair():
        if cfg.tau == 0.0:
            return cf.c_star_c1(e, Z)
        fr = frame_for(params, cfg.tau, cfg.lambda1)
        return cf.c_star_c1(e, Z, cfg.tau, fr.rho)

    _row(rows, "C_star", lambda: star_pair()[0])
    _row(rows, "C_1", lambda: star_pair()[1])
    _row(rows, "C_D", lambda: cf.c_d(e, Z))
    _row(rows, "coupling_log", lambda: cf.coupling_log(e, Z))
    _row(rows, "photon_K", lambda: cf.photon_k(e, Z))
    _row(rows, "photons.hard", lambda: cf.hard_photon_bound(e, Z))
    _row(rows, "photons.soft", lambda: cf.soft_photon_bound(e, Z))
    _row(rows, "photons.total", lambda: cf.total_photon_bound(e, Z))

    euv = cf.e_uv(Z)
    _row(rows, "e_uv", lambda: euv)
    _row(rows, "e_uv_residual", lambda: abs(cf.c_uv(euv, Z) - 1.0))

    tau_c = _chain_tau(cfg)
    chain = cf.overlap_constants(e, Z, tau=tau_c)
    for key in sorted(chain):
        _row(rows, f"chain.{key}", lambda k=key: chain[k])

    window = cf.coupling_window(Z, tau_c)
    for key in ("e_uv", "a_ir1", "a_ir2", "e_ir", "g_ir_at_e_ir"):
        value = getattr(window, key)
        rows.append(
            {"name": f"window.{key}", "value": value, "display": _display(value)}
        )
    rows.append(
        {
            "name": "window.empty",
            "value": bool(window.empty),
            "display": str(window.empty),
        }
    )
    return _emit_table(cfg, rows, ("name", "value", "display")), 0


def cmd_integrals(cfg: RunConfig) -> tuple[str, int]:
    params = make_params(cfg.e, cfg.Z, m=cfg.m, kappa=cfg.kappa, lam=cfg.lam)
    if cfg.tau == 0.0:
        tau, rho = 0.0, 1.0
    else:
        tau, rho = cfg.tau, frame_for(params, cfg.tau, cfg.lambda1).rho
    norms = qd.f_tau_norms(params, tau, rho)
    rows: list[dict] = []

    def ceiled(name: str, value: float, ceiling: float) -> None:
        rows.append(
            {
                "name": name,
                "value": value,
                "ceiling": ceiling,
                "margin": ceiling - value,
                "display": _display(value),
            }
        )

    ceiled("norm.f_ir_l2", norms.f_ir_l2, cf.ir_l2_ceiling())
    ceiled("norm.f_ir_over_sqrt_omega", norms.f_ir_over_sqrt_omega, cf.ir_inv_sqrt_ceiling())
    ceiled(
        "norm.f_uv_over_sqrt_omega",
        norms.f_uv_over_sqrt_omega,
        cf.uv_inv_sqrt_ceiling(tau, rho),
    )
    ceiled(
        "norm.f_uv_over_quarter_omega",
        norms.f_uv_over_quarter_omega,
        cf.uv_inv_quarter_ceiling(tau, rho),
    )
    ceiled("xi.self", cf.xi_bound(norms, norms), cf.xi_self_ceiling(tau, rho))
    ceiled(
        "cin.100",
        qd.cin(100.0),
        qd.EULER_GAMMA + math.log(15.0) + 91.0 / 30.0,
    )

    def plain(name: str, fn) -> None:
        try:
            value = float(fn())
        except (DomainError, ParameterError) as exc:
            rows.append(
                {
                    "name": name,
                    "value": None,
                    "ceiling": None,
                    "margin": None,
                    "display": f"n/a ({exc})",
                }
            )
            return
        rows.append(
            {
                "name": name,
                "value": value,
                "ceiling": None,
                "margin": None,
                "display": _display(value),
            }
        )

    plain("effective_mass.coefficient", lambda: qd.effective_mass_coefficient().value)
    plain("effective_mass.exact", lambda: qd.EFFECTIVE_MASS_COEFFICIENT_EXACT)
    plain("self_energy.quadrature", lambda: qd.energy_renormalization(params))
    plain("self_energy.analytic", lambda: qd.energy_renormalization_analytic(params))
    columns = ("name", "value", "ceiling", "margin", "display")
    return _emit_table(cfg, rows, columns), 0


def _build_model(cfg: RunConfig, params):
    frame = base_frame() if cfg.tau == 0.0 else frame_for(params, cfg.tau, cfg.lambda1)
    grid = PositionGrid(cfg.n, cfg.L)
    modes = build_modes(cfg.kappa, cfg.lam, cfg.n_radial, cfg.n_angular)
    if cfg.tau != 0.0:
        modes = scale_modes(modes, frame)
    basis = FockBasis(modes.count, cfg.n_max)
    return assemble(params, frame, grid, modes, basis, variant="gross")


def cmd_solve(cfg: RunConfig) -> tuple[str, int]:
    params = make_params(cfg.e, cfg.Z, m=cfg.m, kappa=cfg.kappa, lam=cfg.lam)
    model = _build_model(cfg, params)
    result = lanczos_ground(model, tol=cfg.tol, maxit=cfg.maxit)
    report = ground_state_report(model, result)
    if cfg.format == "csv":
        flat: list[tuple[str, object]] = []
        for key, value in report.to_dict().items():
            if isinstance(value, dict):
                flat.extend((f"{key}.{k}", v) for k, v in value.items())
            else:
                flat.append((key, value))
        lines = _echo_lines(cfg)
        lines.append("key,value")
        lines.extend(f"{k},{_f17(v)}" for k, v in flat)
        return "\n".join(lines) + "\n", 0
    return _to_json({"config": cfg.echo(), "report": report.to_dict()}), 0


def _resolution(cfg: RunConfig) -> Resolution:
    return Resolution(
        n=cfg.n,
        L=cfg.L,
        n_radial=cfg.n_radial,
        n_angular=cfg.n_angular,
        n_max=cfg.n_max,
        tol=cfg.tol,
        maxit=cfg.maxit,
    )


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    params = make_params(cfg.e, cfg.Z, m=cfg.m, kappa=cfg.kappa, lam=cfg.lam)
    reports = run_suite(params, _resolution(cfg), selection=cfg.selection)
    status = 0 if suite_passed(reports) else 1
    if cfg.format == "csv":
        text = "\n".join(_echo_lines(cfg)) + "\n" + suite_to_csv(reports)
    else:
        text = suite_to_json(reports, config=cfg.echo())
    return text, status


def cmd_scan(cfg: RunConfig) -> tuple[str, int]:
    values = np.linspace(cfg.start, cfg.stop, cfg.steps)
    field = _KEY_TO_FIELD[cfg.axis][0]
    res = _resolution(cfg)
    table: list[tuple[float, list]] = []
    for v in values:
        point = replace(cfg, **{field: float(v)})
        params = make_params(point.e, point.Z, m=point.m, kappa=point.kappa, lam=point.lam)
        table.append((float(v), run_suite(params, res, selection=cfg.selection)))
    status = 0 if all(suite_passed(reports) for _, reports in table) else 1
    ids = [r.id for r in table[0][1]]
    if cfg.format == "json":
        rows = [
            {
                "value": v,
                "passed": suite_passed(reports),
                "slack": {r.id: r.slack for r in reports},
            }
            for v, reports in table
        ]
        payload = {"config": cfg.echo(), "axis": cfg.axis, "rows": rows}
        return _to_json(payload), status
    lines = _echo_lines(cfg)
    lines.append(",".join([cfg.axis] + [f"slack.{i}" for i in ids] + ["passed"]))
    for v, reports in table:
        cells = [_f17(v)]
        cells += [_f17(r.slack) for r in reports]
        cells.append("1" if suite_passed(reports) else "0")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n", status


def cmd_effmass(cfg: RunConfig) -> tuple[str, int]:
    params = make_params(cfg.e, cfg.Z, m=cfg.m, kappa=cfg.kappa, lam=cfg.lam)
    modes = build_modes(cfg.kappa, cfg.lam, cfg.n_radial, cfg.n_angular)
    basis = FockBasis(modes.count, cfg.n_max)
    numeric = effective_mass_numeric(params, modes, basis, tol=min(cfg.tol, 1e-10))
    coeff = effective_mass_riemann(modes)
    rows: list[dict] = []
    _row(rows, "m_eff_over_m.numeric", lambda: numeric)
    _row(rows, "inertia.numeric", lambda: 1.0 - 1.0 / numeric)
    _row(rows, "inertia.mode_sum", lambda: params.e**2 * coeff)
    _row(
        rows,
        "inertia.continuum",
        lambda: params.e**2 * qd.EFFECTIVE_MASS_COEFFICIENT_EXACT,
    )
    _row(rows, "coefficient.mode_sum", lambda: coeff)
    _row(rows, "coefficient.exact", lambda: qd.EFFECTIVE_MASS_COEFFICIENT_EXACT)
    return _emit_table(cfg, rows, ("name", "value", "display")), 0


def cmd_binding(cfg: RunConfig) -> tuple[str, int]:
    params = make_params(cfg.e, cfg.Z, m=cfg.m, kappa=cfg.kappa, lam=cfg.lam)
    e, Z = params.e, params.Z
    aZ = params.alphaZ
    rows: list[dict] = []
    _row(rows, "shift.ratio_one", lambda: qd.binding_second_order(e, Z))
    _row(
        rows,
        "shift.reference",
        lambda: cf.atomic_level(e, Z) * e * e / (6.0 * math.pi**2),
    )
    _row(
        rows,
        "shift.resolvent",
        lambda: qd.binding_second_order(
            e, Z, resolvent=lambda s: radial_resolvent_l1(aZ, s)
        ),
    )
    _row(rows, "shift.envelope", lambda: qd.binding_envelope(e, Z))
    return _emit_table(cfg, rows, ("name", "value", "display")), 0


_DISPATCH = {
    "constants": cmd_constants,
    "integrals": cmd_integrals,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "effmass": cmd_effmass,
    "binding": cmd_binding,
}


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = build_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        text, status = _DISPATCH[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParameterError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the boundary turns bugs into status 3
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if cfg.out is not None:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
