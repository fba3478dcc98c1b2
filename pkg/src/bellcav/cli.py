"""Command-line front end.

Five subcommands:

  derive       dump the reduced model (H_eff, L_eff, propagator scalars)
               as JSON together with its cross-validation residuals
  evolve       integrate one trajectory and emit a CSV time series
  sweep-theta  final-time populations over a theta grid (parallel)
  sweep-coop   final-time populations over a cooperativity list
  validate     run the full cross-check suite

Configuration is a flat JSON file holding either {"scaled": {...}} or
{"absolute": {...}} plus optional run keys; command-line flags override
file values.  All CSV output uses 17 significant digits, '.' decimals
and '\n' line endings, and is byte-stable for a fixed configuration.

Exit codes: 0 success, 1 usage error, 2 numerical validation failure,
3 integrator failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from . import dynamics, effective, model, protocol, validate
from .exceptions import (
    DegeneratePropagatorError,
    IntegrationUnstableError,
    PoleError,
    SingularMatrixError,
)
from .model import Modulation, ScaledParameters, SystemParameters

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_INTEGRATOR = 3

POLE_WINDOW = 0.02          # rad, excluded around f(theta) poles in sweeps
DEFAULT_POINTS = 201
DEFAULT_T = 15000.0
DEFAULT_COOPERATIVITIES = (100.0, 200.0, 400.0, 800.0)
MAX_OUTPUT_ROWS = 1500
DERIVE_RESIDUAL_GATE = 1e-8

_INIT_STATES = model.GROUND_LABELS        # ("00", "psi+", "psi-", "11")


class _UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run description; picklable for sweep workers."""

    scaled: ScaledParameters | None = field(default_factory=ScaledParameters)
    absolute: dict | None = None
    model: str = "effective"            # "effective" or "full"
    modulation: Modulation = field(default_factory=Modulation.tan)
    theta: float | None = None
    t_final: float = DEFAULT_T
    dt: float | None = None
    method: str | None = None           # None -> auto
    stride: int | None = None
    points: int = DEFAULT_POINTS
    cooperativities: tuple[float, ...] = DEFAULT_COOPERATIVITIES
    threads: int = 1
    init: str = "00"
    seed: int = 0                       # reserved; dynamics are deterministic

    def resolved_theta(self) -> float:
        if self.theta is not None:
            return self.theta
        target = self.modulation.target_angle
        if target is None:
            raise _UsageError("--theta is required for fixed modulation")
        return target

    def parameters(self, theta: float | None = None) -> SystemParameters:
        theta = self.resolved_theta() if theta is None else theta
        if self.absolute is not None:
            return SystemParameters(theta=theta, modulation=self.modulation,
                                    **self.absolute)
        return model.from_scaled(self.scaled, theta, self.modulation)

    def integrator(self) -> dynamics.IntegratorConfig:
        method = self.method or ("prop" if self.t_final > 1000 else "rk4")
        dt = self.dt if self.dt is not None else (1.0 if method == "prop" else 0.01)
        n_steps = int(round(self.t_final / dt))
        stride = self.stride or max(1, n_steps // MAX_OUTPUT_ROWS)
        return dynamics.IntegratorConfig(method=method, dt=dt,
                                         t_final=self.t_final,
                                         output_stride=stride)


def load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if "scaled" in data and "absolute" in data:
        raise _UsageError("config must contain exactly one of 'scaled'/'absolute'")
    updates: dict = {}
    if "scaled" in data:
        updates["scaled"] = ScaledParameters(**data["scaled"])
        updates["absolute"] = None
    elif "absolute" in data:
        updates["absolute"] = dict(data["absolute"])
        updates["scaled"] = None
    simple = {"model": "model", "theta": "theta", "T": "t_final", "dt": "dt",
              "method": "method", "stride": "stride", "points": "points",
              "threads": "threads", "init": "init", "seed": "seed"}
    for key, attr in simple.items():
        if key in data:
            updates[attr] = data[key]
    if "modulation" in data:
        updates["modulation"] = Modulation.parse(data["modulation"])
    if "C" in data:
        updates["cooperativities"] = tuple(float(c) for c in data["C"])
    return replace(cfg, **updates)


def apply_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates: dict = {}
    if getattr(args, "model", None):
        updates["model"] = args.model
    if getattr(args, "modulation", None):
        updates["modulation"] = Modulation.parse(args.modulation)
    for flag, attr in (("theta", "theta"), ("T", "t_final"), ("dt", "dt"),
                       ("method", "method"), ("points", "points"),
                       ("threads", "threads"), ("init", "init")):
        value = getattr(args, flag, None)
        if value is not None:
            updates[attr] = value
    if getattr(args, "C", None):
        updates["cooperativities"] = tuple(
            float(c) for c in args.C.split(",") if c)
    return replace(cfg, **updates)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _header_lines(cfg: RunConfig, subcommand: str, theta: float,
                  integ: dynamics.IntegratorConfig, extra: dict | None = None) -> list[str]:
    p = cfg.parameters(theta)
    items = {"model": cfg.model, **p.asdict(),
             "cooperativity": protocol.cooperativity(p) if p.kappa > 0 and p.gamma > 0 else math.nan,
             "method": integ.method, "dt": integ.dt, "T": integ.t_final,
             "stride": integ.output_stride, "seed": cfg.seed}
    if extra:
        items.update(extra)
    body = " ".join(f"{k}={_fmt(v)}" for k, v in items.items())
    return [f"# bellcav {subcommand}", f"# {body}"]


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv(headers: list[str], columns: list[str], rows: list[tuple]) -> str:
    lines = headers + [",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _initial_state(cfg: RunConfig, theta: float, dim: int) -> np.ndarray:
    if cfg.init not in _INIT_STATES:
        raise _UsageError(f"--init must be one of {_INIT_STATES}")
    if dim == model.GROUND_DIM:
        idx = _INIT_STATES.index(cfg.init)
        rho = np.zeros((dim, dim), dtype=np.complex128)
        rho[idx, idx] = 1.0
        return rho
    V = model.build_basis_B(theta).isometry
    ket = V[:, _INIT_STATES.index(cfg.init)]
    return np.outer(ket, ket.conj())


def _build_generators(cfg: RunConfig, theta: float):
    p = cfg.parameters(theta)
    if cfg.model == "full":
        ops = model.build_bare_operators(p)
        return p, ops.hamiltonian, ops.L
    if cfg.model == "effective":
        m = effective.derive_effective_model(p)
        return p, m.H_eff, m.L_eff
    raise _UsageError(f"unknown model {cfg.model!r}")


# ----------------------------------------------------------------------
# derive

def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _matrix_pairs(mat: np.ndarray) -> list[list[list[float]]]:
    return [[_complex_pair(z) for z in row] for row in mat]


def cmd_derive(cfg: RunConfig, out: str | None) -> int:
    theta = cfg.resolved_theta()
    p = cfg.parameters(theta)
    m = effective.derive_effective_model(p)
    closed = effective.closed_form_effective(p)
    blocks = effective.banachiewicz_invert(effective.build_H_NH(p))
    closed_blocks = effective.closed_form_blocks(p)

    scale_L = max(max(float(np.abs(L).max()) for L in m.L_eff), 1e-300)
    resid_L = max(float(np.abs(a - b).max()) for a, b in zip(closed, m.L_eff)) / scale_L
    scale_blocks = 1.0 / abs(m.scalars.d[1])
    resid_blocks = float(
        np.abs(blocks.assembled() - closed_blocks.assembled()).max()) / scale_blocks
    resid_inverse = float(np.linalg.norm(
        effective.build_H_NH(p) @ blocks.assembled() - np.eye(effective.EXCITED_DIM)))
    resid_scalars = max(
        abs(-4 * m.scalars.d[n] - m.scalars.d_tilde[n]) / abs(m.scalars.d_tilde[n])
        for n in (0, 1, 2))

    doc = {
        "parameters": p.asdict(),
        "cooperativity": protocol.cooperativity(p),
        "ground_basis": list(model.GROUND_LABELS),
        "H_eff": _matrix_pairs(m.H_eff),
        "L_eff": {f"L{k + 1}": _matrix_pairs(L) for k, L in enumerate(m.L_eff)},
        "scalars": {
            "d": {str(n): _complex_pair(m.scalars.d[n]) for n in (0, 1, 2)},
            "d_tilde": {str(n): _complex_pair(m.scalars.d_tilde[n]) for n in (0, 1, 2)},
            "R": {str(n): _complex_pair(m.scalars.R[n]) for n in (0, 1, 2)},
            "d_tilde_ratio_2_over_1": abs(m.scalars.d_tilde[2]) / abs(m.scalars.d_tilde[1]),
        },
        "cross_validation": {
            "lindblads_closed_vs_numeric": resid_L,
            "blocks_closed_vs_banachiewicz": resid_blocks,
            "inverse_residual": resid_inverse,
            "scalar_identity": resid_scalars,
        },
    }
    _write_text(out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    worst = max(resid_L, resid_blocks, resid_inverse, resid_scalars)
    if worst > DERIVE_RESIDUAL_GATE:
        print(f"cross-validation residual {worst:.3e} exceeds "
              f"{DERIVE_RESIDUAL_GATE:.1e}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


# ----------------------------------------------------------------------
# evolve

def cmd_evolve(cfg: RunConfig, out: str | None) -> int:
    theta = cfg.resolved_theta()
    integ = cfg.integrator()
    _, H, Ls = _build_generators(cfg, theta)
    rho0 = _initial_state(cfg, theta, H.shape[0])
    traj = dynamics.evolve(H, Ls, rho0, integ, theta=theta)

    columns = ["t", "P00", "Ppsi_plus", "Ppsi_minus", "P11",
               "trace_dev", "herm_dev", "min_eig"]
    full = traj.leakage is not None
    if full:
        columns.append("leakage")
    rows = []
    for i in range(len(traj.times)):
        row = [traj.times[i], traj.p00[i], traj.p_plus[i], traj.p_minus[i],
               traj.p11[i], traj.trace_dev[i], traj.herm_dev[i], traj.min_eig[i]]
        if full:
            row.append(traj.leakage[i])
        rows.append(tuple(row))
    headers = _header_lines(cfg, "evolve", theta, integ, {"init": cfg.init})
    _write_text(out, _csv(headers, columns, rows))
    return EXIT_OK


# ----------------------------------------------------------------------
# sweeps

_SWEEP_COLUMNS = ["sweep_value", "P00", "Ppsi_plus", "Ppsi_minus", "P11",
                  "trace_dev", "min_eig", "regime", "ref_g", "ref_h", "ref_j"]


def _nearest_pole_distance(modulation: Modulation, theta: float) -> float:
    if modulation.kind == "tan":
        return abs(math.remainder(theta - math.pi / 2, math.pi))
    if modulation.kind == "negcot":
        return abs(math.remainder(theta, math.pi))
    return math.inf


def replace_stride(integ: dynamics.IntegratorConfig,
                   stride: int) -> dynamics.IntegratorConfig:
    return dynamics.IntegratorConfig(method=integ.method, dt=integ.dt,
                                     t_final=integ.t_final,
                                     output_stride=stride)


def _sweep_point(cfg: RunConfig, theta: float) -> tuple:
    """One sweep row: evolve to T and report the final populations."""
    ref = protocol.reference_trig(cfg.modulation, theta)
    p = cfg.parameters(theta)
    if cfg.modulation.kind in ("tan", "negcot"):
        regime = protocol.regime_classifier(p).classification
    else:
        regime = "n/a"
    final_only = replace_stride(cfg.integrator(), cfg.integrator().n_steps)
    _, H, Ls = _build_generators(cfg, theta)
    rho0 = _initial_state(cfg, theta, H.shape[0])
    traj = dynamics.evolve(H, Ls, rho0, final_only, theta=theta)
    return (theta, traj.p00[-1], traj.p_plus[-1], traj.p_minus[-1],
            traj.p11[-1], traj.trace_dev[-1], traj.min_eig[-1], regime, *ref)


def _nan_row(cfg: RunConfig, theta: float) -> tuple:
    ref = protocol.reference_trig(cfg.modulation, theta)
    nan = math.nan
    return (theta, nan, nan, nan, nan, nan, nan, "invalid", *ref)


def _run_parallel(worker, items, threads: int) -> list:
    if threads <= 1:
        return [worker(item) for item in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, items))


def cmd_sweep_theta(cfg: RunConfig, out: str | None) -> int:
    grid = np.linspace(0.0, 2.0 * math.pi, cfg.points)
    valid = [t for t in grid
             if _nearest_pole_distance(cfg.modulation, t) > POLE_WINDOW]
    excluded = set(grid) - set(valid)

    results = {}
    failures = 0
    computed = _run_parallel(partial(_sweep_point_safe, cfg), valid, cfg.threads)
    for theta, row in zip(valid, computed):
        if row is None:
            failures += 1
            results[theta] = _nan_row(cfg, theta)
        else:
            results[theta] = row
    for theta in excluded:
        results[theta] = _nan_row(cfg, theta)

    rows = [results[t] for t in grid]
    integ = cfg.integrator()
    final_only = replace_stride(integ, integ.n_steps)
    headers = _header_lines(cfg, "sweep-theta", cfg.resolved_theta(), final_only,
                            {"points": cfg.points,
                             "excluded_points": len(excluded),
                             "failed_points": failures})
    _write_text(out, _csv(headers, _SWEEP_COLUMNS, rows))
    if failures:
        print(f"warning: {failures} grid points failed and were emitted as NaN",
              file=sys.stderr)
    return EXIT_OK


def _sweep_point_safe(cfg: RunConfig, theta: float):
    try:
        return _sweep_point(cfg, theta)
    except (PoleError, SingularMatrixError, DegeneratePropagatorError,
            IntegrationUnstableError):
        return None


def cmd_sweep_coop(cfg: RunConfig, out: str | None) -> int:
    if cfg.absolute is not None:
        raise _UsageError("sweep-coop needs scaled parameters "
                          "(cooperativity is set through tilde_kappa)")
    base = cfg.scaled
    theta = cfg.resolved_theta()

    configs = []
    echo = {}
    for C in cfg.cooperativities:
        if C <= 0:
            raise _UsageError("cooperativities must be positive")
        # C = alpha^2 / (tilde_kappa * tilde_gamma) with tilde_gamma held
        tilde_kappa = base.alpha ** 2 / (C * base.tilde_gamma)
        scaled = replace(base, tilde_kappa=tilde_kappa)
        configs.append((C, replace(cfg, scaled=scaled)))
        echo[C] = tilde_kappa

    computed = _run_parallel(_coop_point, [(C, sub, theta) for C, sub in configs],
                             cfg.threads)
    rows = []
    for (C, _), row in zip(configs, computed):
        rows.append((C, *row[1:]) if row is not None else
                    (C, *(math.nan,) * 6, "invalid",
                     *protocol.reference_trig(cfg.modulation, theta)))

    integ = cfg.integrator()
    extra = {"theta": theta, "tilde_gamma": base.tilde_gamma}
    extra.update({f"tilde_kappa_at_C{_fmt(C)}": _fmt(k) for C, k in echo.items()})
    headers = _header_lines(cfg, "sweep-coop", theta,
                            replace_stride(integ, integ.n_steps), extra)
    _write_text(out, _csv(headers, _SWEEP_COLUMNS, rows))
    return EXIT_OK


def _coop_point(item):
    C, sub_cfg, theta = item
    row = _sweep_point_safe(sub_cfg, theta)
    return row


# ----------------------------------------------------------------------
# validate

def cmd_validate(cfg: RunConfig, out: str | None) -> int:
    results = validate.run_all()
    p = validate.caption_parameters()
    echo = " ".join(f"{k}={_fmt(v)}" for k, v in p.asdict().items())
    lines = [f"# bellcav validate", f"# {echo}"]
    lines += [r.line() for r in results]
    lines.append(f"INFO  propagator ratio |d~2/d~1| = "
                 f"{validate.propagator_ratio():.6g} at default parameters")
    text = "\n".join(lines) + "\n"
    _write_text(out, text)
    if out not in (None, "-"):
        sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


# ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bellcav",
                     description="Dissipative preparation of generalised "
                                 "Bell states in a lossy cavity.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--model", choices=["full", "effective"])
        p.add_argument("--modulation",
                       help="tan | negcot | fixed:VALUE")
        p.add_argument("--theta", type=float, help="target angle (rad)")
        p.add_argument("--T", type=float, help="final time (1/g units)")
        p.add_argument("--dt", type=float, help="integrator step")
        p.add_argument("--method", choices=["rk4", "prop"])
        p.add_argument("--points", type=int, help="theta grid size")
        p.add_argument("--C", help="comma-separated cooperativity list")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--threads", type=int, help="sweep worker count")

    for name, fn in (("derive", cmd_derive), ("evolve", cmd_evolve),
                     ("sweep-theta", cmd_sweep_theta),
                     ("sweep-coop", cmd_sweep_coop),
                     ("validate", cmd_validate)):
        p = sub.add_parser(name)
        add_common(p)
        if name == "evolve":
            p.add_argument("--init", choices=list(_INIT_STATES),
                           help="initial ground state (default 00)")
        p.set_defaults(func=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = apply_flags(load_config(args.config), args)
        return args.func(cfg, args.out)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, json.JSONDecodeError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PoleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularMatrixError, DegeneratePropagatorError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except IntegrationUnstableError as exc:
        print(f"integrator failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR


if __name__ == "__main__":
    sys.exit(main())
