"""Command-line front end: preset experiments, sweeps, rendering, export.

Subcommands:

* prepare -- run the two-path network and export the renormalized port-1
  superposition, printing the post-selection probability.
* evolve  -- chain prepare -> integrate -> trajectory CSV; --fig3 a|b|c|d
  selects the transfer-function preset cases, --fig4 RATIO the swept-
  detuning run with splitter transmittance RATIO.
* render  -- write condensate density / phase / interference grids and an
  LG mode grid as plot-ready CSV and matrix text.
* sweep   -- one evolve run per parameter value, summarized one row per
  run in a CSV.

All numeric output uses 17 significant digits in scientific notation, and
iteration orders are fixed, so identical configurations produce
byte-identical files. Exit codes: 0 success, 2 configuration error, 3
numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from . import bec_dynamics as bd
from . import mode_projection as mp
from . import oam_modes as om
from . import optics_network as on

SWEEPABLE = ("delta0", "slope", "coupling", "kappa", "splitter-ratio")


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    """Serializable description of one run; defaults are the reference
    rubidium-87 swept-detuning scenario.

    Units: rates (omega_perp, kappa, coupling, delta0) in Hz used directly
    as rates; slope in Hz/s; times in s; lengths in m; phases in rad.
    coupling = None means "equal to omega_perp". splitter_t/splitter_r are
    the (real) transmission/reflection amplitudes of the first splitter;
    the prepared superposition carries a+ = t and a- = r.
    """

    experiment: str = "fig3d"
    # first-splitter amplitudes, arm phase and input charge
    splitter_t: float = math.sqrt(0.5)
    splitter_r: float = math.sqrt(0.5)
    phase_phi: float = math.pi
    ell: int = 2
    # condensate rates
    omega_perp: float = bd.OMEGA_PERP_RB87
    kappa: float = bd.KAPPA_RB87
    coupling: Optional[float] = None
    # detuning schedule
    schedule_kind: str = "linear"
    delta0: float = bd.FIG3_SWEEP_DELTA0
    slope: float = bd.FIG3_SWEEP_SLOPE
    # integration and summary windows
    t_end: float = bd.FIG3_T_END
    tol: float = 1e-10
    n_samples: int = 2001
    tail_fraction: float = 0.2
    # render grids
    grid_n: int = 201
    grid_half_width: float = 4.0 * bd.L_PERP_RB87
    l_perp: float = bd.L_PERP_RB87
    l_z: float = bd.L_Z_RB87
    ground_admixture: float = 0.5
    lg_w0: float = 1e-3
    lg_p: int = 0
    lg_half_width: float = 2.5e-3
    # output
    out_dir: str = "out"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def schedule(self) -> bd.DetuningSchedule:
        if self.schedule_kind == "constant":
            return bd.DetuningSchedule.constant(self.delta0)
        if self.schedule_kind == "linear":
            return bd.DetuningSchedule.linear(self.delta0, self.slope)
        raise ConfigError(f"unknown schedule kind {self.schedule_kind!r}")

    def splitter(self) -> on.SplitterSpec:
        try:
            return on.SplitterSpec(r=self.splitter_r, t=self.splitter_t)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def save_config(cfg: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return RunConfig.from_dict(data)


def fig3_config(case: str) -> RunConfig:
    """Preset for transfer-function case a, b, c (constant) or d (sweep)."""
    if case in bd.FIG3_CONSTANT_DELTAS:
        return RunConfig(
            experiment=f"fig3{case}",
            schedule_kind="constant",
            delta0=bd.FIG3_CONSTANT_DELTAS[case],
            slope=0.0,
        )
    if case == "d":
        return RunConfig(experiment="fig3d")
    raise ConfigError("--fig3 case must be one of a, b, c, d")


def fig4_config(ratio: float) -> RunConfig:
    """Swept-detuning preset with first-splitter transmittance |t|^2 = ratio."""
    if not 0.0 < ratio < 1.0:
        raise ConfigError("--fig4 ratio must lie strictly between 0 and 1")
    return RunConfig(
        experiment=f"fig4_{ratio:g}",
        splitter_t=math.sqrt(ratio),
        splitter_r=math.sqrt(1.0 - ratio),
    )


def prepared_superposition(cfg: RunConfig) -> tuple[on.OamSuperposition, float]:
    """Run the network for cfg; return (renormalized port 1, probability)."""
    state = on.mach_zehnder(cfg.ell, cfg.splitter(), phi=cfg.phase_phi)
    prob = on.post_selection_probability(state, port=1)
    return on.renormalize_port(state, port=1), prob


def evolve_trajectory(cfg: RunConfig) -> bd.Trajectory:
    """prepare -> integrate at the configured parameters."""
    prepared, _ = prepared_superposition(cfg)
    params = bd.PhysicalParams(
        omega_perp=cfg.omega_perp,
        kappa=cfg.kappa,
        a_plus=prepared.amplitude(cfg.ell),
        a_minus=prepared.amplitude(-cfg.ell),
        coupling=cfg.coupling,
    )
    return bd.integrate(
        bd.GROUND_STATE, params, cfg.schedule(),
        t_end=cfg.t_end, tol=cfg.tol, n_samples=cfg.n_samples,
    )


def _out_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_prepare(args) -> int:
    try:
        spec = on.SplitterSpec(r=args.r, t=args.t)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    state = on.mach_zehnder(args.ell, spec, phi=args.phi)
    prob = on.post_selection_probability(state, port=1)
    prepared = on.renormalize_port(state, port=1)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    target = out / "prepared_state.csv"
    on.write_superposition_csv(prepared, target)
    print(f"prepared state written to {target}")
    print(f"post-selection probability (port 1) = {prob:.16e}")
    return 0


def cmd_evolve(args) -> int:
    cfg = _resolve_config(args)
    traj = evolve_trajectory(cfg)
    out = _out_dir(cfg)
    target = out / "trajectory.csv"
    bd.write_trajectory_csv(traj, target)
    f = traj.transfer_series()
    print(f"trajectory written to {target}")
    print(f"min transfer = {f.min():.6f}, final transfer = {f[-1]:.6f}")
    return 0


def _condensate_field_grid(cfg: RunConfig, include_ground: bool) -> om.FieldGrid:
    spec_p = mp.CondensateModeSpec(cfg.l_perp, cfg.l_z, cfg.ell, +1)
    spec_m = mp.CondensateModeSpec(cfg.l_perp, cfg.l_z, cfg.ell, -1)
    axis = np.linspace(-cfg.grid_half_width, cfg.grid_half_width, cfg.grid_n)
    xs, ys = np.meshgrid(axis, axis)
    zs = np.zeros_like(xs)
    beta_p, beta_m = cfg.splitter_t, cfg.splitter_r
    values = beta_p * mp.psi_v((xs, ys, zs), spec_p) + beta_m * mp.psi_v(
        (xs, ys, zs), spec_m
    )
    meta = {
        "ell": str(cfg.ell),
        "l_perp_m": format(cfg.l_perp, ".16e"),
        "l_z_m": format(cfg.l_z, ".16e"),
        "beta_plus": format(beta_p, ".16e"),
        "beta_minus": format(beta_m, ".16e"),
        "half_width_m": format(cfg.grid_half_width, ".16e"),
        "n": str(cfg.grid_n),
    }
    if include_ground:
        values = values + cfg.ground_admixture * mp.psi_g((xs, ys, zs), spec_p)
        meta["ground_admixture"] = format(cfg.ground_admixture, ".16e")
    return om.FieldGrid(x=axis, y=axis, values=values, meta=meta)


def cmd_render(args) -> int:
    cfg = _resolve_config(args)
    if cfg.grid_n < 2 or cfg.grid_half_width <= 0:
        raise ConfigError("grid_n must be >= 2 and grid_half_width positive")
    out = _out_dir(cfg)

    vortex = _condensate_field_grid(cfg, include_ground=False)
    om.write_grid_csv(vortex, out / "vortex_mode.csv")
    om.write_grid_matrix(vortex, out / "vortex_density.txt", part="abs2")
    om.write_grid_matrix(vortex, out / "vortex_phase.txt", part="arg")

    interference = _condensate_field_grid(cfg, include_ground=True)
    om.write_grid_csv(interference, out / "interference.csv")
    om.write_grid_matrix(interference, out / "interference_density.txt", part="abs2")

    lg = om.sample_mode_grid(
        om.LgModeSpec(p=cfg.lg_p, ell=cfg.ell, w0=cfg.lg_w0),
        half_width=cfg.lg_half_width, n=cfg.grid_n,
    )
    om.write_grid_csv(lg, out / "lg_mode.csv")
    om.write_grid_matrix(lg, out / "lg_density.txt", part="abs2")
    print(f"grids written to {out}")
    return 0


def _apply_sweep_value(cfg: RunConfig, param: str, value: float) -> RunConfig:
    if param == "delta0":
        return dataclasses.replace(cfg, delta0=value)
    if param == "slope":
        return dataclasses.replace(cfg, schedule_kind="linear", slope=value)
    if param == "coupling":
        return dataclasses.replace(cfg, coupling=value)
    if param == "kappa":
        return dataclasses.replace(cfg, kappa=value)
    if param == "splitter-ratio":
        if not 0.0 <= value <= 1.0:
            raise ConfigError("splitter-ratio values must lie in [0, 1]")
        return dataclasses.replace(
            cfg, splitter_t=math.sqrt(value), splitter_r=math.sqrt(1.0 - value)
        )
    raise ConfigError(f"sweep parameter must be one of {SWEEPABLE}")


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"cannot parse sweep values: {exc}") from exc
    if not values:
        raise ConfigError("sweep range is empty")
    rows = []
    for value in values:
        point = _apply_sweep_value(cfg, args.param, value)
        traj = evolve_trajectory(point)
        f = traj.transfer_series()
        try:
            ratio_p, ratio_m = bd.steady_state_ratio(traj, cfg.tail_fraction)
        except ValueError:
            ratio_p, ratio_m = float("nan"), float("nan")
        rows.append(
            (value, float(f.min()), float(f[-1]), ratio_p, ratio_m,
             bd.tail_oscillation(traj, cfg.tail_fraction))
        )
    out = _out_dir(cfg)
    target = out / "sweep_summary.csv"
    lines = [
        f"# vortexsim {__version__} sweep over {args.param}",
        "value,min_transfer,final_transfer,tail_ratio_plus,tail_ratio_minus,"
        "tail_oscillation",
    ]
    for row in rows:
        lines.append(",".join(format(v, ".16e") for v in row))
    with open(target, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"sweep summary written to {target}")
    return 0


def _resolve_config(args) -> RunConfig:
    if getattr(args, "fig3", None):
        cfg = fig3_config(args.fig3)
    elif getattr(args, "fig4", None) is not None:
        cfg = fig4_config(args.fig4)
    elif getattr(args, "config", None):
        cfg = load_config(args.config)
    else:
        cfg = RunConfig()
    if getattr(args, "out", None):
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    return cfg


def _add_common_run_args(sub: argparse.ArgumentParser) -> None:
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--config", metavar="FILE", help="JSON run configuration")
    group.add_argument("--fig3", choices=("a", "b", "c", "d"),
                       help="transfer-function preset case")
    group.add_argument("--fig4", type=float, metavar="RATIO",
                       help="swept run with splitter transmittance RATIO")
    sub.add_argument("--out", metavar="DIR", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortexsim",
        description="optical OAM superpositions and condensate vortex transfer",
    )
    parser.add_argument("--version", action="version",
                        version=f"vortexsim {__version__}")
    subs = parser.add_subparsers(dest="command")

    prepare = subs.add_parser("prepare", help="prepare the optical superposition")
    prepare.add_argument("--r", type=float, default=math.sqrt(0.5),
                         help="splitter reflection amplitude (default 1/sqrt 2)")
    prepare.add_argument("--t", type=float, default=math.sqrt(0.5),
                         help="splitter transmission amplitude (default 1/sqrt 2)")
    prepare.add_argument("--phi", type=float, default=math.pi,
                         help="arm phase in rad (default pi)")
    prepare.add_argument("--ell", type=int, default=2,
                         help="input winding number (default 2)")
    prepare.add_argument("--out", metavar="DIR", default="out")
    prepare.set_defaults(func=cmd_prepare)

    evolve = subs.add_parser("evolve", help="integrate the condensate amplitudes")
    _add_common_run_args(evolve)
    evolve.set_defaults(func=cmd_evolve)

    render = subs.add_parser("render", help="write mode and interference grids")
    _add_common_run_args(render)
    render.set_defaults(func=cmd_render)

    sweep = subs.add_parser("sweep", help="run a parameter sweep")
    _add_common_run_args(sweep)
    sweep.add_argument("--param", required=True, choices=SWEEPABLE)
    sweep.add_argument("--values", required=True,
                       help="comma-separated parameter values")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"vortexsim: config error: {exc}", file=sys.stderr)
        return 2
    except (bd.IntegrationError, mp.QuadratureError) as exc:
        print(f"vortexsim: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
