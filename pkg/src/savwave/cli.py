"""Command line entry point: ``savwave {run,converge-time,converge-space,energy}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import output
from .config import ConfigError, RunConfig, parse_config
from .experiments import StudyConfig, energy_study, spatial_study, temporal_study
from .stepper import run

log = logging.getLogger("savwave")


def _json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its keys")
    common.add_argument("--outdir", help="directory for CSV output (default: .)")
    common.add_argument("--quiet", action="store_true", help="only report errors")
    params = common.add_argument_group("parameters")
    params.add_argument("--example", help="example1, example2 or zero")
    params.add_argument("--alpha", type=float)
    params.add_argument("--kappa", type=float)
    params.add_argument("--gamma1", type=float)
    params.add_argument("--gamma2", type=float)
    params.add_argument("--potential", help="sine_gordon or double_well")
    params.add_argument("--c0", type=float)
    params.add_argument("--nx", type=int)
    params.add_argument("--tau", type=float)
    params.add_argument("--steps", type=int)
    params.add_argument("--T", type=float, dest="T")
    for key in ("xmin", "xmax", "ymin", "ymax"):
        params.add_argument(f"--{key}", type=float)
    params.add_argument("--tau-list", dest="tau_list", type=_json, help="JSON list, e.g. '[0.1, 0.05]'")
    params.add_argument("--n-list", dest="n_list", type=_json, help="JSON list, e.g. '[4, 8, 16]'")
    params.add_argument("--gamma-list", dest="gamma_list", type=_json, help="JSON list of pairs, e.g. '[[0,0],[1,1]]'")
    params.add_argument("--n-ref", dest="n_ref", type=int)
    params.add_argument("--k-ref", dest="k_ref", type=int)

    parser = argparse.ArgumentParser(
        prog="savwave",
        description="SAV Fourier-spectral solver for the damped fractional wave equation.",
    )
    sub = parser.add_subparsers(dest="mode", required=True, metavar="COMMAND")
    sub.add_parser("run", parents=[common], help="single run, writes energy.csv")
    sub.add_parser("converge-time", parents=[common], help="temporal study, writes errors_time.csv")
    sub.add_parser("converge-space", parents=[common], help="spatial study, writes errors_space.csv")
    sub.add_parser("energy", parents=[common], help="one energy ledger per (gamma1, gamma2)")
    return parser


def execute(cfg: RunConfig) -> list:
    """Run the configured mode and return the paths written."""
    written = []
    if cfg.mode == "run":
        p = cfg.problem()
        state, ledger = run(p, cfg.example, steps=cfg.steps)
        written.append(output.write_energy(cfg.outdir / "energy.csv", ledger))
        log.info("t=%g  H=%.12g -> %.12g", state.t, ledger[0].H, ledger[-1].H)
    elif cfg.mode == "converge-time":
        study = StudyConfig(problem=cfg.problem(), example=cfg.example, k_ref=cfg.k_ref, tau_list=cfg.tau_list)
        rows = temporal_study(study)
        written.append(output.write_errors_time(cfg.outdir / "errors_time.csv", rows))
    elif cfg.mode == "converge-space":
        study = StudyConfig(
            problem=cfg.problem(), example=cfg.example, n_ref=cfg.n_ref, k_ref=cfg.k_ref, n_list=cfg.n_list
        )
        rows = spatial_study(study)
        written.append(output.write_errors_space(cfg.outdir / "errors_space.csv", rows))
    elif cfg.mode == "energy":
        ledgers = energy_study(cfg.problem(), cfg.example, cfg.steps, cfg.gamma_list)
        for (g1, g2), ledger in ledgers.items():
            written.append(output.write_energy(cfg.outdir / output.energy_filename(g1, g2), ledger))
    return written


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "quiet") and v is not None}
    try:
        cfg = parse_config(args.config, overrides)
        for path in execute(cfg):
            log.info("wrote %s", path)
    except ConfigError as exc:
        print(f"savwave: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"savwave: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
