"""Command-line entry point and table emission.

``monofem study`` runs a convergence study and writes the resulting table
as CSV or markdown.  Exit codes: 0 success, 2 usage error, 3 solver
non-convergence.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .assembly import DiffusionTensor
from .ionic import MODEL_NAMES, make_model
from .sparse import DEFAULT_CG_TOL, NoConvergence
from .verification import ConvergenceRecord, StudyConfig, convergence_study

CSV_COLUMNS = "level,h,dt,steps,l2_error,sroc,troc"


class UsageError(ValueError):
    pass


class IoError(OSError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # raise instead of sys.exit
        raise UsageError(message)


@dataclass
class RunConfig:
    model: str = "fhn"
    mode: str = "homogeneous"
    levels: list = field(default_factory=lambda: [Fraction(1, 8), Fraction(1, 16), Fraction(1, 32), Fraction(1, 64)])
    t_final: float = 0.25
    dt: object = "h2"  # "h2" or a Fraction/float time step
    diffusion: tuple = (1.0, 1.0)  # diagonal entries
    params: dict = field(default_factory=dict)
    cg_tol: float = DEFAULT_CG_TOL
    out: str | None = None
    fmt: str = "csv"
    sweep: str = "mesh"
    fixed_h: Fraction = Fraction(1, 64)
    reference: str = "ode"
    wavenumber: int = 1

    def to_argv(self) -> list[str]:
        argv = [
            "study",
            "--model", self.model,
            "--mode", self.mode,
            "--levels", ",".join(str(h) for h in self.levels),
            "--t-final", repr(self.t_final),
            "--dt", str(self.dt),
            "--diffusion", f"{self.diffusion[0]!r},{self.diffusion[1]!r}",
            "--cg-tol", repr(self.cg_tol),
            "--format", self.fmt,
            "--sweep", self.sweep,
            "--fixed-h", str(self.fixed_h),
            "--reference", self.reference,
            "--wavenumber", str(self.wavenumber),
        ]
        for key, val in self.params.items():
            argv += ["--param", f"{key}={val!r}"]
        if self.out is not None:
            argv += ["--out", self.out]
        return argv


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse {text!r} as a number") from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="monofem", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    study = sub.add_parser("study", help="run a convergence study")
    study.add_argument("--model", default="fhn")
    study.add_argument("--mode", default="homogeneous", choices=["homogeneous", "manufactured"])
    study.add_argument("--levels", default="1/8,1/16,1/32,1/64",
                       help="comma-separated h values (or dt values for --sweep timestep); fractions like 1/128 accepted")
    study.add_argument("--t-final", default="0.25")
    study.add_argument("--dt", default="h2", help="'h2' for dt = h^2, or a fixed time step")
    study.add_argument("--diffusion", default="1.0", help="scalar sigma or diagonal 'a,b'")
    study.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                       help="ionic model parameter override (repeatable)")
    study.add_argument("--cg-tol", default=None)
    study.add_argument("--out", default=None)
    study.add_argument("--format", default="csv", choices=["csv", "md"])
    study.add_argument("--sweep", default="mesh", choices=["mesh", "timestep"])
    study.add_argument("--fixed-h", default="1/64")
    study.add_argument("--reference", default="ode", choices=["ode", "fine"])
    study.add_argument("--wavenumber", default="1")
    return parser


def parse_config(argv) -> RunConfig:
    """Resolve command-line arguments into a fully-defaulted RunConfig.

    Raises:
        UsageError: unknown flags, bad values, or inconsistent settings.
    """
    ns = _build_parser().parse_args(list(argv))

    model = ns.model.lower()
    if model not in MODEL_NAMES:
        raise UsageError(f"unknown model {ns.model!r}; valid models: {', '.join(MODEL_NAMES)}")

    params = {}
    for item in ns.param:
        if "=" not in item:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        key, _, val = item.partition("=")
        params[key.strip()] = float(_fraction(val.strip()))
    try:
        make_model(model, **params)  # validate the overrides now
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    levels = [_fraction(tok) for tok in ns.levels.split(",") if tok.strip()]
    if not levels:
        raise UsageError("--levels must list at least one value")
    if any(b >= a for a, b in zip(levels, levels[1:])):
        raise UsageError("--levels must be strictly decreasing")
    if min(levels) <= 0:
        raise UsageError("--levels must be positive")

    dt = ns.dt if ns.dt == "h2" else _fraction(ns.dt)
    parts = [p for p in ns.diffusion.split(",") if p.strip()]
    if len(parts) == 1:
        diffusion = (float(_fraction(parts[0])),) * 2
    elif len(parts) == 2:
        diffusion = (float(_fraction(parts[0])), float(_fraction(parts[1])))
    else:
        raise UsageError(f"--diffusion expects 'sigma' or 'a,b', got {ns.diffusion!r}")
    if min(diffusion) <= 0:
        raise UsageError("--diffusion entries must be positive")

    cg_tol = DEFAULT_CG_TOL if ns.cg_tol is None else float(_fraction(ns.cg_tol))
    env_tol = os.environ.get("MONOFEM_CG_TOL")
    if env_tol is not None:
        cg_tol = float(env_tol)

    if ns.sweep == "timestep" and ns.mode != "manufactured":
        raise UsageError("--sweep timestep is only meaningful with --mode manufactured")

    try:
        wavenumber = int(ns.wavenumber)
    except ValueError as exc:
        raise UsageError(f"--wavenumber must be an integer, got {ns.wavenumber!r}") from exc

    return RunConfig(
        model=model,
        mode=ns.mode,
        levels=levels,
        t_final=float(_fraction(ns.t_final)),
        dt=dt,
        diffusion=diffusion,
        params=params,
        cg_tol=cg_tol,
        out=ns.out,
        fmt=ns.format,
        sweep=ns.sweep,
        fixed_h=_fraction(ns.fixed_h),
        reference=ns.reference,
        wavenumber=wavenumber,
    )


def to_study_config(cfg: RunConfig) -> StudyConfig:
    return StudyConfig(
        model=make_model(cfg.model, **cfg.params),
        mode=cfg.mode,
        levels=[float(h) for h in cfg.levels],
        t_final=cfg.t_final,
        dt_rule=cfg.dt if cfg.dt == "h2" else float(cfg.dt),
        diffusion=DiffusionTensor.diagonal(*cfg.diffusion),
        sweep=cfg.sweep,
        fixed_h=float(cfg.fixed_h),
        cg_rel_tol=cfg.cg_tol,
        reference=cfg.reference,
        wavenumber_index=cfg.wavenumber,
    )


def _fmt(value, pattern="%.12g") -> str:
    return "" if value is None else pattern % value


def emit_table(records: list[ConvergenceRecord], fmt: str = "csv") -> str:
    """Render study records as CSV (one row per level) or a markdown table
    laid out like the published one (h row, error row, sroc row, troc row)."""
    if not records:
        raise ValueError("no records to emit")
    if fmt == "csv":
        lines = [CSV_COLUMNS]
        for r in records:
            lines.append(
                f"{r.level},{_fmt(r.h)},{_fmt(r.dt)},{r.steps},"
                f"{_fmt(r.l2_error)},{_fmt(r.sroc, '%.6g')},{_fmt(r.troc, '%.6g')}"
            )
        return "\n".join(lines) + "\n"
    if fmt == "md":
        def row(label, cells):
            return "| " + " | ".join([label] + cells) + " |"

        def rate(x):
            return "-" if x is None else "%.6g" % x

        lines = [
            row("h", [_fmt(r.h) for r in records]),
            row("---", ["---"] * len(records)),
            row("error", [_fmt(r.l2_error) for r in records]),
            row("sroc", [rate(r.sroc) for r in records]),
            row("troc", [rate(r.troc) for r in records]),
        ]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        records = convergence_study(to_study_config(cfg))
    except NoConvergence as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return 3
    text = emit_table(records, cfg.fmt)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        try:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(str(exc)) from exc
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
