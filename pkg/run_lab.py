"""
ARW Lab Runner.

Command-line entry point for the driven-dissipative activated random walk lab.

Commands:
- stabilize:          Stab(σ, f) on a given configuration
- chain:              run the driven-dissipative chain for t steps
- sample-stationary:  exact samples of π
- density:            mean stationary density ρ̂ with a confidence interval
- hitting-tail:       exact P(H >= m) table
- mixing-sweep:       lower/upper/plug-in TV estimates over a t-grid
- cutoff:             cutoff crossings over an n-grid
- exit-prob:          boundary exit frequencies
- verify:             oracle suites (JSON verdict + markdown report)
- decay:              visit-failure decay across sizes

Every command accepts ``--config PATH`` (a JSON experiment config) and inline
flags; flags override keys from the file. Exit codes: 0 success, 1 validation
or usage error, 2 runtime error.
"""

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import polars as pl
from loguru import logger
from pydantic import ValidationError

from src.chain import DrivingSequence, run_chain, stationary_density, stationary_samples
from src.core import (
    BoundarySide,
    Configuration,
    InstructionSource,
    Odometer,
    SourceMode,
    State,
    Topology,
    build_general,
    build_interval,
    stabilize,
)
from src.core.configuration import SLEEP_TOKEN
from src.core.errors import ConfigurationFormatError
from src.estimators import (
    ConfigurationLaw,
    exit_probability,
    hitting_tail,
    locate_cutoff,
    mixing_sweep,
    visit_failure_decay,
)
from src.oracle import run_suite
from src.utils.config import SUITES, ExperimentConfig, LabConfig, load_config
from src.utils.io import emit_plotdata, write_json, write_table
from src.utils.logging import setup_logging
from src.utils.run_report import generate_run_report


class UsageError(ValueError):
    """Bad command line."""


class LabArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so the caller owns exit codes."""

    def error(self, message: str) -> None:
        raise UsageError(f"{message}\n\n{self.format_usage().strip()}")


# ──────────────────────────────────────────────────────────────────────────────
# Argument parsing
# ──────────────────────────────────────────────────────────────────────────────

def _json_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"invalid JSON {text!r}: {e.msg}") from None


def _site_list(text: str) -> List[Any]:
    return [int(s) if s.strip().lstrip("-").isdigit() else s.strip() for s in text.split(",") if s.strip()]


def build_parser() -> LabArgumentParser:
    common = LabArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", dest="config_path", type=Path, help="JSON experiment config")
    common.add_argument("--lab-config", type=Path, help="Lab YAML config (default config/lab_config.yaml)")
    common.add_argument("--seed", type=int, help="Master seed (u64)")
    common.add_argument("--reps", type=int, help="Monte Carlo replicates")
    common.add_argument("--out", dest="output", type=Path, help="Output path")
    common.add_argument("--threads", type=int, help="Worker processes (speed only)")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")
    common.add_argument("--n", type=int, help="Interval size")
    common.add_argument("--lambda", dest="sleep_rate", type=float, help="Sleep rate λ > 0")
    common.add_argument("--driving", choices=["central", "uniform"], help="Driving sequence")
    common.add_argument("--mode", choices=["recorded", "ephemeral"], help="Instruction source mode")
    common.add_argument("--confidence", type=float, help="Confidence level of intervals")
    common.add_argument("--density-reps", type=int, help="Replicates for ρ̂")

    parser = LabArgumentParser(
        prog="run_lab.py",
        description="Driven-dissipative activated random walk lab",
        argument_default=argparse.SUPPRESS,
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=LabArgumentParser)
    sub.required = True

    def add(name: str, help_text: str) -> LabArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text, argument_default=argparse.SUPPRESS)

    p = add("stabilize", "Stabilize a configuration")
    p.add_argument("--sigma", dest="config", type=_json_value, help='Configuration, e.g. \'[2,0,"s"]\'')
    p.add_argument("--odometer", type=_json_value, help="Starting odometer (JSON array)")
    p.add_argument("--sites", type=_site_list, help="Comma list of sites U (default V)")

    p = add("chain", "Run the driven-dissipative chain")
    p.add_argument("--t", type=int, help="Number of steps")
    p.add_argument("--sigma", dest="config", type=_json_value, help="Initial configuration (default empty)")
    p.add_argument("--include-configs", action="store_true", help="Add a JSON config column")

    add("sample-stationary", "Exact samples of the stationary distribution")
    add("density", "Mean stationary density")

    p = add("hitting-tail", "Exact tail of the walker absorption time H")
    p.add_argument("--m-max", type=int, help="Largest m")

    p = add("mixing-sweep", "TV bounds over a t-grid")
    p.add_argument("--t", dest="t_grid", help="t-grid a:b[:step] or comma list")
    p.add_argument("--m-grid", help="Candidate m values (comma list)")
    p.add_argument("--point-estimates", action="store_true", help="Bounds from point estimates")
    p.add_argument("--plugin", action=argparse.BooleanOptionalAction, help="Force the plug-in column")

    p = add("cutoff", "Locate cutoff crossings over an n-grid")
    p.add_argument("--n-grid", help="Sizes (comma list or a:b:step)")
    p.add_argument("--t", dest="t_grid", help="t-grid shared by every n (default 0..2n)")
    p.add_argument("--epsilon", type=float, help="Crossing level ε")
    p.add_argument("--m-grid", help="Candidate m values (comma list)")
    p.add_argument("--point-estimates", action="store_true", help="Bounds from point estimates")

    p = add("exit-prob", "Boundary exit frequencies on the interval")
    p.add_argument("--side", choices=["left", "right"], help="Boundary side")
    p.add_argument("--law", choices=["central", "uniform", "fixed"], help="Configuration law")
    p.add_argument("--particles", type=int, help="Particle count (default ⌈(ρ̂+offset)n⌉)")
    p.add_argument("--sigma", dest="config", type=_json_value, help="Configuration for law 'fixed'")
    p.add_argument("--offset", type=float, help="Density offset above ρ̂")
    p.add_argument("--epsilon", type=float, help="Weighted-sum hypothesis margin")

    p = add("verify", "Run an oracle suite")
    p.add_argument("--suite", choices=SUITES, help="Suite name")
    p.add_argument("--instances", type=int, help="Instances for instance-based suites")

    p = add("decay", "Visit-failure decay across sizes")
    p.add_argument("--n-grid", help="Sizes (comma list or a:b:step)")
    p.add_argument("--offset", type=float, help="Density offset above ρ̂")

    return parser


RUNNER_KEYS = {"command", "config_path", "lab_config", "verbose"}


def build_experiment(args: argparse.Namespace) -> ExperimentConfig:
    """Merge the JSON config (if any) with inline flags and validate."""
    data: Dict[str, Any] = {}
    config_path = getattr(args, "config_path", None)
    if config_path is not None:
        with open(config_path) as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise ValueError(f"{config_path}: experiment config must be a JSON object")
        declared = data.get("command")
        if declared is not None and declared != args.command:
            raise ValueError(
                f"command: config declares {declared!r} but {args.command!r} was requested"
            )
        if "sleep_rate" in data:
            data["lambda"] = data.pop("sleep_rate")

    overrides = {k: v for k, v in vars(args).items() if k not in RUNNER_KEYS}
    if "sleep_rate" in overrides:
        overrides["lambda"] = overrides.pop("sleep_rate")
    data.update(overrides)
    data["command"] = args.command
    return ExperimentConfig.model_validate(data)


def format_validation_error(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        loc = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{loc}: {item['msg']}")
    return "; ".join(lines)


# ──────────────────────────────────────────────────────────────────────────────
# Shared builders
# ──────────────────────────────────────────────────────────────────────────────

def build_topology(exp: ExperimentConfig) -> Topology:
    """Interval ⟦1,n⟧, or the general topology given in the config."""
    if exp.topology is not None:
        spec = exp.topology
        labels = {str(v): v for v in spec.vertices}
        labels[str(spec.sink)] = spec.sink
        kernel = {}
        for row, targets in spec.kernel.items():
            if row not in labels:
                raise ValueError(f"topology.kernel.{row}: unknown vertex")
            unknown = [t for t in targets if t not in labels]
            if unknown:
                raise ValueError(f"topology.kernel.{row}: unknown targets {unknown}")
            kernel[labels[row]] = {labels[t]: p for t, p in targets.items()}
        return build_general(spec.vertices, kernel, sink=spec.sink)

    n = exp.n
    if n is None and exp.config is not None:
        n = len(exp.config)
    return build_interval(n)


def build_source(exp: ExperimentConfig, lab: LabConfig, topology: Optional[Topology] = None) -> InstructionSource:
    return InstructionSource(
        topology or build_topology(exp),
        exp.sleep_rate,
        exp.seed,
        SourceMode(exp.mode),
        block_size=lab.engine.block_size,
    )


def _driving(exp: ExperimentConfig) -> DrivingSequence:
    return DrivingSequence.parse(exp.driving, seed=exp.seed)


def _confidence(exp: ExperimentConfig, lab: LabConfig) -> float:
    return exp.confidence if exp.confidence is not None else lab.estimators.confidence


def _conservative(exp: ExperimentConfig, lab: LabConfig) -> bool:
    return lab.estimators.conservative and not exp.point_estimates


def _configuration(data: Sequence[Any], topology: Topology) -> Configuration:
    config = Configuration.from_json(list(data))
    if config.n != topology.n:
        raise ConfigurationFormatError(
            f"config: {config.n} entries for a topology with {topology.n} sites"
        )
    return config


def _output(exp: ExperimentConfig, lab: LabConfig, default_name: str) -> Path:
    return exp.output or lab.paths.output_dir / default_name


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}_{suffix}{path.suffix or '.csv'}")


# ──────────────────────────────────────────────────────────────────────────────
# Commands
# ──────────────────────────────────────────────────────────────────────────────

def cmd_stabilize(exp: ExperimentConfig, lab: LabConfig) -> str:
    source = build_source(exp, lab)
    topology = source.topology
    config = _configuration(exp.config, topology)
    odometer = (
        Odometer.from_json(exp.odometer) if exp.odometer is not None else Odometer.zeros(topology.n)
    )
    if odometer.n != topology.n:
        raise ConfigurationFormatError(
            f"odometer: {odometer.n} entries for a topology with {topology.n} sites"
        )

    report = stabilize(State(config, odometer), source, sites=exp.sites, cap=lab.engine.topple_cap)
    visited = sorted(report.visited, key=lambda site: topology.index_of(site))
    out = write_json(
        {
            "n": topology.n,
            "lambda": exp.sleep_rate,
            "seed": exp.seed,
            "initial": config.to_json(),
            "final": report.final.config.to_json(),
            "odometer": report.final.odometer.to_json(),
            "delta_odometer": report.delta_odometer.to_json(),
            "visited": visited,
            "exits": {side.value: count for side, count in report.exits.items()},
            "topplings": report.topple_count,
        },
        _output(exp, lab, "stabilize.json"),
    )
    return (
        f"stabilize: n={topology.n}, {report.topple_count} topplings, "
        f"{report.total_exits} exits, {report.final.config.total()} particles left → {out}"
    )


def cmd_chain(exp: ExperimentConfig, lab: LabConfig) -> str:
    source = build_source(exp, lab)
    topology = source.topology
    initial = (
        _configuration(exp.config, topology) if exp.config is not None else Configuration.empty(topology.n)
    )
    run = run_chain(initial, exp.t, _driving(exp), source)
    out = write_table(run.to_frame(exp.include_configs), _output(exp, lab, "chain.csv"))
    return (
        f"chain: n={topology.n}, t={exp.t}, final count {run.final.total()}, "
        f"{sum(run.exits_total)} killed → {out}"
    )


def cmd_sample_stationary(exp: ExperimentConfig, lab: LabConfig) -> str:
    source = build_source(exp, lab)
    n = source.topology.n
    counts, masks = stationary_samples(source, exp.reps, exp.threads)
    frame = pl.DataFrame({
        "replica": list(range(exp.reps)),
        "count": counts.tolist(),
        "config": [
            json.dumps([SLEEP_TOKEN if (mask >> i) & 1 else 0 for i in range(n)])
            for mask in masks
        ],
    })
    out = write_table(frame, _output(exp, lab, "stationary_samples.csv"))
    return f"sample-stationary: n={n}, {exp.reps} samples, mean count {counts.mean():.4g} → {out}"


def cmd_density(exp: ExperimentConfig, lab: LabConfig) -> str:
    source = build_source(exp, lab)
    estimate = stationary_density(source, exp.reps, _confidence(exp, lab), exp.threads)
    frame = pl.DataFrame({
        "n": [source.topology.n],
        "lambda": [exp.sleep_rate],
        "reps": [estimate.reps],
        "rho_hat": [estimate.mean],
        "lo": [estimate.lo],
        "hi": [estimate.hi],
        "sd": [estimate.sd],
    })
    out = write_table(frame, _output(exp, lab, "density.csv"))
    return (
        f"density: n={source.topology.n}, ρ̂={estimate.mean:.6g} "
        f"[{estimate.lo:.6g}, {estimate.hi:.6g}] → {out}"
    )


def cmd_hitting_tail(exp: ExperimentConfig, lab: LabConfig) -> str:
    topology = build_topology(exp)
    tail = hitting_tail(topology, exp.m_max)
    out = write_table(tail.to_frame(), _output(exp, lab, "hitting_tail.csv"))
    shown = min(2, tail.max_m)
    return f"hitting-tail: n={topology.n}, m<={exp.m_max}, tail[{shown}]={tail[shown]:.6g} → {out}"


def cmd_mixing_sweep(exp: ExperimentConfig, lab: LabConfig) -> str:
    source = build_source(exp, lab)
    sweep = mixing_sweep(
        source,
        exp.t_grid,
        _driving(exp),
        exp.reps,
        m_grid=exp.m_grid,
        confidence=_confidence(exp, lab),
        conservative=_conservative(exp, lab),
        plugin=exp.plugin,
        resamples=lab.estimators.bootstrap_resamples,
        plugin_cap=lab.estimators.plugin_max_sites,
        threads=exp.threads,
    )
    out = write_table(sweep, _output(exp, lab, "mixing_sweep.csv"))
    write_table(emit_plotdata(sweep), _sibling(out, "plot"))
    upper = sweep["upper"].to_list()
    return (
        f"mixing-sweep: n={source.topology.n}, {sweep.height} grid points, "
        f"upper {upper[0]:.4g} → {upper[-1]:.4g} → {out}"
    )


def cmd_cutoff(exp: ExperimentConfig, lab: LabConfig) -> str:
    t_grid: Optional[Callable[[int], Sequence[int]]] = None
    if exp.t_grid is not None:
        shared = list(exp.t_grid)
        t_grid = lambda n: shared  # noqa: E731
    report = locate_cutoff(
        exp.n_grid,
        exp.sleep_rate,
        exp.epsilon,
        exp.reps,
        exp.seed,
        driving=_driving(exp),
        t_grid=t_grid,
        density_reps=exp.density_reps,
        m_grid=exp.m_grid,
        confidence=_confidence(exp, lab),
        conservative=_conservative(exp, lab),
        threads=exp.threads,
    )
    out = write_table(report.frame, _output(exp, lab, "cutoff.csv"))
    write_table(report.sweeps, _sibling(out, "sweeps"))
    write_table(emit_plotdata(report.sweeps), _sibling(out, "plot"))
    windows = ", ".join(f"{w:.3g}" for w in report.windows)
    shrinking = "shrinking" if report.window_shrinking else "not shrinking"
    return f"cutoff: n={exp.n_grid}, windows/n [{windows}] ({shrinking}) → {out}"


def cmd_exit_prob(exp: ExperimentConfig, lab: LabConfig) -> str:
    source = build_source(exp, lab)
    topology = source.topology
    confidence = _confidence(exp, lab)
    density = stationary_density(source, exp.density_reps or exp.reps, confidence, exp.threads)

    if exp.law == "fixed":
        law = ConfigurationLaw.fixed(_configuration(exp.config, topology))
        particles = law.config.total()
    else:
        particles = exp.particles
        if particles is None:
            particles = math.ceil((density.mean + exp.offset) * topology.n)
        if exp.law == "central":
            law = ConfigurationLaw.central(particles)
        else:
            law = ConfigurationLaw.uniform(particles, seed=exp.seed)

    estimate = exit_probability(
        law,
        BoundarySide(exp.side),
        source,
        exp.reps,
        confidence=confidence,
        rho_hat=density.mean,
        epsilon=exp.epsilon,
        threads=exp.threads,
    )
    frame = pl.DataFrame({
        "n": [topology.n],
        "lambda": [exp.sleep_rate],
        "side": [estimate.side.value],
        "law": [exp.law],
        "particles": [particles],
        "reps": [estimate.reps],
        "exits": [estimate.exits],
        "frequency": [estimate.frequency],
        "lo": [estimate.lo],
        "hi": [estimate.hi],
        "any_exit_frequency": [estimate.any_exit_frequency],
        "weighted_mean": [estimate.weighted_mean],
        "weighted_min": [estimate.weighted_min],
        "weighted_max": [estimate.weighted_max],
        "hypothesis_rate": [estimate.hypothesis_rate],
        "threshold": [estimate.threshold],
        "rho_hat": [density.mean],
    })
    out = write_table(frame, _output(exp, lab, "exit_prob.csv"))
    return (
        f"exit-prob: n={topology.n}, {particles} particles ({exp.law}), "
        f"{exp.side} exit frequency {estimate.frequency:.4g} → {out}"
    )


def cmd_verify(exp: ExperimentConfig, lab: LabConfig) -> str:
    reps = exp.reps if "reps" in exp.model_fields_set else None
    verdict = run_suite(
        exp.suite, exp.seed, instances=exp.instances, reps=reps, threads=exp.threads, lab=lab
    )
    out = _output(exp, lab, f"verify_{exp.suite}.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(verdict.to_json() + "\n")
    generate_run_report([verdict], out.with_suffix(".md"), seed=exp.seed)
    status = "passed" if verdict.ok else "FAILED"
    return (
        f"verify: {exp.suite} {status} ({verdict.passed}/{verdict.instances} passed, "
        f"{verdict.skipped} skipped) → {out}"
    )


def cmd_decay(exp: ExperimentConfig, lab: LabConfig) -> str:
    report = visit_failure_decay(
        exp.n_grid,
        exp.sleep_rate,
        exp.offset,
        exp.reps,
        exp.seed,
        driving=_driving(exp),
        density_reps=exp.density_reps,
        confidence=_confidence(exp, lab),
        threads=exp.threads,
    )
    out = write_table(report.frame, _output(exp, lab, "decay.csv"))
    return f"decay: n={exp.n_grid}, log-slope {report.slope:.4g} → {out}"


HANDLERS: Dict[str, Callable[[ExperimentConfig, LabConfig], str]] = {
    "stabilize": cmd_stabilize,
    "chain": cmd_chain,
    "sample-stationary": cmd_sample_stationary,
    "density": cmd_density,
    "hitting-tail": cmd_hitting_tail,
    "mixing-sweep": cmd_mixing_sweep,
    "cutoff": cmd_cutoff,
    "exit-prob": cmd_exit_prob,
    "verify": cmd_verify,
    "decay": cmd_decay,
}


# ──────────────────────────────────────────────────────────────────────────────
# Entry points
# ──────────────────────────────────────────────────────────────────────────────

def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"✗ {e}", file=sys.stderr)
        return 1
    except SystemExit as e:  # --help
        return int(e.code or 0)

    try:
        lab = load_config(getattr(args, "lab_config", None))
        level = "DEBUG" if getattr(args, "verbose", False) else lab.logging.level
        setup_logging(
            lab.paths.logs_dir,
            level=level,
            log_format=lab.logging.format,
            console=lab.logging.console,
            file=lab.logging.file,
        )
        exp = build_experiment(args)
    except ValidationError as e:
        print(f"✗ Invalid configuration: {format_validation_error(e)}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"✗ Invalid configuration: {e}", file=sys.stderr)
        return 1

    log = logger.bind(component="Runner")
    log.info("=" * 70)
    log.info(f"ARW LAB: {exp.command} (seed={exp.seed}, threads={exp.threads})")
    log.info("=" * 70)

    try:
        summary = HANDLERS[exp.command](exp, lab)
    except ValidationError as e:
        log.error(f"Validation failed: {format_validation_error(e)}")
        print(f"✗ {exp.command}: {format_validation_error(e)}", file=sys.stderr)
        return 1
    except ValueError as e:
        log.error(f"{exp.command} rejected its input: {e}")
        print(f"✗ {exp.command}: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        log.exception(f"{exp.command} failed: {e}")
        print(f"✗ {exp.command} failed: {e}", file=sys.stderr)
        return 2

    print(f"✓ {summary}")
    return 0


def main() -> None:
    """CLI entry point."""
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
