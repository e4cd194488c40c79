"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 failed check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from typing import Callable

from .checks import run_checks
from .circuit import Circuit, InvalidCircuitError, Phase, simulate
from .circuitfile import CircuitParseError, load, parse_angle
from .experiments import (
    EventClass,
    blocked_variant,
    build_fig1,
    build_fig2,
    class_probabilities,
    default_grid,
    eve_splitter_index,
    experiment_kind,
    sample_events,
    sweep,
)
from .optics import ProbeSpec

EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 1, 2
SWEEP_COLUMNS = ("phi", "p_double_v1v2", "p_single_victor", "p_ns_coincidence", "p_other")
_COLUMN_CLASS = {
    "p_double_v1v2": EventClass.DOUBLE_V1V2,
    "p_single_victor": EventClass.SINGLE_VICTOR,
    "p_ns_coincidence": EventClass.NS_COINCIDENCE,
    "p_other": EventClass.OTHER,
}
ALPHA_WARN = 0.3


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return f"{x:.12g}"


def rounded(x: float) -> float:
    return float(fmt(x))


@dataclass
class RunConfig:
    command: str
    builtin: str | None = "fig2"
    circuit: str | None = None
    phi: float = 0.0
    phi_start: float = 0.0
    phi_end: float = 2 * math.pi
    steps: int = 64
    alpha: float = 0.1
    shots: int = 100_000
    seed: int = 0
    condition: str | None = None
    block: str = "none"
    phase_mode: str | None = None
    format: str = "csv"
    output: str = "-"
    upto: int | None = None
    tap: str | None = None

    def validate(self):
        if self.steps < 1:
            raise ConfigError("--steps must be >= 1")
        if self.command == "sample" and self.shots < 1:
            raise ConfigError("--shots must be >= 1")
        if not 0 <= self.alpha <= 1:
            raise ConfigError("--alpha must lie in [0, 1]")
        if self.circuit is not None and self.block != "none":
            raise ConfigError("--block only applies to builtin circuits")
        if self.tap is not None and self.circuit is not None:
            raise ConfigError("--tap only applies to builtin circuits")
        if self.command == "sweep" and self.circuit is not None and self.phase_mode is None:
            raise ConfigError("sweeping a circuit file needs --phase-mode to pick the swept phase")


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fockoptics", description="Exact fermionic linear-optics simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def circuit_opts(p):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--builtin", choices=("fig1", "fig2"), default="fig2")
        src.add_argument("--circuit", metavar="PATH", help="circuit file")
        p.add_argument("--alpha", type=float, default=0.1, help="probe one-particle amplitude (fig2)")
        p.add_argument("--block", choices=("none", "c", "d", "both"), default="none",
                       help="block northern branch(es) ahead of the merge splitters")
        p.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")

    p = sub.add_parser("sweep", help="exact class probabilities over a phase grid")
    circuit_opts(p)
    p.add_argument("--phi-start", type=_angle, default=0.0)
    p.add_argument("--phi-end", type=_angle, default=2 * math.pi)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--condition", choices=("E1", "E2", "none"), default="E1")
    p.add_argument("--phase-mode", help="mode whose first phase element is swept (circuit files)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("sample", help="Monte Carlo detection events")
    circuit_opts(p)
    p.add_argument("--phi", type=_angle, default=0.0)
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--condition", choices=("E1", "E2", "none"), default="none")

    p = sub.add_parser("state", help="list the amplitudes of a simulated state")
    circuit_opts(p)
    p.add_argument("--phi", type=_angle, default=0.0)
    stop = p.add_mutually_exclusive_group()
    stop.add_argument("--upto", type=int, help="apply only the first N elements")
    stop.add_argument("--tap", choices=("pre-eve",), help="stop right before Eve's splitter")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("check", help="run the invariant suite")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--oracle-cases", type=int, default=20)
    p.add_argument("--perturb-bs", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    for key in asdict(cfg):
        if key != "command" and hasattr(args, key):
            setattr(cfg, key, getattr(args, key))
    if getattr(args, "circuit", None):
        cfg.builtin = None
    if cfg.condition == "none":
        cfg.condition = None
    cfg.validate()
    return cfg


def circuit_factory(cfg: RunConfig) -> Callable[[float], Circuit]:
    """phi -> circuit for the configured builtin or file."""
    if cfg.circuit is not None:
        try:
            base = load(cfg.circuit)
        except OSError as exc:
            raise ConfigError(f"cannot read {cfg.circuit}: {exc.strerror}") from None
        except UnicodeDecodeError:
            raise ConfigError(f"{cfg.circuit} is not UTF-8 text") from None
        except CircuitParseError as exc:
            raise ConfigError(f"{cfg.circuit}:\n{exc}") from None
        if cfg.phase_mode is None:
            return lambda phi: base
        at = next((i for i, el in enumerate(base.elements)
                   if isinstance(el, Phase) and el.mode == cfg.phase_mode), None)
        if at is None:
            raise ConfigError(f"{cfg.circuit} has no phase element on mode {cfg.phase_mode!r}")

        def with_phase(phi):
            els = list(base.elements)
            els[at] = Phase(cfg.phase_mode, phi)
            return base.with_elements(els)
        return with_phase

    if cfg.builtin == "fig1":
        if cfg.block != "none":
            return lambda phi: blocked_variant(build_fig1(phi), cfg.block)
        return build_fig1
    probe = ProbeSpec.from_alpha(cfg.alpha)
    return lambda phi: blocked_variant(build_fig2(phi, probe), cfg.block)


def _config_echo(cfg: RunConfig) -> dict:
    keys = {
        "sweep": ("builtin", "circuit", "alpha", "block", "phi_start", "phi_end", "steps", "condition", "phase_mode"),
        "sample": ("builtin", "circuit", "alpha", "block", "phi", "shots", "seed", "condition"),
        "state": ("builtin", "circuit", "alpha", "block", "phi", "upto", "tap"),
    }[cfg.command]
    return {k: getattr(cfg, k) for k in keys}


def cmd_sweep(cfg: RunConfig) -> str:
    make = circuit_factory(cfg)
    grid = default_grid(cfg.steps, cfg.phi_start, cfg.phi_end)
    kind = experiment_kind(make(0.0))
    result = sweep(make, grid, cfg.condition, which_experiment=kind)
    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in result.rows:
            vals = [fmt(row.phi)] + [fmt(row.probabilities[_COLUMN_CLASS[c]]) for c in SWEEP_COLUMNS[1:]]
            buf.write(",".join(vals) + "\n")
        return buf.getvalue()
    rows = [{"phi": rounded(r.phi), **{c: rounded(r.probabilities[_COLUMN_CLASS[c]]) for c in SWEEP_COLUMNS[1:]}}
            for r in result.rows]
    return json.dumps({"config": _config_echo(cfg), "columns": list(SWEEP_COLUMNS), "rows": rows}, indent=2) + "\n"


def cmd_sample(cfg: RunConfig) -> str:
    circuit = circuit_factory(cfg)(cfg.phi)
    kind = experiment_kind(circuit)
    exact = class_probabilities(circuit, cfg.condition, kind)
    counts = sample_events(circuit, cfg.shots, cfg.seed, cfg.condition, kind)
    record = {
        "config": _config_echo(cfg),
        "experiment": kind,
        "classes": {
            cls.value: {"count": counts[cls], "frequency": rounded(counts[cls] / cfg.shots),
                        "probability": rounded(exact[cls])}
            for cls in EventClass
        },
    }
    return json.dumps(record, indent=2) + "\n"


def cmd_state(cfg: RunConfig) -> str:
    circuit = circuit_factory(cfg)(cfg.phi)
    upto = cfg.upto
    if cfg.tap == "pre-eve":
        upto = eve_splitter_index(circuit)
    state = simulate(circuit, upto)
    reg = state.registry
    total = sum(abs(a) ** 2 for _, a in state.items())
    terms = sorted(state.items(), key=lambda kv: kv[0], reverse=True)
    if cfg.format == "json":
        out = {
            "config": _config_echo(cfg),
            "modes": list(reg.labels),
            "terms": [{"occupied": list(reg.occupied_modes(k)), "re": rounded(a.real), "im": rounded(a.imag),
                       "probability": rounded(abs(a) ** 2 / total)} for k, a in terms],
        }
        return json.dumps(out, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pattern", "occupied", "re", "im", "probability"])
    for k, a in terms:
        w.writerow(["".join(map(str, k)), " ".join(reg.occupied_modes(k)) or "vacuum",
                    fmt(a.real), fmt(a.imag), fmt(abs(a) ** 2 / total)])
    return buf.getvalue()


def cmd_check(args) -> int:
    results = run_checks(seed=args.seed, cases=args.cases, oracle_cases=args.oracle_cases,
                         perturb_bs=args.perturb_bs)
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail} ({r.seconds:.2f}s)")
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_CHECK if failed else EXIT_OK


def write_output(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fockoptics-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args)
    try:
        cfg = config_from_args(args)
        if cfg.builtin == "fig2" and cfg.alpha > ALPHA_WARN:
            print(f"warning: alpha={cfg.alpha} > {ALPHA_WARN}; leading-order probe predictions degrade",
                  file=sys.stderr)
        text = {"sweep": cmd_sweep, "sample": cmd_sample, "state": cmd_state}[cfg.command](cfg)
        write_output(text, cfg.output)
    except (ConfigError, InvalidCircuitError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
