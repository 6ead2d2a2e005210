"""Command-line entry point: configuration loading, subcommand dispatch,
deterministic output artifacts.

Subcommands:
  verify  run the oracle identity suite, print a pass/fail table
  trial   run one trial, print the record and error ledger
  sweep   optimal-encoding sweep, write sweep.csv and optimal.csv
  grow    GHZ growth statistics, write growth.csv

Config files are flat ``key = value`` text (# comments allowed); unknown
keys are rejected. Command-line flags override file values. All outputs are
deterministic functions of (config bytes, flags); progress goes to stderr.
"""
from __future__ import annotations

import argparse
import math
import statistics
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from . import verify as verify_mod
from .encoding import QubitPool, grow_ghz
from .gates import GateParams
from .montecarlo import mix_seed, run_trial
from .optimizer import SweepSpec, default_p_grid, sweep
from .protocol import LOCAL, NETWORK, ProtocolConfig

import random

SWEEP_HEADER = "mode,p_cz,n,trials,loss_fraction,mean_p_phys,p_e,ci95,mean_elapsed_s,master_seed"
OPTIMAL_HEADER = "mode,p_cz,best_n,p_e,ci95"
GROWTH_HEADER = "p_cz,target_level,mean_attempts,mean_time_s,ci95"


@dataclass
class RunConfig:
    mode: str = LOCAL
    n: int = 2
    p_cz: float = 0.9
    trials: int = 50_000
    master_seed: int = 1
    workers: int = 1
    t_cz: float = 10e-6
    eps_cz: float = 1e-4
    t_bell_remote: float = 160e-6
    t_bell_local: float = 10e-6
    eps_bell: float = 1e-4
    t_coh: float = 1.0
    measure_time: float = 0.0
    reset_time: float = 0.0
    bell_time_model: str = "fixed"
    bell_gen_success: float = 0.5
    pool_size: Optional[int] = None
    resource_prep: str = "pipelined"
    same_node_gate_mode: str = "teleported"
    decoherence_model: str = "exponential"
    p_cz_grid: tuple[float, ...] = field(default_factory=default_p_grid)
    n_candidates: tuple[int, ...] = tuple(range(1, 13))
    grow_p_grid: tuple[float, ...] = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    grow_targets: tuple[int, ...] = (2, 4, 8)
    grow_runs: int = 20_000
    output_dir: str = "."
    emit_events: bool = False

    def gate_params(self, p_cz: Optional[float] = None) -> GateParams:
        return GateParams(
            p_cz=self.p_cz if p_cz is None else p_cz,
            t_cz=self.t_cz, eps_cz=self.eps_cz,
            t_bell_remote=self.t_bell_remote, t_bell_local=self.t_bell_local,
            eps_bell=self.eps_bell, t_coh=self.t_coh,
            measure_time=self.measure_time, reset_time=self.reset_time,
            bell_time_model=self.bell_time_model,
            bell_gen_success=self.bell_gen_success)

    def protocol_config(self) -> ProtocolConfig:
        return ProtocolConfig(
            n=self.n, mode=self.mode, gate_params=self.gate_params(),
            pool_size=self.pool_size, resource_prep=self.resource_prep,
            same_node_gate_mode=self.same_node_gate_mode,
            decoherence_model=self.decoherence_model)

    def sweep_spec(self) -> SweepSpec:
        return SweepSpec(
            mode=self.mode, p_cz_grid=self.p_cz_grid,
            n_candidates=self.n_candidates,
            trials_per_point=self.trials, master_seed=self.master_seed,
            gate_params=self.gate_params(), pool_size=self.pool_size,
            resource_prep=self.resource_prep,
            same_node_gate_mode=self.same_node_gate_mode,
            decoherence_model=self.decoherence_model, workers=self.workers)


class ConfigError(ValueError):
    pass


def _parse_float_list(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        lo, hi, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise ConfigError(f"grid step must be positive: {text!r}")
        out = []
        v = lo
        while v <= hi + 1e-12:
            out.append(round(v, 9))
            v += step
        return tuple(out)
    return tuple(float(x) for x in text.split(",") if x.strip())


def _parse_int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if ".." in text:
        lo, hi = (int(x) for x in text.split(".."))
        return tuple(range(lo, hi + 1))
    return tuple(int(x) for x in text.split(",") if x.strip())


_PARSERS = {
    "mode": str, "n": int, "p_cz": float, "trials": int, "master_seed": int,
    "workers": int, "t_cz": float, "eps_cz": float, "t_bell_remote": float,
    "t_bell_local": float, "eps_bell": float, "t_coh": float,
    "measure_time": float, "reset_time": float, "bell_time_model": str,
    "bell_gen_success": float, "pool_size": int, "resource_prep": str,
    "same_node_gate_mode": str, "decoherence_model": str,
    "p_cz_grid": _parse_float_list, "n_candidates": _parse_int_list,
    "grow_p_grid": _parse_float_list, "grow_targets": _parse_int_list,
    "grow_runs": int, "output_dir": str,
    "emit_events": lambda s: s.lower() in ("1", "true", "yes"),
}


def load_config(path: Optional[str]) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        if key == "t_coh" and val.lower() in ("inf", "infinity"):
            values[key] = math.inf
            continue
        try:
            values[key] = _PARSERS[key](val)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return replace(cfg, **values)


def apply_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["master_seed"] = args.seed
    for flag, key in (("trials", "trials"), ("mode", "mode"),
                      ("workers", "workers"), ("output", "output_dir"),
                      ("n", "n"), ("p_cz", "p_cz")):
        v = getattr(args, flag, None)
        if v is not None:
            updates[key] = v
    if getattr(args, "emit_events", False):
        updates["emit_events"] = True
    cfg = replace(cfg, **updates)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.mode not in (LOCAL, NETWORK):
        raise ConfigError(f"mode must be local or network, got {cfg.mode!r}")
    if cfg.trials < 1 or cfg.grow_runs < 1:
        raise ConfigError("trials and grow_runs must be >= 1")
    if not 0.0 < cfg.p_cz <= 1.0:
        raise ConfigError("p_cz must lie in (0, 1]")
    cfg.gate_params()      # re-runs GateParams validation
    cfg.protocol_config()  # re-runs ProtocolConfig validation


def fmt(x: float) -> str:
    return f"{x:.12g}"


# -- subcommands -------------------------------------------------------------
def cmd_verify(args: argparse.Namespace) -> int:
    results = verify_mod.run_suite(sabotage=args.sabotage_recovery)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  max_dev={r.max_deviation:.3e}  {status}")
        failed += not r.passed
    print(f"{len(results) - failed}/{len(results)} identities passed")
    return 1 if failed else 0


def cmd_trial(args: argparse.Namespace) -> int:
    cfg = apply_flags(load_config(args.config), args)
    record, ledger = run_trial(cfg.protocol_config(), cfg.master_seed, detail=True)
    print(f"completed {record.completed}")
    print(f"logical_loss {record.logical_loss}")
    print(f"elapsed_s {fmt(record.elapsed)}")
    print(f"cz_attempts {record.cz_attempts}")
    print(f"cz_successes {record.cz_successes}")
    print(f"bell_pairs_consumed {record.bell_pairs_consumed}")
    print(f"bell_pairs_used {record.bell_pairs_used}")
    print(f"reencode_time_s {fmt(record.reencode_time)}")
    print(f"qubit_seconds {fmt(record.qubit_seconds)}")
    print(f"heralded_factor {fmt(ledger.heralded_factor)}")
    print(f"exposure_factor {fmt(ledger.exposure_factor)}")
    print(f"p_phys {fmt(ledger.p_phys)}")
    for q in sorted(record.per_qubit_exposure or {}):
        tau = record.per_qubit_exposure[q]
        if tau > 0.0:
            print(f"exposure q{q} {fmt(tau)}")
    if cfg.emit_events:
        for ev in record.events or ():
            print("event\t" + "\t".join(fmt(x) if isinstance(x, float) else str(x)
                                        for x in ev))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = apply_flags(load_config(args.config), args)
    spec = cfg.sweep_spec()
    result = sweep(spec, progress=True)
    outdir = Path(cfg.output_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        sweep_path = outdir / "sweep.csv"
        optimal_path = outdir / "optimal.csv"
        with open(sweep_path, "w") as fh:
            fh.write(SWEEP_HEADER + "\n")
            for row in result.rows:
                for n in sorted(row.per_n):
                    agg = row.per_n[n]
                    fh.write(",".join([
                        cfg.mode, fmt(row.p_cz), str(n), str(agg.trials),
                        fmt(agg.loss_fraction), fmt(agg.mean_p_phys),
                        fmt(agg.p_e), fmt(agg.ci95), fmt(agg.mean_elapsed),
                        str(cfg.master_seed)]) + "\n")
        with open(optimal_path, "w") as fh:
            fh.write(OPTIMAL_HEADER + "\n")
            for row in result.rows:
                fh.write(",".join([
                    cfg.mode, fmt(row.p_cz), str(row.best_n),
                    fmt(row.aggregate.p_e), fmt(row.aggregate.ci95)]) + "\n")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {sweep_path} {optimal_path}")
    return 0


def cmd_grow(args: argparse.Namespace) -> int:
    cfg = apply_flags(load_config(args.config), args)
    outdir = Path(cfg.output_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        path = outdir / "growth.csv"
        with open(path, "w") as fh:
            fh.write(GROWTH_HEADER + "\n")
            for p in cfg.grow_p_grid:
                params = cfg.gate_params(p_cz=p)
                for target in cfg.grow_targets:
                    attempts = []
                    times = []
                    for i in range(cfg.grow_runs):
                        rng = random.Random(mix_seed(
                            mix_seed(cfg.master_seed, round(p * 1_000_000)),
                            (target << 32) | i))
                        pool = QubitPool(free_count=max(4 * target, 8))
                        out = grow_ghz(target, pool, params, rng)
                        attempts.append(out.cz_attempts)
                        times.append(out.elapsed)
                    mean_a = statistics.fmean(attempts)
                    mean_t = statistics.fmean(times)
                    sd = statistics.stdev(attempts) if len(attempts) > 1 else 0.0
                    ci = 1.96 * sd / math.sqrt(len(attempts))
                    fh.write(",".join([fmt(p), str(target), fmt(mean_a),
                                       fmt(mean_t), fmt(ci)]) + "\n")
                print(f"grow p_cz={p:g} done", file=sys.stderr)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heraldcnot",
        description="Monte Carlo simulator for logical CNOT gates built from "
                    "heralded CZ gates on parity-encoded qubits")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the oracle identity suite")
    p_verify.add_argument("--sabotage-recovery", action="store_true",
                          help=argparse.SUPPRESS)  # negative-control test hook
    p_verify.set_defaults(fn=cmd_verify)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value config file")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--trials", type=int, help="trials per ensemble")
    common.add_argument("--mode", choices=(LOCAL, NETWORK))
    common.add_argument("--output", metavar="DIR", help="output directory")
    common.add_argument("--workers", type=int, help="parallel workers")
    common.add_argument("--n", type=int, help="encoding level")
    common.add_argument("--p-cz", dest="p_cz", type=float,
                        help="heralded CZ success probability")

    p_trial = sub.add_parser("trial", parents=[common], help="run one trial")
    p_trial.add_argument("--emit-events", action="store_true",
                         help="print the trial event log")
    p_trial.set_defaults(fn=cmd_trial)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="optimal-encoding sweep; writes sweep.csv and optimal.csv")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_grow = sub.add_parser("grow", parents=[common],
                            help="GHZ growth statistics; writes growth.csv")
    p_grow.set_defaults(fn=cmd_grow)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
