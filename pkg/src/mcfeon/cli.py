"""Batch harness: heuristic benchmarks and random-agent smoke runs over load grids.

Progress goes to stderr; data lands in the output directory as CSV plus
rendered figures. Results merge deterministically by (load, seed) no
matter how the worker pool schedules them.
"""

import argparse
import multiprocessing
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import config as cfgmod
from . import report
from .engine import Simulation
from .heuristics import POLICY_NAMES, make_policy
from .rl_env import RmscaEnv
from .topology import BUILTIN_TOPOLOGIES, Topology, TopologyError, load_topology

CLI_POLICIES = POLICY_NAMES + ("agent",)


@dataclass
class RunSpec:
    topology: str
    policy: str
    loads: List[float]
    seeds: List[int]
    num_requests: int
    out_dir: Path
    config_path: Optional[str] = None
    workers: int = 0

    def validate(self) -> List[str]:
        errors = []
        if not self.loads:
            errors.append("loads: need at least one load value")
        if any(load <= 0 for load in self.loads):
            errors.append(f"loads: all values must be > 0, got {self.loads}")
        if not self.seeds:
            errors.append("seeds: need at least one seed")
        if self.num_requests < 1:
            errors.append(f"requests: must be >= 1, got {self.num_requests}")
        if self.policy not in CLI_POLICIES:
            errors.append(
                f"policy: unknown {self.policy!r}, choose from {', '.join(CLI_POLICIES)}"
            )
        return errors


def _log(message: str) -> None:
    print(message, file=sys.stderr, flush=True)


# Loaded topologies cached per worker process (keyed by source and K).
_TOPOLOGY_CACHE: Dict[Tuple[str, int], Topology] = {}


def _get_topology(source: str, k_routes: int) -> Topology:
    key = (source, k_routes)
    if key not in _TOPOLOGY_CACHE:
        _TOPOLOGY_CACHE[key] = load_topology(source, k_routes=k_routes)
    return _TOPOLOGY_CACHE[key]


def _run_task(task: Dict) -> Dict:
    cfg = task["cfg"]
    topology = _get_topology(task["topology"], cfg["routes.k"])
    sim_cfg = cfgmod.sim_config(cfg)
    traffic_cfg = cfgmod.traffic_config(cfg, load_erlang=task["load"], seed=task["seed"])
    if task["policy"] == "agent":
        stats = _run_random_agent(topology, sim_cfg, traffic_cfg, cfg, task["requests"])
    else:
        policy = make_policy(
            task["policy"],
            slots=cfg["slots"],
            seed=[cfg["policy.seed"], task["seed"]],
            scma_partitions=cfg["scma.partitions"],
        )
        sim = Simulation(topology, sim_cfg, traffic_cfg)
        stats = sim.run(policy, task["requests"])
    row = report.run_row(task["load"], task["policy"], task["seed"], stats)
    row["steady_blocking"] = stats.steady_blocking()
    row["windows"] = stats.window_rows()
    return row


def _run_random_agent(topology, sim_cfg, traffic_cfg, cfg, num_requests: int):
    """Uniform random actions through the agent environment, stats kept across episodes."""
    episode_cfg = cfgmod.episode_config(cfg)
    episode_cfg.reset_state_on_episode = False
    env = RmscaEnv(topology, sim_cfg, traffic_cfg, episode_cfg)
    rng = np.random.default_rng([traffic_cfg.seed, cfg["policy.seed"]])
    shape = env.action_space_shape
    env.reset()
    for _ in range(num_requests):
        action = [int(rng.integers(n)) for n in shape]
        _, _, done, _ = env.step(action)
        if done:
            env.reset()
    return env.stats


def run_benchmark(spec: RunSpec) -> List[Dict]:
    """One engine run per (load, seed); writes CSVs, figures and a manifest."""
    errors = spec.validate()
    cfg, cfg_errors = cfgmod.validate_config(spec.config_path)
    errors.extend(cfg_errors)
    if not errors:
        try:
            _get_topology(spec.topology, cfg["routes.k"])
        except TopologyError as exc:
            errors.append(f"topology: {exc}")
    if errors:
        raise ValueError("; ".join(errors))

    tasks = [
        {
            "topology": spec.topology,
            "policy": spec.policy,
            "load": load,
            "seed": seed,
            "requests": spec.num_requests,
            "cfg": cfg,
        }
        for load in spec.loads
        for seed in spec.seeds
    ]
    workers = spec.workers or min(os.cpu_count() or 1, len(tasks))
    _log(
        f"running {len(tasks)} simulations ({spec.policy} on {spec.topology}, "
        f"{spec.num_requests} requests each, {workers} workers)"
    )
    if workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(workers) as pool:
            rows = []
            for i, row in enumerate(pool.imap_unordered(_run_task, tasks), 1):
                rows.append(row)
                _log(
                    f"  [{i}/{len(tasks)}] load={row['load_erlang']:g} "
                    f"seed={row['seed']} blocking={row['blocking_probability']:.4g}"
                )
    else:
        rows = []
        for i, task in enumerate(tasks, 1):
            row = _run_task(task)
            rows.append(row)
            _log(
                f"  [{i}/{len(tasks)}] load={row['load_erlang']:g} "
                f"seed={row['seed']} blocking={row['blocking_probability']:.4g}"
            )
    rows.sort(key=lambda r: (r["load_erlang"], r["seed"]))

    out = spec.out_dir
    out.mkdir(parents=True, exist_ok=True)
    report.write_runs_csv(rows, out / "runs.csv")
    windows_dir = out / "windows"
    windows_dir.mkdir(exist_ok=True)
    window_data = {}
    for row in rows:
        name = f"{row['policy']}_{row['load_erlang']:g}_{row['seed']}.csv"
        report.write_window_series(row["windows"], windows_dir / name)
        if row["seed"] == spec.seeds[0]:
            window_data[(row["load_erlang"], row["seed"])] = row["windows"]
    summary = report.summarize(rows)
    report.write_summary_csv(summary, out / "summary.csv")
    report.render_blocking_figure(summary, out / "blocking_vs_load.png")
    report.render_window_figure(window_data, out / "window_series.png")
    report.write_manifest(
        out / "manifest.json",
        {
            "topology": spec.topology,
            "policy": spec.policy,
            "loads": spec.loads,
            "seeds": spec.seeds,
            "requests_per_run": spec.num_requests,
            "config": {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()},
            "ci_method": "normal approximation over per-seed means, 99% level",
            "warmup_discard_fraction": 0.1,
        },
    )
    _log(f"report written to {out}")
    return summary


def _parse_grid(text: str, cast) -> List:
    """Comma list (`a,b,c`) or inclusive range (`start:stop:step`)."""
    if ":" in text:
        pieces = text.split(":")
        if len(pieces) != 3:
            raise argparse.ArgumentTypeError(
                f"range must be start:stop:step, got {text!r}"
            )
        start, stop, step = (float(p) for p in pieces)
        if step <= 0:
            raise argparse.ArgumentTypeError(f"range step must be > 0, got {step:g}")
        values = []
        value = start
        while value <= stop + 1e-9:
            values.append(cast(value))
            value += step
        return values
    try:
        return [cast(float(piece)) for piece in text.split(",") if piece.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse list {text!r}") from None


def cmd_bench(args: argparse.Namespace) -> int:
    spec = RunSpec(
        topology=args.topology,
        policy=args.policy,
        loads=args.loads,
        seeds=args.seeds,
        num_requests=args.requests,
        out_dir=Path(args.out),
        config_path=args.config,
        workers=args.workers,
    )
    try:
        summary = run_benchmark(spec)
    except ValueError as exc:
        _log(f"error: {exc}")
        return 2
    for row in summary:
        _log(
            f"load {row['load_erlang']:g}: blocking {row['mean_blocking']:.6g} "
            f"(99% CI [{row['ci99_low']:.6g}, {row['ci99_high']:.6g}], "
            f"{row['seeds']} seeds)"
        )
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    resolved, errors = cfgmod.validate_config(args.config)
    if args.topology:
        try:
            topo = load_topology(args.topology, k_routes=resolved["routes.k"])
            print(
                f"topology {args.topology}: {topo.num_nodes} nodes, "
                f"{len(topo.links)} links, {topo.cores} cores"
            )
        except TopologyError as exc:
            errors.append(f"topology: {exc}")
    if args.policy and args.policy not in CLI_POLICIES:
        errors.append(
            f"policy: unknown {args.policy!r}, choose from {', '.join(CLI_POLICIES)}"
        )
    print("resolved configuration:")
    for key in sorted(resolved):
        value = resolved[key]
        if isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        print(f"  {key} = {value}")
    if errors:
        for err in errors:
            print(f"error: {err}")
        return 1
    print("valid")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcfeon",
        description=(
            "Dynamic multicore-fiber elastic optical network simulator: "
            "benchmark RMSCA policies and report blocking by cause."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run a (load x seed) benchmark grid")
    bench.add_argument(
        "--topology",
        required=True,
        help=f"topology file path or builtin name ({', '.join(BUILTIN_TOPOLOGIES)})",
    )
    bench.add_argument("--policy", required=True, choices=CLI_POLICIES)
    bench.add_argument(
        "--loads",
        required=True,
        type=lambda t: _parse_grid(t, float),
        help="offered loads in Erlang: comma list or start:stop:step",
    )
    bench.add_argument(
        "--seeds",
        type=lambda t: _parse_grid(t, lambda v: int(round(v))),
        default=[0],
        help="run seeds: comma list or start:stop:step (default: 0)",
    )
    bench.add_argument("--requests", type=int, default=10000, help="arrivals per run")
    bench.add_argument("--out", required=True, help="output directory for the report")
    bench.add_argument("--config", default=None, help="flat key=value config file")
    bench.add_argument(
        "--workers", type=int, default=0, help="worker processes (default: cpu count)"
    )
    bench.set_defaults(func=cmd_bench)

    validate = sub.add_parser(
        "validate", help="check a configuration and echo resolved values"
    )
    validate.add_argument("--config", default=None, help="flat key=value config file")
    validate.add_argument("--topology", default=None, help="topology to check")
    validate.add_argument("--policy", default=None, help="policy name to check")
    validate.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
