"""Operator entry point: scenario runs, REPL, metric evaluation, serving, export."""

from __future__ import annotations

import argparse
import json
import sys
import threading
import time
from importlib import resources
from pathlib import Path

import numpy as np

from .config import EngineConfig, load_config
from .engine import Engine, ScenarioError, run_scenario
from .gait import sit_stand_angle, walk_angle
from .intent import evaluate_trials, load_corpus, parse, tokenize
from .cpg import JOINT_TYPES


def bundled_data(name: str) -> Path:
    return Path(resources.files("exoplan").joinpath(f"data/{name}"))


def _load_config_or_die(path: str | None) -> EngineConfig:
    try:
        return load_config(path)
    except (OSError, ValueError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _apply_common_flags(cfg: EngineConfig, args) -> EngineConfig:
    if getattr(args, "latency", False):
        cfg.latency.enabled = True
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def cmd_run(args) -> int:
    cfg = _apply_common_flags(_load_config_or_die(args.config), args)
    print(cfg.resolved_json(), file=sys.stderr)
    scenario_path = args.scenario
    if scenario_path == "a_to_b" or scenario_path == "a_to_b.scn":
        scenario_path = bundled_data("a_to_b.scn")
    try:
        status, summary = run_scenario(
            scenario_path,
            args.out,
            config=cfg,
            realtime=args.realtime,
            seed_override=args.seed,
        )
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        print(f"scenario {summary['scenario']}: {summary['ticks']} ticks, "
              f"{summary['transition_count']} transitions, "
              f"{summary['clamp_activation_count']} clamp activations")
        print(" -> ".join(summary["fsm_visit_sequence"]))
        for message in summary["invariant_violations"]:
            print(f"violation: {message}")
    return status


def cmd_eval(args) -> int:
    try:
        trials, errors = load_corpus(args.corpus)
    except OSError as exc:
        print(f"error: cannot read corpus: {exc}", file=sys.stderr)
        return 2
    if not trials:
        print("error: corpus holds no usable trials", file=sys.stderr)
        return 2
    report = evaluate_trials(trials)
    report["malformed_lines"] = [{"line": n, "reason": r} for n, r in errors]
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for i, tr in enumerate(report["trials"], start=1):
            mark = "ok " if tr["intent_correct"] else "ERR"
            print(f"{i:3d} {mark} wer={tr['wer_percent']:7.2f}%  "
                  f"target={tr['target_intent'] or '-':<10} parsed={tr['parsed_intent'] or '-':<10} "
                  f"| {tr['hypothesis']}")
        print(f"cumulative: WER {report['wer_percent']:.2f}%  IER {report['ier_percent']:.2f}%  "
              f"({report['trial_count']} trials)")
        for n, r in errors:
            print(f"malformed line {n}: {r}", file=sys.stderr)
    return 1 if errors else 0


def cmd_repl(args) -> int:
    cfg = _apply_common_flags(_load_config_or_die(args.config), args)
    print(cfg.resolved_json(), file=sys.stderr)
    engine = Engine(cfg)
    thread = threading.Thread(
        target=engine.run,
        kwargs={"duration": None, "realtime": True, "collect": False, "stop_on_violation": False},
        daemon=True,
    )
    thread.start()
    print("exoplan repl: lines are parsed as utterances; :state :limits :quit", flush=True)
    try:
        for line in sys.stdin:
            line = line.strip()
            if not line:
                continue
            if line == ":quit":
                break
            if line == ":state":
                snap = engine.state_snapshot()
                print(f"fsm={snap['fsm']} omega={snap['omega']:.3f} rad/s "
                      f"r={snap['r']:.3f} targets=({snap['omega_target']:.3f}, {snap['amp_target']:.3f})",
                      flush=True)
                continue
            if line == ":limits":
                snap = engine.state_snapshot()["limits"]
                print(f"q_min={snap['q_min']} q_max={snap['q_max']} v_max={snap['v_max']}", flush=True)
                continue
            if not tokenize(line):
                print("no-intent (empty utterance)", flush=True)
                continue
            k = parse(line)
            if k is None:
                print("no-intent (gate word absent or no phrase matched)", flush=True)
                continue
            marker = engine.tick_index
            engine.queue.push(k, engine.now())
            while engine.tick_index < marker + 3:  # let the loop consume it
                time.sleep(engine.dt)
            decision = engine.last_decision or {}
            verdict = "accepted" if decision.get("accepted") else f"rejected ({decision.get('effect')})"
            print(f"{k.value} {verdict}, state {engine.state_snapshot()['fsm']}", flush=True)
    finally:
        engine.request_stop()
        thread.join(timeout=1.0)
    return 0


def cmd_serve(args) -> int:
    from .transport import serve

    cfg = _apply_common_flags(_load_config_or_die(args.config), args)
    print(cfg.resolved_json(), file=sys.stderr)
    engine = Engine(cfg)
    static_dir = None
    if args.static and Path(args.static).is_dir():
        static_dir = Path(args.static)
    serve(
        engine,
        ws_port=cfg.transport.ws_port,
        udp_port=cfg.transport.udp_port,
        decimation=cfg.transport.decimation,
        static_dir=static_dir,
    )
    return 0


def cmd_export_gait(args) -> int:
    cfg = _apply_common_flags(_load_config_or_die(args.config), args)
    engine = Engine(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    stride = out / "walk_stride.csv"
    with open(stride, "w", encoding="utf-8") as fh:
        fh.write("theta_rad," + ",".join(JOINT_TYPES) + "\n")
        for theta in np.linspace(0.0, 2.0 * np.pi, args.points):
            row = [repr(float(theta))]
            for joint in JOINT_TYPES:
                row.append(repr(walk_angle(engine.gait.walk_series[joint], float(theta))))
            fh.write(",".join(row) + "\n")

    profile = engine.gait.sit_to_stand
    sit_stand = out / "sit_to_stand.csv"
    with open(sit_stand, "w", encoding="utf-8") as fh:
        fh.write("t_s," + ",".join(JOINT_TYPES) + "\n")
        for t in np.linspace(0.0, profile.duration, args.points):
            row = [repr(float(t))]
            for joint in JOINT_TYPES:
                row.append(repr(sit_stand_angle(profile, joint, float(t))))
            fh.write(",".join(row) + "\n")
    print(f"wrote {stride} and {sit_stand}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exoplan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="engine configuration JSON")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--realtime", action="store_true", help="align ticks to the wall clock")
        p.add_argument("--latency", action="store_true", help="simulate speech-to-actuation latency")
        p.add_argument("--seed", type=int, default=None, help="seed for latency draws")

    p_run = sub.add_parser("run", help="execute a scenario file")
    p_run.add_argument("scenario", help="scenario JSON path, or 'a_to_b' for the bundled one")
    p_run.add_argument("--out", default="runs/latest", help="artifact directory")
    common(p_run)
    p_run.set_defaults(fn=cmd_run)

    p_repl = sub.add_parser("repl", help="interactive text console against a live engine")
    common(p_repl)
    p_repl.set_defaults(fn=cmd_repl)

    p_eval = sub.add_parser("eval", help="score a recognition corpus (WER/IER)")
    p_eval.add_argument("corpus", help="tab-separated corpus path")
    common(p_eval)
    p_eval.set_defaults(fn=cmd_eval)

    p_serve = sub.add_parser("serve", help="real-time engine with UDP + WebSocket service")
    p_serve.add_argument("--static", default="frontend/dist", help="dashboard assets to serve")
    common(p_serve)
    p_serve.set_defaults(fn=cmd_serve)

    p_export = sub.add_parser("export-gait", help="write stride and sit-to-stand CSVs")
    p_export.add_argument("--out", default="runs/gait", help="output directory")
    p_export.add_argument("--points", type=int, default=629, help="samples per curve")
    common(p_export)
    p_export.set_defaults(fn=cmd_export_gait)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
