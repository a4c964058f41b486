"""Command-line front end.

Subcommands: generate (synthetic datasets), run (one tracking session),
sweep (interval x grid x predictor grid), ablate (predictor variants plus
warmup counts), report (charts from a results table).

Every output embeds the fully-resolved configuration, and all randomness
flows from --seed (fallback: the KTRACK_SEED environment variable, then 0),
so identical invocations produce identical files. n=0 everywhere denotes
the per-frame baseline.

Exit codes: 0 ok, 2 flag validation, 3 file/parse, 4 tracker session or
transport, 5 undefined metric, 6 nothing to plot, 7 invalid parameter,
1 other errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import dataio
from .bridge import ExternalTracker, session_open
from .errors import (
    InvalidParameterError,
    InvalidSpecError,
    KTrackError,
    NothingToPlotError,
    ParseError,
    ProtocolError,
    SessionOpenError,
    TrackerReportedError,
    TransportError,
    UndefinedMetricError,
)
from .kalman import KalmanParams
from .predictors import PredictorKind
from .scheduler import (
    ScheduleConfig,
    SweepCell,
    evaluate_session,
    run_session,
    run_sweep,
)
from .synthgen import TrajectoryKind, TrajectorySpec, generate
from .trackers import OracleConfig, OracleTracker

WARMUP_ABLATION_COUNTS = (0, 1, 2, 3, 5, 10)
CHART_METRICS = ("pck5", "retention", "epe", "aj", "fps_sim", "speedup")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("KTRACK_SEED")
    return int(env) if env else 0


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


def _occlusion(text: str) -> tuple[int, int, int]:
    try:
        pid, start, end = (int(tok) for tok in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected PID:START:END, got {text!r}") from None
    return pid, start, end


def _config_echo(args, seed: int) -> dict:
    # Output paths are where the file lives, not what it means; excluding
    # them keeps identical configurations byte-identical on disk.
    skip = {"func", "out", "out_dir"}
    cfg = {k: v for k, v in vars(args).items() if k not in skip}
    cfg["seed"] = seed
    return {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()}


def _spec_from_args(args, seed: int, num_points: int | None = None) -> TrajectorySpec:
    return TrajectorySpec(
        kind=TrajectoryKind(args.kind),
        frames=args.frames,
        num_points=num_points if num_points is not None else args.grid,
        width=args.width,
        height=args.height,
        seed=seed,
        speed=args.speed,
        radius=args.radius,
        angular_rate=args.angular_rate,
        amplitude=args.amplitude,
        period=args.period,
        accel_bound=args.accel_bound,
        segment_len=args.segment_len,
        occlusions=tuple(args.occlude or ()),
    )


def _params_from_args(args) -> KalmanParams:
    return KalmanParams(sigma_p=args.sigma_p, sigma_m=args.sigma_m, sigma_v=args.sigma_v)


def _oracle_from_args(args, seed: int) -> OracleConfig:
    cost = args.cost_ms if args.cost_ms is not None else 556.0
    return OracleConfig(
        noise_std=args.oracle_noise,
        failure_prob=args.oracle_failure,
        cost_ms=cost,
        seed=seed,
    )


def _load_dataset(args, seed: int):
    if args.dataset:
        return dataio.read_dataset(args.dataset), f"file:{args.dataset}"
    spec = _spec_from_args(args, seed)
    return generate(spec), f"synthetic:{spec.kind.value}"


def _make_tracker(args, dataset, seed: int):
    if args.tracker == "oracle":
        return OracleTracker(dataset, _oracle_from_args(args, seed)), None
    if args.tracker.startswith("external:"):
        command = args.tracker[len("external:") :]
        session = session_open(
            command, dataset.point_ids, (dataset.width, dataset.height)
        )
        # No explicit --cost-ms: fall back to the adapter's costHint.
        return ExternalTracker(session, cost_ms=args.cost_ms), session
    raise InvalidParameterError(f"--tracker must be 'oracle' or 'external:CMD', got {args.tracker!r}")


# --- subcommands -------------------------------------------------------------


def cmd_generate(args) -> int:
    seed = _resolve_seed(args)
    spec = _spec_from_args(args, seed)
    dataset = generate(spec)
    dataset.provenance["config"] = _config_echo(args, seed)
    dataio.write_dataset(dataset, args.out)
    print(f"wrote {dataset.num_points} points x {dataset.frames} frames to {args.out}")
    return 0


def _report_to_json(report, label: str, n: int, args, seed: int, incomplete: bool) -> dict:
    return {
        "config": _config_echo(args, seed),
        "dataset": label,
        "n": n,
        "incomplete": incomplete,
        "metrics": {
            "epe": report.epe,
            "pck": {format(t, "g"): v for t, v in sorted(report.pck.items())},
            "aj": report.average_jaccard,
            "fps_sim": report.fps_sim,
            "fps_wall": report.fps_wall,
            "tracker_calls": report.tracker_calls,
            "failed_calls": report.failed_calls,
            "sim_cost_ms": report.sim_cost_ms,
            "wall_ms": report.wall_ms,
            "frames": report.frames,
            "points": report.points,
            "latency_frames": report.latency_frames,
        },
    }


def cmd_run(args) -> int:
    seed = _resolve_seed(args)
    dataset, label = _load_dataset(args, seed)
    params = _params_from_args(args)
    kind = PredictorKind(args.predictor)
    eff_n = max(1, args.n)
    config = ScheduleConfig(dataset.frames, eff_n, min(args.warmup, dataset.frames))

    tracker, session = _make_tracker(args, dataset, seed)
    try:
        result = run_session(tracker, dataset, config, kind, params)
    finally:
        if session is not None:
            session.close()
    report = evaluate_session(result, dataset)

    if args.format == "csv":
        cell = SweepCell(
            dataset_label=label,
            tracker=tracker.name,
            predictor=kind.value,
            n=args.n,
            grid=dataset.num_points,
            seed=seed,
            warmup=config.warmup_frames,
            params=params,
            oracle=_oracle_from_args(args, seed),
            report=report,
            error="incomplete" if result.incomplete else "",
        )
        text = dataio.format_results([dataio.cell_to_row(cell)], _config_echo(args, seed))
    else:
        doc = _report_to_json(report, label, args.n, args, seed, result.incomplete)
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"

    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if result.incomplete:
        raise TransportError(f"session aborted at frame {result.completed_frames}")
    return 0


def cmd_sweep(args) -> int:
    seed = _resolve_seed(args)
    if args.dataset and args.grids:
        raise InvalidParameterError("--grids conflicts with --dataset (point count is fixed)")
    params = _params_from_args(args)
    kinds = [PredictorKind(name) for name in args.predictors]
    seeds = [seed + i for i in range(args.seeds)]
    config_echo = _config_echo(args, seed)

    # Rows stream to disk as cells finish; a crash leaves a readable
    # prefix (dataio drops a truncated final row on read).
    out_path = Path(args.out)
    if out_path.exists():
        out_path.unlink()
    count = 0

    def emit(cell: SweepCell) -> None:
        nonlocal count
        dataio.append_result(dataio.cell_to_row(cell), out_path, config_echo)
        count += 1

    if args.dataset:
        dataset = dataio.read_dataset(args.dataset)
        for s in seeds:
            base = OracleTracker(dataset, _oracle_from_args(args, s))
            T = dataset.frames
            baseline_cfg = ScheduleConfig(T, 1, min(args.warmup, T))
            baseline = evaluate_session(
                run_session(base, dataset, baseline_cfg, kinds[0], params), dataset
            )
            for n in args.ns:
                cfg = ScheduleConfig(T, max(1, n), min(args.warmup, T))
                for kind in kinds:
                    cell = SweepCell(
                        dataset_label=f"file:{args.dataset}",
                        tracker=base.name,
                        predictor=kind.value,
                        n=n,
                        grid=dataset.num_points,
                        seed=s,
                        warmup=args.warmup,
                        params=params,
                        oracle=_oracle_from_args(args, s),
                        report=None,
                    )
                    try:
                        report = evaluate_session(
                            run_session(base, dataset, cfg, kind, params), dataset
                        )
                        from .metrics import retention_and_speedup

                        report.retention, report.speedup = retention_and_speedup(
                            report, baseline
                        )
                        cell.report = report
                    except KTrackError as exc:
                        cell.error = f"{type(exc).__name__}: {exc}"
                    emit(cell)
    else:
        base_spec = _spec_from_args(args, seed)
        run_sweep(
            base_spec,
            _oracle_from_args(args, seed),
            args.ns,
            kinds,
            args.grids or [args.grid],
            args.warmup,
            params,
            seeds=seeds,
            on_cell=emit,
        )

    print(f"wrote {count} rows to {args.out}")
    return 0


def cmd_ablate(args) -> int:
    seed = _resolve_seed(args)
    dataset, label = _load_dataset(args, seed)
    params = _params_from_args(args)
    oracle_cfg = _oracle_from_args(args, seed)
    tracker = OracleTracker(dataset, oracle_cfg)
    T = dataset.frames
    eff_n = max(1, args.n)

    baseline_cfg = ScheduleConfig(T, 1, min(args.warmup, T))
    baseline = evaluate_session(
        run_session(tracker, dataset, baseline_cfg, PredictorKind.FULL_KALMAN, params),
        dataset,
    )

    from .metrics import retention_and_speedup

    def scored_cell(kind: PredictorKind, n: int, warmup: int) -> SweepCell:
        cfg = ScheduleConfig(T, max(1, n), min(warmup, T))
        cell = SweepCell(
            dataset_label=label,
            tracker=tracker.name,
            predictor=kind.value,
            n=n,
            grid=dataset.num_points,
            seed=seed,
            warmup=warmup,
            params=params,
            oracle=oracle_cfg,
            report=None,
        )
        try:
            report = evaluate_session(run_session(tracker, dataset, cfg, kind, params), dataset)
            report.retention, report.speedup = retention_and_speedup(report, baseline)
            cell.report = report
        except KTrackError as exc:
            cell.error = f"{type(exc).__name__}: {exc}"
        return cell

    cells = [scored_cell(kind, args.n, args.warmup) for kind in PredictorKind]
    cells += [
        scored_cell(PredictorKind(args.predictor), args.n, w) for w in WARMUP_ABLATION_COUNTS
    ]
    dataio.write_results(
        [dataio.cell_to_row(c) for c in cells], args.out, _config_echo(args, seed)
    )
    print(f"wrote {len(cells)} rows to {args.out}")
    return 0


def cmd_report(args) -> int:
    rows = dataio.read_results(args.results)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    # Carry the originating run configuration into each chart.
    note = ""
    for line in Path(args.results).read_text().splitlines():
        if line.startswith("# config: "):
            note = line[len("# ") :]
            break
    emitted = []
    for metric in CHART_METRICS:
        out_path = out_dir / f"{metric}_vs_n.svg"
        try:
            dataio.emit_chart(
                rows,
                "n",
                metric,
                "predictor",
                out_path,
                title=f"{metric} vs keyframe interval",
                note=note,
            )
        except NothingToPlotError:
            continue
        emitted.append(out_path.name)
    if not emitted:
        raise NothingToPlotError(f"no plottable metrics in {args.results}")
    print(f"wrote {', '.join(emitted)} to {out_dir}")
    return 0


# --- parser ------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="base seed (env KTRACK_SEED, then 0)")
    p.add_argument("--out", help="output path")


def _add_synth(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=[k.value for k in TrajectoryKind], default="constant-velocity")
    p.add_argument("--frames", type=int, default=100)
    p.add_argument("--grid", type=int, default=20, help="synthetic point count (lattice layout)")
    p.add_argument("--width", type=float, default=640.0)
    p.add_argument("--height", type=float, default=480.0)
    p.add_argument("--speed", type=float, default=2.0)
    p.add_argument("--radius", type=float, default=20.0)
    p.add_argument("--angular-rate", type=float, default=0.1)
    p.add_argument("--amplitude", type=float, default=10.0)
    p.add_argument("--period", type=float, default=40.0)
    p.add_argument("--accel-bound", type=float, default=0.3)
    p.add_argument("--segment-len", type=int, default=30)
    p.add_argument(
        "--occlude",
        type=_occlusion,
        action="append",
        metavar="PID:START:END",
        help="mark ground truth invisible on [START, END)",
    )


def _add_run_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="dataset JSON; omit to use synthetic flags")
    p.add_argument("--n", type=int, default=5, help="keyframe interval; 0 = per-frame baseline")
    p.add_argument("--warmup", type=int, default=3)
    p.add_argument(
        "--predictor", choices=[k.value for k in PredictorKind], default="full-kalman"
    )
    p.add_argument("--sigma-p", type=float, default=0.1)
    p.add_argument("--sigma-m", type=float, default=0.3)
    p.add_argument("--sigma-v", type=float, default=10.0)
    p.add_argument("--oracle-noise", type=float, default=0.0)
    p.add_argument("--oracle-failure", type=float, default=0.0)
    p.add_argument(
        "--cost-ms",
        type=float,
        default=None,
        help="simulated tracker cost per call (oracle default 556; external default: adapter costHint)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ktrack", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset")
    _add_common(g)
    _add_synth(g)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="one tracking session")
    _add_common(r)
    _add_synth(r)
    _add_run_common(r)
    r.add_argument("--tracker", default="oracle", help="'oracle' or 'external:CMD'")
    r.add_argument("--format", choices=["json", "csv"], default="json")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="grid x interval x predictor sweep")
    _add_common(s)
    _add_synth(s)
    _add_run_common(s)
    s.add_argument("--ns", type=_int_list, default=[0, 2, 3, 5, 10, 15], metavar="N,N,...")
    s.add_argument(
        "--predictors",
        type=lambda t: t.split(","),
        default=["full-kalman"],
        metavar="KIND,KIND,...",
    )
    s.add_argument("--grids", type=_int_list, default=None, metavar="G,G,...")
    s.add_argument("--seeds", type=int, default=1, help="number of seeds, starting at --seed")
    s.set_defaults(func=cmd_sweep)

    a = sub.add_parser("ablate", help="predictor variants + warmup counts")
    _add_common(a)
    _add_synth(a)
    _add_run_common(a)
    a.set_defaults(func=cmd_ablate)

    rep = sub.add_parser("report", help="charts from a results table")
    rep.add_argument("--results", required=True)
    rep.add_argument("--out-dir", required=True)
    rep.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand in {"generate", "sweep", "ablate"} and not args.out:
        parser.error(f"{args.subcommand} requires --out")
    try:
        return args.func(args)
    except ParseError as exc:
        return _fail(3, exc)
    except (SessionOpenError, TransportError, TrackerReportedError, ProtocolError) as exc:
        return _fail(4, exc)
    except UndefinedMetricError as exc:
        return _fail(5, exc)
    except NothingToPlotError as exc:
        return _fail(6, exc)
    except (InvalidParameterError, InvalidSpecError) as exc:
        return _fail(7, exc)
    except KTrackError as exc:
        return _fail(1, exc)


def _fail(code: int, exc: Exception) -> int:
    print(f"ktrack: error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
