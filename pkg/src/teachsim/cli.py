"""Command-line entry points: serve, batch, replay-verify, report.

Exit codes: 0 success, 1 invariant or tolerance violation, 2 nothing to
process (no sessions found).
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import sys
from dataclasses import replace
from pathlib import Path

from .analysis import (
    SLOT_LABELS,
    aggregate,
    welch_t_test,
    write_episode_csv,
    write_group_stats_csv,
)
from .errors import LogParseError, TeachSimError, UnsupportedVersionError
from .persistence import (
    ExperimentConfig,
    load_experiment_config,
    load_session,
    replay_verify,
    save_session,
    session_log,
)
from .protocol import PHASE_PLAN
from .server import serve as server_serve
from .teachers import SUBJECT_SEED_STRIDE, run_group

REPLAY_TOLERANCE = 1e-9
# seed spacing between (embodiment, group) blocks; supports 1000 subjects each
GROUP_SEED_STRIDE = SUBJECT_SEED_STRIDE * 1000


def _check_session_invariants(result) -> list[str]:
    """Structural checks every completed session must satisfy."""
    problems = []
    expected = [(name, ep) for name, _, _, count in PHASE_PLAN
                for ep in range(1, count + 1)]
    got = [(r.phase, r.episode_index) for r in result.state.records]
    if got != expected:
        problems.append(f"{result.subject_id}: episode sequence {got}")
    for rec in result.state.records:
        should_show = result.config.group == "Target" and rec.phase == "P3"
        if rec.guidance_shown != should_show:
            problems.append(f"{result.subject_id}: guidance_shown="
                            f"{rec.guidance_shown} in {rec.phase}")
    return problems


def _summaries(results):
    return [[(r.phase, r.episode_index, r.error_e) for r in res.state.records]
            for res in results]


def _errors_for(summaries, label: str) -> list[float]:
    idx = SLOT_LABELS.index(label)
    return [rows[idx][2] for rows in summaries]


def _report_lines(embodiment: str, target_summaries, control_summaries) -> list[str]:
    lines = [f"== {embodiment} ==",
             f"subjects: {len(target_summaries)} target, "
             f"{len(control_summaries)} control"]
    target = aggregate(target_summaries)
    control = aggregate(control_summaries)
    lines.append("episode means (target / control):")
    for i, label in enumerate(SLOT_LABELS):
        lines.append(f"  {label}: {target.per_episode_mean[i]:.4f} / "
                     f"{control.per_episode_mean[i]:.4f}")
    comparisons = {"improvement": ("P1E1", "P3E8"), "retention": ("P1E1", "P4E1"),
                   "generalisation": ("P2E1", "P5E1")}
    for name, (early, late) in comparisons.items():
        _, p, _ = welch_t_test(_errors_for(target_summaries, early),
                               _errors_for(target_summaries, late),
                               one_sided=True)
        lines.append(
            f"target {name}: delta {target.delta_mean[name]:+.4f} "
            f"+- {target.delta_std[name]:.4f} "
            f"({target.percent[name]:.2f}%), one-sided p = {p:.3e}")
    for name, (early, late) in comparisons.items():
        c_early = _errors_for(control_summaries, early)
        c_late = _errors_for(control_summaries, late)
        pooled = ((_var(c_early) + _var(c_late)) / 2.0) ** 0.5
        ratio = abs(control.delta_mean[name]) / pooled if pooled > 0 else 0.0
        lines.append(f"control {name}: delta {control.delta_mean[name]:+.4f}, "
                     f"|delta| / pooled sd = {ratio:.3f}")
    return lines


def _var(values) -> float:
    n = len(values)
    mean = sum(values) / n
    return sum((v - mean) ** 2 for v in values) / (n - 1)


def _cmd_batch(args) -> int:
    cfg = load_experiment_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    out = Path(args.out)
    sessions_dir = out / "sessions"
    sessions_dir.mkdir(parents=True, exist_ok=True)

    all_results = []
    lines = []
    problems = []
    block = 0
    for embodiment in cfg.embodiments:
        by_group = {}
        for group in ("Target", "Control"):
            results = run_group(
                cfg.n_per_group, group, embodiment,
                master_seed=cfg.master_seed + block * GROUP_SEED_STRIDE,
                lam=cfg.lam, kappa_max=cfg.kappa_max, adapt_rate=cfg.adapt_rate,
                gain_range=cfg.gain_range, bias_range=cfg.bias_range,
                noise_sigma_factor=cfg.noise_sigma_factor)
            block += 1
            by_group[group] = results
            all_results.extend((embodiment, res) for res in results)
            for res in results:
                problems.extend(_check_session_invariants(res))
                save_session(
                    session_log(res.state, f"{embodiment}-{res.subject_id}",
                                created_at=0.0),
                    sessions_dir / f"{embodiment.lower()}-{res.subject_id}.json")
            stats = aggregate(_summaries(results))
            write_group_stats_csv(
                out / f"group_stats_{embodiment.lower()}_{group.lower()}.csv",
                stats)
        lines.extend(_report_lines(embodiment, _summaries(by_group["Target"]),
                                   _summaries(by_group["Control"])))

    write_episode_csv(out / "episodes.csv", [res for _, res in all_results])
    report = "\n".join(lines) + "\n"
    (out / "report.txt").write_text(report, encoding="utf-8")
    sys.stdout.write(report)
    if problems:
        for p in problems:
            print(f"INVARIANT VIOLATION: {p}", file=sys.stderr)
        return 1
    return 0


def _cmd_replay_verify(args) -> int:
    try:
        log = load_session(args.file)
    except (LogParseError, UnsupportedVersionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = replay_verify(log)
    for row in report.per_episode:
        print(f"{row['phase']}E{row['episode_index']}: learnt {row['learnt']:.3e} "
              f"error {row['error_e']:.3e} trajectory {row['trajectory']:.3e}")
    print(f"max delta: {report.max_delta:.3e}")
    if report.max_delta > REPLAY_TOLERANCE:
        print(f"TOLERANCE BREACH: {report.max_delta:.3e} > {REPLAY_TOLERANCE:.1e}",
              file=sys.stderr)
        return 1
    return 0


def _read_episode_csv(path: Path):
    """episodes.csv rows -> {(embodiment, group): {subject: [(phase, ep, e)]}}."""
    grouped: dict[tuple[str, str], dict[str, list]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            key = (row["embodiment"], row["group"])
            subject = grouped.setdefault(key, {}).setdefault(row["subject_id"], [])
            subject.append((row["phase"], int(row["episode"]),
                            float(row["error_e"])))
    return grouped


def _cmd_report(args) -> int:
    directory = Path(args.dir)
    csv_path = directory / "episodes.csv"
    grouped = {}
    if csv_path.exists():
        grouped = _read_episode_csv(csv_path)
    else:
        sessions_dir = directory / "sessions" if (directory / "sessions").is_dir() \
            else directory
        for path in sorted(sessions_dir.glob("*.json*")):
            try:
                log = load_session(path)
            except (LogParseError, UnsupportedVersionError):
                continue
            key = (log.config.embodiment, log.config.group)
            grouped.setdefault(key, {})[log.session_id] = [
                (r.phase, r.episode_index, r.error_e) for r in log.episodes]
    if not grouped:
        print("no sessions found", file=sys.stderr)
        return 2

    embodiments = list(dict.fromkeys(emb for emb, _ in grouped))
    for embodiment in embodiments:
        target = grouped.get((embodiment, "Target"), {})
        control = grouped.get((embodiment, "Control"), {})
        if not target or not control:
            summaries = list(target.values()) + list(control.values())
            stats = aggregate(summaries)
            print(f"== {embodiment} == ({len(summaries)} sessions, single group)")
            for i, label in enumerate(SLOT_LABELS):
                print(f"  {label}: {stats.per_episode_mean[i]:.4f}")
            continue
        for line in _report_lines(embodiment, list(target.values()),
                                  list(control.values())):
            print(line)
    return 0


def _cmd_serve(args) -> int:
    host, _, port = args.bind.rpartition(":")
    cfg = load_experiment_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)

    async def _run():
        server, _ = await server_serve(host or "127.0.0.1", int(port),
                                       config=cfg, log_dir=args.log_dir)
        addrs = ", ".join(str(s.getsockname()) for s in server.sockets)
        print(f"listening on {addrs}")
        async with server:
            await server.serve_forever()

    try:
        asyncio.run(_run())
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teachsim",
        description="Robot skill-teaching simulator and experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the interactive session server")
    p_serve.add_argument("--bind", default="127.0.0.1:8765",
                         help="host:port to listen on")
    p_serve.add_argument("--config", default=None, help="experiment config JSON")
    p_serve.add_argument("--log-dir", default="sessions",
                         help="directory for session logs")
    p_serve.add_argument("--seed", type=int, default=None,
                         help="override the experiment master seed")
    p_serve.set_defaults(func=_cmd_serve)

    p_batch = sub.add_parser("batch", help="run synthetic-teacher groups")
    p_batch.add_argument("--config", default=None, help="experiment config JSON")
    p_batch.add_argument("--out", required=True, help="output directory")
    p_batch.add_argument("--seed", type=int, default=None,
                         help="override the experiment master seed")
    p_batch.set_defaults(func=_cmd_batch)

    p_verify = sub.add_parser("replay-verify",
                              help="recompute a session log and diff it")
    p_verify.add_argument("file", help="session log (.json or .json.gz)")
    p_verify.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    p_verify.set_defaults(func=_cmd_replay_verify)

    p_report = sub.add_parser("report", help="summarize a batch output directory")
    p_report.add_argument("dir", help="directory with episodes.csv or sessions/")
    p_report.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    p_report.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TeachSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
