"""Command-line harness: run a scenario, write the CSV log and a JSON summary.

Exit codes: 0 Done, 2 Fault, 3 TimedOut, 64 usage or configuration error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .config import ConfigError, ScenarioConfig, dumps_config, load_config
from .controller import Phase
from .kinetostatics import ContactMode
from .simulator import ContactInstabilityError, RunLog, RunStatus, run_loop

EXIT_CODES = {RunStatus.DONE: 0, RunStatus.FAULT: 2, RunStatus.TIMED_OUT: 3}
EXIT_USAGE = 64

CSV_COLUMNS = (
    "t", "p1x", "p1y", "p1z", "theta_true", "theta_est",
    "pcx_true", "pcz_true", "pcx_est", "pcz_est",
    "fn_raw", "fn_filt", "fe", "v1x", "v1z", "w1y", "mode", "phase",
)  # fmt: skip

MODE_NAMES = {ContactMode.SLIDING: "Sliding", ContactMode.FIXED: "Fixed", ContactMode.BROKEN: "Broken"}
PHASE_NAMES = {Phase.SLIDE: "Slide", Phase.ROTATE_ONLY: "RotateOnly", Phase.DONE: "Done"}


class EmptyLogError(ValueError):
    pass


def _num(x: float) -> str:
    return f"{x:.9g}"


def csv_text(log: RunLog) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in log.records:
        row = (
            r.t, *r.p1, r.theta_true, r.theta_est,
            r.pc_true[0], r.pc_true[2], r.pc_est[0], r.pc_est[2],
            r.fn_raw, r.fn_filt, r.fe, r.v1[0], r.v1[2], r.w1[1],
        )  # fmt: skip
        buf.write(",".join(_num(float(x)) for x in row))
        buf.write(f",{MODE_NAMES[r.mode]},{PHASE_NAMES[r.phase]}\n")
    return buf.getvalue()


def _round(x):
    if isinstance(x, float):
        return None if math.isnan(x) else float(_num(x))
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def summarize(log: RunLog, transient: float = 1.0) -> dict:
    """Aggregate metrics of a run.

    The force statistics cover Slide-phase ticks after ``transient`` seconds
    (falling back to all Slide ticks, then to all ticks, when that is empty).
    """
    if not log.records:
        raise EmptyLogError("cannot summarize an empty run log")
    recs = log.records
    t = np.array([r.t for r in recs])
    slide = [r for r in recs if r.phase is Phase.SLIDE]
    window = [r for r in slide if r.t >= t[0] + transient] or slide or recs
    fe = np.array([r.fe for r in window])

    tangent = np.array(log.config.geometry.tangent) if log.config is not None else np.array([1.0, 0.0, 0.0])
    slide_speed = None
    if len(slide) >= 2:
        ds = (slide[-1].pc_true - slide[0].pc_true) @ tangent
        slide_speed = float(ds / (slide[-1].t - slide[0].t))

    est_err = np.array([np.linalg.norm(r.pc_est - r.pc_true) for r in recs])
    th_err = np.array([abs(r.theta_est - r.theta_true) for r in recs])
    th_err = th_err[~np.isnan(th_err)]
    return _round(
        {
            "status": log.status.value,
            "exit_code": EXIT_CODES[log.status],
            "ticks": len(recs),
            "t_end": float(t[-1]),
            "force_error_band": [float(fe.min()), float(fe.max())],
            "mean_force_error": float(fe.mean()),
            "max_abs_force_error": float(np.abs(fe).max()),
            "slide_speed": slide_speed,
            "max_estimator_error": float(est_err.max()),
            "max_theta_error": float(th_err.max()) if th_err.size else None,
            "broken_ticks": sum(r.mode is ContactMode.BROKEN for r in recs),
            "phase_times": {PHASE_NAMES[Phase[k]]: v for k, v in log.phase_times.items()},
        }
    )


def summary_text(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


def run_scenario(config: ScenarioConfig, output_path, summary_only: bool = False) -> int:
    """Run ``config`` and write ``run.csv``, ``summary.json`` and ``config.toml`` into ``output_path``."""
    out = Path(output_path)
    log = run_loop(config)
    files = {"summary.json": summary_text(summarize(log)) if log.records else summary_text({"status": log.status.value, "ticks": 0})}
    if not summary_only:
        files["run.csv"] = csv_text(log)
        files["config.toml"] = dumps_config(config)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write output to {exc.filename or out}: {exc.strerror}") from None
    return EXIT_CODES[log.status]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="folding-sim", description="Simulate a master-slave folding assembly run.")
    p.add_argument("--config", required=True, metavar="PATH", help="scenario file (flat dotted TOML keys)")
    p.add_argument("--out", default="out", metavar="DIR", help="output directory (default: ./out)")
    p.add_argument("--seed", type=int, help="override sensor.seed")
    p.add_argument("--duration", type=float, metavar="S", help="override run.duration")
    p.add_argument("--no-noise", action="store_true", help="force sensor noise to zero")
    p.add_argument("--summary-only", action="store_true", help="write only summary.json")
    return p


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        over = {}
        if args.seed is not None:
            over["sensor.seed"] = args.seed
        if args.duration is not None:
            over["run.duration"] = args.duration
        if args.no_noise:
            over["sensor.sigma_f"] = 0.0
            over["sensor.sigma_tau"] = 0.0
        cfg = cfg.with_values(**over)
    except ConfigError as exc:
        print(f"folding-sim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        code = run_scenario(cfg, args.out, summary_only=args.summary_only)
    except ContactInstabilityError as exc:
        print(f"folding-sim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"folding-sim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    summary = json.loads((Path(args.out) / "summary.json").read_text())
    print(f"{summary['status']}: {summary['ticks']} control ticks -> {args.out}")
    return code


if __name__ == "__main__":
    sys.exit(main())
