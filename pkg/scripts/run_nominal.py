"""Run the default scenario and print its summary."""

import argparse
import time

from folding_assembly import ScenarioConfig, run_loop
from folding_assembly.harness import summarize, summary_text


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = ScenarioConfig().with_values(**{"sensor.seed": args.seed})
    start = time.perf_counter()
    log = run_loop(cfg)
    elapsed = time.perf_counter() - start
    print(summary_text(summarize(log)), end="")
    print(f"wall clock: {elapsed:.2f} s for {log.records[-1].t:.2f} simulated s")


if __name__ == "__main__":
    main()
