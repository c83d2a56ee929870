"""Run the low-force scenario over several seeds and tabulate how each run ends."""

import argparse
from pathlib import Path

from folding_assembly import load_config, run_loop
from folding_assembly.kinetostatics import ContactMode

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "contact_loss.toml"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()
    base = load_config(CONFIG)
    print("seed  status    t_end  first_broken  invalid_at_break")
    for seed in range(args.seeds):
        log = run_loop(base.with_values(**{"sensor.seed": seed}))
        broken = [r for r in log.records if r.mode is ContactMode.BROKEN]
        tb = f"{broken[0].t:12.2f}" if broken else f"{'-':>12}"
        inv = str(not broken[0].valid) if broken else "-"
        print(f"{seed:4d}  {log.status.value:8s} {log.records[-1].t:6.2f}  {tb}  {inv:>16}")


if __name__ == "__main__":
    main()
