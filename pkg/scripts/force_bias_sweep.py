"""Sweep the force setpoint with a tilted configured normal and report the |r2| bias."""

import argparse

import numpy as np

from folding_assembly import ScenarioConfig, run_loop
from folding_assembly.controller import Phase


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tilt", type=float, default=5.0, help="normal tilt in degrees")
    ap.add_argument("--window", type=int, default=5, help="filter window")
    ap.add_argument("--forces", type=float, nargs="+", default=[2.0, 5.0, 10.0])
    args = ap.parse_args()
    print("f_d [N]  mean bias [mm]  mean relative bias")
    for f_d in args.forces:
        cfg = ScenarioConfig().with_values(
            **{
                "gains.f_d": f_d,
                "controller.normal_tilt_deg": args.tilt,
                "sensor.sigma_f": 0.0,
                "sensor.sigma_tau": 0.0,
                "sensor.filter_window": args.window,
            }
        )
        log = run_loop(cfg)
        m = (log.column("phase") == Phase.SLIDE) & (log.column("t") >= 1.0)
        est, true = log.column("r2_est")[m], log.column("r2_true")[m]
        print(f"{f_d:7.2f}  {np.mean(est - true) * 1e3:14.6f}  {np.mean((est - true) / true):18.12f}")


if __name__ == "__main__":
    main()
