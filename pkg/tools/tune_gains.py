#!/usr/bin/env python3
"""Coarse grid search over the baseline PID gains.

Evaluates candidate gain sets on a small seeded campaign and prints a
table sorted by mean miss distance.  The winning set is what ships in
scenarios/default.yaml.

Usage:
    python tools/tune_gains.py [--stage long|lat|joint] [--n 32]
"""

import argparse
import itertools
import math
import sys
from dataclasses import replace

from glidersim.baseline import PidConfig
from glidersim.config import load_scenario
from glidersim.evaluation import run_campaign


def evaluate(cfg, gains, n, base_seed):
    scenario = replace(cfg)
    scenario.controllers = {"pid": gains}
    try:
        stats, outcomes = run_campaign("pid", scenario, n, base_seed)
    except Exception as exc:
        return None, str(exc)
    impacts = stats.causes.get("impact", 0)
    return stats, f"impacts {impacts}/{n}"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scenario", default="scenarios/default.yaml")
    ap.add_argument("--stage", default="long",
                    choices=["long", "lat", "joint"])
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--seed", type=int, default=5000)
    args = ap.parse_args()

    cfg = load_scenario(args.scenario)
    base = cfg.controllers["pid"]

    candidates = []
    if args.stage == "long":
        for kp, ki, kd, vb in itertools.product(
                [1.5, 2.0, 2.5, 3.0], [0.5, 1.0, 1.5],
                [0.6, 1.0, 1.4], [-0.10, -0.13, -0.15, -0.18]):
            g = dict(base)
            g["longitudinal"] = PidConfig(kp=kp, ki=ki, kd=kd,
                                          output_limit=1.0,
                                          integrator_limit=0.5)
            g["v_bias"] = vb
            candidates.append(((kp, ki, kd, vb), g))
    elif args.stage == "lat":
        for kp_h, kd_h, kp_r, kd_r in itertools.product(
                [2.2, 2.8, 3.4, 4.0], [0.1, 0.3, 0.5],
                [3.0, 4.5, 6.0], [0.1, 0.2]):
            g = dict(base)
            g["heading"] = PidConfig(kp=kp_h, ki=0.05, kd=kd_h,
                                     output_limit=math.radians(45.0),
                                     integrator_limit=0.3)
            g["roll"] = PidConfig(kp=kp_r, ki=0.2, kd=kd_r,
                                  output_limit=1.0, integrator_limit=0.3)
            candidates.append(((kp_h, kd_h, kp_r, kd_r), g))
    else:
        candidates.append((("shipped",), dict(base)))

    rows = []
    for label, gains in candidates:
        stats, note = evaluate(cfg, gains, args.n, args.seed)
        if stats is None:
            print(f"{label}: FAILED {note}", file=sys.stderr)
            continue
        rows.append((stats.mmd, label, stats.cep50, stats.mean_impact, note))
        print(f"{label}: mmd={stats.mmd:7.3f} cep50={stats.cep50:7.3f} "
              f"mean=({stats.mean_impact[0]:+6.2f},{stats.mean_impact[1]:+6.2f}) {note}")

    rows.sort()
    print("\nbest:")
    for mmd, label, cep, mean, note in rows[:10]:
        print(f"  {label}: mmd={mmd:.3f} cep50={cep:.3f} "
              f"mean=({mean[0]:+.2f},{mean[1]:+.2f}) {note}")


if __name__ == "__main__":
    main()
