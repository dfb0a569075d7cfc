"""Run the three shipped scenarios over many seeds and summarise the outcome.

Prints, per scenario, how often the expected coarse pattern appears and the
worst fine-sensed edge error against the users' true spectral support.
"""
import argparse
import dataclasses
from pathlib import Path

from holescan.sensing import SensingScenario, default_engine, run_scenario

SCENARIOS = Path(__file__).parents[1] / "scenarios"
EXPECTED = {
    "case1.json": [True, False, False],
    "case2.json": [True, False, True],
    "case3.json": [False, False, True, True, False, False],
}


def edge_errors(report, scenario):
    errs = []
    for u in scenario.users:
        lo, hi = u.support_mhz()
        best = min((max(abs(h.occupied_range[0] - lo), abs(h.occupied_range[1] - hi))
                    for h in report.fine if h.occupied_range), default=float("inf"))
        errs.append(best)
    return errs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()
    engine = default_engine()
    print("scenario,pattern_hits,seeds,worst_edge_err_mhz,resolution_mhz")
    for name, expected in EXPECTED.items():
        base = SensingScenario.from_json(SCENARIOS / name)
        hits, worst, res = 0, 0.0, None
        for seed in range(args.seeds):
            sc = dataclasses.replace(base, seed=seed)
            rep = run_scenario(sc, engine)
            hits += rep.pattern == expected
            worst = max([worst] + edge_errors(rep, sc))
            res = rep.metadata["resolution_mhz"]
        print(f"{name},{hits},{args.seeds},{worst:.4f},{res:.4f}")


if __name__ == "__main__":
    main()
