"""Write the synthetic Scenario-3 injection profiles (MW, one data-day at 5-minute samples).

The profiles are the shipped sinusoid-bank exosystem outputs evaluated on the
compressed clock plus an additive harmonic of MISMATCH p.u., so the plant sees
injections that the exosystem does not reproduce exactly.
"""

import argparse
import math
import pathlib
import random

S_BASE = 1000.0
DAY = 86400.0
STEP = 300.0
COMPRESSION = 144.0
MISMATCH = 0.01

LOAD = [
    (0.0375, [(11.88, 0.059, 0.89), (11.19, 0.063, 3.96)]),
    (0.05, [(0.814, 0.032, 1.27), (0.262, 0.121, 3.56)]),
    (0.0375, [(0.968, 0.016, 1.75), (0.211, 0.134, 3.28)]),
    (0.0125, [(1.129, 0.011, 0.65), (0.168, 0.209, 2.42)]),
]
WIND = (0.05, [(0.19, 0.007, 1.22), (0.071, 0.117, 1.26)])


def bank(params, t):
    offset, terms = params
    return offset + sum(a * math.sin(w * t + p) for a, w, p in terms)


def write(path, params, rng):
    amp = MISMATCH
    rate = rng.uniform(0.3, 0.6)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    with open(path, "w") as f:
        f.write("t_s,P_MW\n")
        n = int(DAY / STEP)
        for k in range(n + 1):
            t = k * STEP
            tc = t / COMPRESSION
            p = bank(params, tc) + amp * math.sin(rate * tc + phase)
            f.write(f"{t:.1f},{p * S_BASE:.6f}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", nargs="?", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "scenario3"))
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    for i, load in enumerate(LOAD, start=1):
        write(out / f"area{i}_load.csv", load, rng)
        write(out / f"area{i}_wind.csv", WIND, rng)


if __name__ == "__main__":
    main()
