"""Compare the two adversary models behind the numerical 3->1 min-entropy.

``antipodal`` ties preparations into antipodal pairs; ``general`` frees all
eight and lets the guessed setting carry a bias.  The general model guesses
better, certifies less, and so moves the Charlie-side crossover.
"""

import argparse

import numpy as np

from seqrac import randomness


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--starts", type=int, default=4)
    ap.add_argument("--points", type=int, default=61)
    args = ap.parse_args()

    print("T        antipodal  general")
    for t in np.linspace(6.0, randomness.T3_MAX, 7):
        a = randomness.hmin_t3_numeric(t, budget=args.starts)
        g = randomness.hmin_t3_numeric(t, budget=args.starts, model="general")
        print(f"{t:.4f}   {a:.5f}    {g:.5f}")

    for model in randomness.MODELS:
        curve = randomness.T3Entropy(points=args.points, starts=args.starts, model=model)
        cross = randomness.crossover_scan(1001, hmin_t3=curve)
        print(f"{model:10s} bob={cross.bob_threshold}  charlie={cross.charlie_threshold}")


if __name__ == "__main__":
    main()
