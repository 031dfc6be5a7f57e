"""How far above the unsharp-family curve can other strategies go?

The closed-form curve is tight for Lueders instruments along the cube axes,
but it is not a bound on every qubit strategy.  This script prints three
kinds of evidence side by side:

* a commuting (classical) qubit strategy at (0.75, 0.75);
* the relaxed general-mode optimum at a few targets;
* the largest excess seen among random strategies.
"""

import argparse

import numpy as np

from seqrac import optimizer, scenario, witnesses
from seqrac.scenario import BinaryInstrument, Strategy, X_BITS


def classical_qubit_strategy() -> Strategy:
    z = np.array([0.0, 0.0, 1.0])
    majority = np.where(X_BITS.sum(axis=1) >= 2, -1.0, 1.0)
    return Strategy(
        scenario.preparations_from_bloch(majority[:, None] * z),
        tuple(BinaryInstrument.from_effect(0.0, z) for _ in range(3)),
        scenario.measurements_from_params([(0.0, z)] * 3),
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--budget", type=int, default=20_000)
    ap.add_argument("--samples", type=int, default=2_000)
    args = ap.parse_args()

    a_ab, a_ac = witnesses.witness_pair(classical_qubit_strategy())
    print(f"commuting strategy   A_AB={a_ab:.6f}  A_AC={a_ac:.6f}  curve={witnesses.tradeoff_bound(a_ab):.6f}")

    print("\ntarget   curve     relaxed   excess")
    for target in (0.6, 0.7, 0.75, 0.77, 0.78):
        res = optimizer.maximize_ac(target, budget=args.budget, mode="general", seed=0)
        print(f"{target:.3f}   {res.bound:.6f}  {res.best_ac:.6f}  {-res.gap:+.6f}")

    worst = -np.inf
    for seed in range(args.samples):
        for mode in ("general", "pure-prep"):
            ab, ac = witnesses.witness_pair(scenario.random_strategy(seed, mode))
            worst = max(worst, ac - witnesses.tradeoff_bound(np.clip(ab, 0.5, scenario.AB_MAX)))
    print(f"\nlargest excess over {2 * args.samples} random strategies: {worst:+.4f}")


if __name__ == "__main__":
    main()
