"""Profile the Gaussian limit of the centered, sqrt(n)-scaled walk.

Emits CSV with the empirical quantiles of the standardized final positions
next to the Gaussian quantiles predicted by the closed-form variance, plus
a summary comment line with the sample variance.

Usage:
    python scripts/clt_profile.py [--n 10000] [--reps 4000] [--p 1/2]
                                  [--mu dirac:1] [--seed 11] [--out clt.csv]
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

import numpy as np
from scipy.special import ndtri

from counterwalk.asymptotics import clt_variance, velocity
from counterwalk.walk_engine import parse_mu_spec, simulate_batch

QUANTILES = [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10_000)
    parser.add_argument("--reps", type=int, default=4_000)
    parser.add_argument("--p", default="1/2")
    parser.add_argument("--mu", default="dirac:1")
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    p = Fraction(args.p)
    law = parse_mu_spec(args.mu)
    if law.m1 is None or law.m2 is None:
        parser.error("the chosen step law needs two finite moments")
    if p == 0:
        parser.error("the diffusive limit needs p > 0")

    target_var = float(clt_variance(p, law.m1, law.m2))
    drift = float(velocity(p, law.m1))
    batch = simulate_batch(args.n, p, law, args.reps, args.seed, census=False)
    y = (batch.s_check - drift * args.n) / math.sqrt(args.n)

    lines = ["quantile,empirical,gaussian"]
    lines.append(
        f"# sample_variance={float(y.var(ddof=1))!r} target_variance={target_var!r} reps={args.reps} n={args.n}"
    )
    sd = math.sqrt(target_var)
    for q in QUANTILES:
        emp = float(np.quantile(y, q))
        lines.append(f"{q},{emp!r},{(sd * float(ndtri(q)))!r}")

    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
