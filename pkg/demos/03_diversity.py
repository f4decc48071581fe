"""Does the score track the number of modes?

Synthetic mixtures with k orthogonal modes, k = 2..32. Truncated Vendi and
its Nystrom / FKEA estimates should all rise with k, and the two
estimates should sit close to the truncated value they approximate.
"""
import numpy as np

from truncvendi import KernelSpec
from truncvendi.harness import diversity_sweep

ks = (2, 4, 8, 16, 32)
methods = ("truncated", "nystrom", "fkea")
rows = diversity_sweep(ks, d=64, kernel=KernelSpec.gaussian(0.5), alpha=1.0, t=256, seed=12,
                       n=2000, within_std=0.01, repeats=3, methods=methods)

print(f"{'k':>4} " + " ".join(f"{m:>10}" for m in methods))
for k in ks:
    med = [np.median([r["score"] for r in rows if r["k"] == k and r["method"] == m]) for m in methods]
    print(f"{k:4d} " + " ".join(f"{v:10.3f}" for v in med))
