"""Why truncate: exact Vendi keeps growing with n, truncated Vendi settles.

A 512-mode mixture under a Gaussian kernel whose bandwidth is half the
inter-mode distance. With small within-mode noise, each new sample adds a
sliver of eigenvalue mass, so the exact order-1 score drifts upward for
as long as n grows. The t-truncated score and RKE depend on the head of
the spectrum only and stop moving. Takes about a minute (exact at n=8000
dominates); pass a smaller grid to go faster.
"""
import math
import sys

from truncvendi import KernelSpec
from truncvendi.harness import SweepConfig, convergence_sweep, relative_change, synth_mixture

grid = tuple(int(v) for v in sys.argv[1:]) or (500, 1000, 2000, 4000, 8000)
dist = synth_mixture(512, 64, spread=1.0, within_std=0.045, seed=3)
kernel = KernelSpec.gaussian(math.sqrt(2) / 2)
cfg = SweepConfig(kernel, dist, n_grid=grid, methods=("exact", "truncated", "rke"), alpha=(1.0,), t=64, seed=11)
rows = convergence_sweep(cfg)

print(f"{'n':>6} " + " ".join(f"{m:>10}" for m in ("exact", "truncated", "rke")))
for n in grid:
    cells = {r["method"]: r["score"] for r in rows if r["n"] == n}
    print(f"{n:6d} " + " ".join(f"{cells[m]:10.3f}" for m in ("exact", "truncated", "rke")))

a, b = grid[-2], grid[-1]
print(f"\nrelative change {a} -> {b}:")
for method, alpha in (("exact", 1.0), ("truncated", 1.0), ("rke", 2.0)):
    print(f"  {method:<10} {relative_change(rows, method, alpha, a, b):+.2%}")
