#!/usr/bin/env python3
"""Desk-scale trajectory comparison on a random least-squares instance.

Longer certified patterns reach lower gaps in the same number of steps, in
proportion to avg(h); the long-step patterns are visibly non-monotone inside
each cycle while converging overall. Trajectories land in ./trajectories/.
"""
from pathlib import Path

from lscert.bundled import bundled_pattern
from lscert.gd_lab import emit_csv, gen_least_squares, is_monotone_decreasing, run_gd

N, SEED, T = 200, 42, 2000
out_dir = Path("trajectories")
out_dir.mkdir(exist_ok=True)

problem = gen_least_squares(N, SEED, ridge=False)
print(f"least squares, n={N}, seed={SEED}: L = {problem.L:.1f}\n")
print(f"{'pattern':>8} {'avg(h)':>8} {'final gap':>12}   monotone inside a cycle?")

for pid in ("const1", "t2", "t3", "t7", "t15"):
    pattern = bundled_pattern(pid)
    record = run_gd(problem, pattern, T, pattern_id=pid)
    emit_csv(record, out_dir / f"{pid}.csv")
    t = pattern.t
    mono = all(is_monotone_decreasing(record.gaps[s * t:(s + 1) * t + 1])
               for s in range(T // t))
    print(f"{pid:>8} {float(pattern.avg_h):>8.4f} {record.gaps[-1]:>12.4e}   "
          f"{'yes' if mono else 'no (long steps overshoot)'}")

print(f"\nwrote per-iteration gaps to {out_dir}/")
