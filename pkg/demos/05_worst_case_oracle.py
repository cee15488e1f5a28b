#!/usr/bin/env python3
"""The one-dimensional worst case, exactly, and the duality sandwich.

What a certificate promises per cycle is exactly what descent on the hardest
one-dimensional instance delivers: gap' = gap - sum(h) * gap^2. Explicit
subgradient steps reproduce that recurrence with rational equality. From the
other side, the worst-case SDP value stays below the certified parabola.
"""
from fractions import Fraction

from lscert.bundled import bundled_pattern
from lscert.gd_lab import kink_descent_gap, one_d_worstcase
from lscert.sdp_search import evaluate_primal

pattern = bundled_pattern("t7")
delta0 = Fraction(1, 1000)

seq = one_d_worstcase(delta0, pattern, periods=4)
print(f"h = ({pattern.as_text()}), initial gap {delta0}")
d = delta0
for s, expected in enumerate(seq[1:], start=1):
    d = kink_descent_gap(d, pattern)  # explicit steps on f(x) = max(gap*x, 0)
    match = "==" if d == expected else "!="
    print(f"  after {s} cycle(s): simulated {float(d):.9e} {match} "
          f"recurrence {float(expected):.9e}")
    assert d == expected

print("\nworst-case SDP value vs certified parabola (h = (2.9, 1.5)):")
two = bundled_pattern("t2")
for delta in (1e-3, 1e-2):
    pv = evaluate_primal(two, delta)
    parabola = delta - float(two.sum_h) * delta ** 2
    print(f"  gap {delta:g}: SDP worst case {pv.value:.8e} <= "
          f"{parabola:.8e} (Gram matrix rank {pv.numerical_rank})")
    assert pv.value <= parabola + 1e-6
