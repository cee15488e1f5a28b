#!/usr/bin/env python3
"""Turn a verified certificate into explicit objective-gap bounds.

The guarantee is two-phase: geometric contraction until the gap reaches
L D^2 Delta (s_bar pattern applications), then a 1/T tail with the improved
coefficient avg(h) - eps. Growth assumptions sharpen the tail further.
"""
from fractions import Fraction

from lscert.bundled import bundled_certificate
from lscert.rates import GrowthSpec, ProblemScale, bound_at, holder_bound, rate_guarantee

cert = bundled_certificate("t7")
t = cert.pattern.t
scale = ProblemScale(L=Fraction(1), D=Fraction(1), f0gap=Fraction(1))
g = rate_guarantee(scale, cert.pattern.sum_h, t, cert.epsilon, cert.Delta)

print(f"pattern h = ({cert.pattern.as_text()}), Delta = {float(g.Delta):g}")
print(f"contraction factor per application: {float(g.contraction_factor):.9f}")
print(f"s_bar = {g.s_bar} applications -> crossover at T = {g.s_bar * t} steps\n")

print(f"{'T':>9}  {'phase':<12} {'gap bound':>12}")
for s in (1, 1000, g.s_bar, g.s_bar + 1, g.s_bar + 1000, g.s_bar + 10 ** 5):
    T = s * t
    phase = "contraction" if s <= g.s_bar else "sublinear"
    print(f"{T:>9}  {phase:<12} {float(bound_at(T, scale, g)):>12.4e}")

print("\nwith growth bounds (gap >= (mu/q) * distance^q):")
T = (g.s_bar + 100) * t
for q, mu in ((Fraction(2), Fraction(1, 100)), (Fraction(4), Fraction(1))):
    v = holder_bound(T, scale, g, GrowthSpec(q, mu))
    print(f"  q={float(q):g}, mu={float(mu):g}: gap bound {v:.4e} at T={T}")
