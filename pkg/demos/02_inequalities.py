"""Sampling the elementary inequality and the growth bounds for g, G and H.

The constructive constant kappa_q holds for q = 3 and q = 4 but not for
q = 2.5: there the sampled margin turns negative once a is large compared
with b.

Run: python demos/02_inequalities.py
"""
from halfspace_nls.nonlinearity import (
    kappa_q,
    standard_contexts,
    verify_elementary_inequality,
    verify_growth_bounds,
)

for q in (2.5, 3.0, 4.0):
    rep = verify_elementary_inequality(q)
    print(f"q = {q:g}: kappa = {kappa_q(q):.4f}, worst scaled margin {rep.worst_margin:+.3e} "
          f"at {rep.worst_location}, pass = {rep.passed}")

# Raw margin at the worst point for q = 2.5, and a second point further out.
q, k = 2.5, kappa_q(2.5)
for a, b in ((10.0, 0.7), (100.0, 1.0)):
    margin = (a + b) ** q - a**q - b**q - q * a ** (q - 1) * b - k * a * b ** (q - 1)
    print(f"  (a, b) = ({a:g}, {b:g}): margin {margin:+.3f}")

print("\ngrowth bounds on the standard contexts:")
for ctx in standard_contexts():
    reports = verify_growth_bounds(ctx)
    worst = min(r.worst_margin for r in reports)
    print(f"  p = {ctx.p:g}, c = {ctx.c:.4f}: all pass = {all(r.passed for r in reports)}, "
          f"worst scaled margin {worst:.2e}")
