"""The half-line problem: threshold, classification and the two profiles.

Run: python demos/01_one_dimensional.py
"""
import numpy as np

from halfspace_nls.closed_form import critical_threshold, first_integral_criterion, profiles

p = 3.0
cp = critical_threshold(p)
print(f"threshold for p = {p:g}: c_p = {cp:.15f}")

# The sign of the first integral decides how many positive decaying solutions exist.
for c in (0.5, 1.0, cp, 1.6):
    value, flag = first_integral_criterion(c, p)
    print(f"  c = {c:.6f}  I(c) = {value:+.6f}  -> {flag.name}")

# Below the threshold there are two: the decreasing one u_c and one with an interior bump.
prof = profiles(1.0, p)
s = np.linspace(0.0, 6.0, 7)
print(f"\nshift t = {prof.t_shift:.6f}; sandwich constants m1 = {prof.m1:.4f}, m2 = {prof.m2:.4f}")
print("   s      u_c      u~_c    m1 e^-s <= u_c <= m2 e^-s")
for si, a, b in zip(s, prof.u_c(s), prof.u_c_tilde(s)):
    print(f"{si:5.1f} {a:9.5f} {b:9.5f}    {prof.m1 * np.exp(-si) <= a <= prof.m2 * np.exp(-si)}")
