"""
The logistic 2-cycle and its doubling window
=============================================

Find the period-2 orbit of r -> lam r (1 - r), watch its multiplier, and
locate the parameter range where it is born and stays attracting.
"""

# %%
import math

import numpy as np

from doublecircle.map1d import (
    check_doubling_condition,
    doubling_window,
    find_two_cycle,
    logistic_family,
)

fam = logistic_family()

# %%
# One cycle, compared with the quadratic-factor formula
lam = 3.2
cyc = find_two_cycle(fam, lam)
s = math.sqrt((lam - 3) * (lam + 1))
print(cyc.r1, (lam + 1 - s) / (2 * lam))
print(cyc.r2, (lam + 1 + s) / (2 * lam))
print("multiplier", cyc.multiplier, "attracting", cyc.attracting)

# %%
# The multiplier falls from +1 at the birth of the cycle to -1 where it
# loses stability
for lam in np.linspace(3.02, 3.44, 8):
    c = find_two_cycle(fam, lam)
    print(f"{lam:.3f}  {c.multiplier:+.4f}  {-lam**2 + 2*lam + 4:+.4f}")

# %%
win = doubling_window(fam, 2.5, 3.6)
print("window", win.lambda_c, win.lambda_0, 1 + math.sqrt(6))

# %%
# Transversality and nondegeneracy at the birth parameter
print(check_doubling_condition(fam, win.lambda_c))
