"""
Gaps and discrepancy of a circle rotation
=========================================
"""

# %%
import numpy as np

from doublecircle.circle import (
    GOLDEN,
    continued_fraction,
    convergents,
    gap_statistics,
    rationality_diagnostic,
    rotation_orbit,
    star_discrepancy,
)

# %%
# Never more than three distinct gap lengths
for n in (5, 13, 50, 89, 1000):
    st = gap_statistics(rotation_orbit(GOLDEN, n))
    print(n, st.distinct_gap_count, st.max_gap, star_discrepancy(rotation_orbit(GOLDEN, n)))

# %%
# The max gap shrinks roughly like 1/n
ns = np.array([100, 400, 1600, 6400])
print(ns * np.array([gap_statistics(rotation_orbit(GOLDEN, n)).max_gap for n in ns]))

# %%
print(continued_fraction(GOLDEN, 12))
print(convergents(GOLDEN, 100))
print(rationality_diagnostic(GOLDEN), rationality_diagnostic(0.25), rationality_diagnostic(55 / 89))
