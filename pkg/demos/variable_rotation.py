"""
Rotation that depends on r
==========================

With theta -> theta + g(lam, r) the circles still swap, and two steps rotate
each circle by g(r1) + g(r2).
"""

# %%
from doublecircle.circle import GOLDEN, circle_dist
from doublecircle.map1d import find_two_cycle, logistic_family
from doublecircle.skew import SkewState, SkewSystem, VariableRotation, double_step_rotation, step
from doublecircle.verify import verify_system

fam = logistic_family()
lam = 3.2
cyc = find_two_cycle(fam, lam)

g = lambda lam, r: GOLDEN * (1 + r)
sys_ = SkewSystem(fam, VariableRotation(g, label="golden*(1+r)"), lam)
beta = double_step_rotation(sys_, cyc)
print("double-step rotation", beta)
print("closed form         ", (GOLDEN * (2 + (lam + 1) / lam)) % 1)

# %%
s = SkewState.at(cyc.r1, 0.0)
s2 = step(sys_, step(sys_, s))
print("measured            ", s2.theta.rep, circle_dist(s2.theta, beta))

# %%
print(verify_system(sys_, cyc).passed)

# %%
# A constant g with g(r1) + g(r2) rational gives a finite orbit: exit 3
#   doublecircle theorem2 --lambda 3.2 --g const:0.5
