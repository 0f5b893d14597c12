"""
Two invariant circles for logistic x golden rotation
=====================================================
"""

# %%
from doublecircle.circle import GOLDEN
from doublecircle.map1d import find_two_cycle, logistic_family
from doublecircle.skew import ConstantRotation, SkewState, SkewSystem, orbit, split_parity
from doublecircle.verify import verify_system

fam = logistic_family()
lam = 3.2
cyc = find_two_cycle(fam, lam)
sys_ = SkewSystem(fam, ConstantRotation(GOLDEN), lam)

# %%
# An orbit started on the r1-circle alternates between the two levels
states = orbit(sys_, SkewState.at(cyc.r1, 0.0), 6)
for s in states:
    print(f"{s.r:.12f}  {s.theta.rep:.6f}")
even, odd = split_parity(states)

# %%
# Full certificate: disjointness, swap, F^2 invariance, density, attraction
rep = verify_system(sys_, cyc)
for name, ok in rep.flags.items():
    print(f"{name:16s} {ok}")
print("density reached at k =", rep.density.gamma1.achieving_k)

# %%
# Same thing from the command line:
#   doublecircle verify --lambda 3.2 --out report.json --csv orbit.csv
