"""
Compatibility, measure preservation and ergodicity at finite levels
===================================================================

A map is stored as a table over all points mod p^n. Each property is checked
level by level and failures come with a witness.
"""

from padicdyn import (
    Affine,
    InterleavedOdometer,
    Odometer,
    cycle_structure,
    induce,
    is_bijective_at,
    is_ergodic_up_to,
    is_one_lipschitz,
    sample_transitive,
)
from padicdyn.maps import cycle_summary

odo = induce(Odometer(1), p=2, k=1, n=10)
print("odometer compatible:", bool(is_one_lipschitz(odo)), "ergodic up to 10:", bool(is_ergodic_up_to(odo)))

# x -> 3x + 1 is bijective but splits into cycles.
aff = induce(Affine(3, 1), p=2, k=1, n=4)
for m in range(1, 5):
    print(f"3x+1 level {m}: cycles {cycle_summary(cycle_structure(aff, m))}")

# 2x + 1 is not injective mod 2.
print("2x+1 bijective mod 2:", is_bijective_at(induce(Affine(2, 1), 2, 1, 3), 1))

# An ergodic map on Z_2^2: the odometer carried through digit interleaving,
# and a random one drawn from the tree of digit permutations.
print("interleaved odometer ergodic:", bool(is_ergodic_up_to(induce(InterleavedOdometer(), 2, 2, 6))))
F = sample_transitive(p=3, k=2, n=3, seed=11)
print("sampled map ergodic:", bool(is_ergodic_up_to(F)), "cycle at top level:", cycle_structure(F, 3))
