"""
Conjugating an ergodic map on Z_p^2 to a map on Z_p
===================================================

Build G = H T F H^-1 level by level, recover F, and look at what holds and
what does not for a randomly sampled ergodic F.
"""

from padicdyn import (
    InterleavedOdometer,
    conjugate_backward,
    conjugate_forward,
    induce,
    sample_transitive,
    verify_scalar_T_convention,
)
from padicdyn.maps import Odometer

# For the interleaved odometer, P is the identity and G is the plain odometer.
F = induce(InterleavedOdometer(), p=2, k=2, n=5)
b = conjugate_forward(F)
print("P =", b.P.images, "| G_5 is x+1:", b.G[5] == induce(Odometer(1), 2, 1, 10))

# A random ergodic F.
F = sample_transitive(p=2, k=2, n=5, seed=3)
b = conjugate_forward(F)
print("P =", b.P.images)
for name, s in b.checks.summary().items():
    print(f"  {name}: {s}")

# The recovered F is exact at every level.
print("round trip:", all(conjugate_backward(b, n) == F.reduced(n) for n in range(1, 6)))

# G agrees with a compatible map at levels 2, 4, 6, ... but the table itself
# need not be compatible at odd scalar levels; the witness shows where.
fail = b.checks.first_failure("scalar_lipschitz")
if fail is not None:
    x, y = fail.witness
    M = 2**fail.level
    G = b.G[fail.level // 2 + 1].table
    print(f"x={x}, y={y} agree mod {M}; G(x) mod {M} = {G[x] % M}, G(y) mod {M} = {G[y] % M}")

# Rebuilding T from G's own orbit blocks on Z_p.
for n in range(1, 4):
    print(f"level {n}:", verify_scalar_T_convention(b, n).to_dict())
