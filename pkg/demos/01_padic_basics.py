"""
Truncated p-adic integers and vectors
=====================================

Digits, reduction, the ultrametric distance and the interleaved index that
every map table in the package is keyed by.
"""

from padicdyn import TruncatedPadic, TruncatedVector, add_with_carry, decode, encode, reduce, vec_distance

# A 2-adic integer known to four digits, least significant first.
x = TruncatedPadic.from_int(12, p=2, n=4)
print("12 in base 2:", x.digits, "valuation:", x.valuation())

# Adding with carry drops the final carry, so 15 + 1 wraps to 0.
print("15 + 1 mod 16 =", add_with_carry(TruncatedPadic.from_int(15, 2, 4), 1).value)

# A vector in (Z/2^2)^2. Its index interleaves the component digits.
v = TruncatedVector.from_ints((1, 2), p=2, n=2)
print("digits:", [c.digits for c in v.components], "-> index", encode(v))
print("decode(9) =", decode(9, 2, 2, 2).values)

# Vector reduction is a modulus on the index.
print("reduce to 1 digit:", reduce(v, 1).values, "== decode(9 % 4):", decode(9 % 4, 2, 2, 1).values)

# Distance is the max over components, i.e. the minimal order.
print("distance((4,2),(0,0)):", vec_distance(TruncatedVector.from_ints((4, 2), 2, 3), TruncatedVector.from_ints((0, 0), 2, 3)))
