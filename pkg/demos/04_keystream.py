"""
Keystreams and full-period uniformity
=====================================

Iterating a transitive map from any seed visits every residue class equally
often over one period.
"""

from padicdyn import KeystreamConfig, keystream, sample_transitive, uniformity_report
from padicdyn.maps import Table
from padicdyn.prng import pack_bits

F = sample_transitive(p=2, k=1, n=12, seed=2024)
cfg = KeystreamConfig(Table(F), p=2, k=1, n=12, seed_state=0, count=64)
bits = keystream(cfg)
print("first 64 low bits:", "".join(map(str, bits)))
print("packed:", pack_bits(bits).hex())

# Mod 2 a transitive map is the swap, so the lowest digit alternates. The
# full state carries the rest of the orbit.
cfg = KeystreamConfig(Table(F), p=2, k=1, n=12, seed_state=0, count=16, extractor="full-state")
print("states mod 16:", (keystream(cfg) % 16).tolist())

report = uniformity_report(F)
for lv in report.to_dict()["levels"][:4]:
    print(lv)
print("max deviation over all levels:", report.max_deviation)
