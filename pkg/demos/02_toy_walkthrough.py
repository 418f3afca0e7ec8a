"""Every moving part of the vault on an 8-bit toy you can check by hand.

Universe: the primes (3, 5, 7, 11, 13, 17, 19, 23), one per coordinate.
Modulus: q = 1019 = 2*509 + 1, a safe prime.
Center:  10110010  ->  coordinates 0, 2, 3, 6 are set.
"""

from visualvault import SystemParams, Template
from visualvault.numtheory import (
    PrimeSample,
    euclid_candidates,
    rational_reconstruct,
    subset_product,
)
from visualvault.vault import Encoding, decode, make_lock, open_lock

import random

primes = (3, 5, 7, 11, 13, 17, 19, 23)
sample = PrimeSample(primes=primes, universe_size=8)
q = 1019
center = Template.from_bitstring("10110010")

print("=== encoding ===")
C = subset_product(sample, center.bits, q)
print(f"set coordinates -> primes 3, 7, 11, 19; product = {3 * 7 * 11 * 19}")
print(f"C = 3*7*11*19 mod {q} = {C}\n")

print("=== decoding a probe at distance 1 ===")
probe = Template.from_bitstring("10100010")  # coordinate 3 lowered
px = subset_product(sample, probe.bits, q)
D = C * pow(px, -1, q) % q
print(f"probe product = {px}, D = C/probe = {D}  (that is p_3 = 11: raise coordinate 3)")

print("extended-Euclid candidates for (q, D):")
for cand in euclid_candidates(q, D):
    print(f"  step {cand.step_index}: a = {cand.a:4d}, b = {cand.b:4d}, sign {cand.sign:+d}")
ones, zeros = rational_reconstruct(D, q, sample, probe.bits, max_flips=2)
print(f"reconstruction: raise {ones}, lower {zeros}")
recovered = decode(Encoding(sample=sample, q=q, C=C), probe, r=2)
print(f"decode -> {recovered.to_bitstring()} == center? {recovered == center}\n")

print("=== the lock on top ===")
lock, payload = make_lock(center, random.Random(7))
print(f"published: a = {lock.a}, u = {lock.u} (k = {lock.k} bits)")
print(f"payload from enrolled center: {open_lock(lock, center)} (hidden b = {payload})")
wrong = center.with_flips([], [0])
print(f"payload from a 1-bit-off candidate: {open_lock(lock, wrong)}\n")

print("=== exhaustive sweep: which probes decode? ===")
accepted = []
for value in range(256):
    p = Template.from_bitstring(format(value, "08b"))
    c_prime = decode(Encoding(sample=sample, q=q, C=C), p, r=2)
    if c_prime is not None and open_lock(lock, c_prime) is not None:
        accepted.append(p.to_bitstring())
print(f"{len(accepted)} probes release the payload (center + its 8 neighbors):")
print("  " + " ".join(accepted))
