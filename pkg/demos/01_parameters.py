"""How the system parameters are chosen, and what each bound means.

The matcher accepts a probe template iff it lies within Hamming distance
r of the enrolled one.  Choosing r is a three-way tension:

  * small r  -> tiny ball -> hard to hit by luck (security up)
  * small r  -> honest re-photographs get rejected (convenience down)
  * large r  -> the published encoding starts leaking its center

This script walks the default deployment point n=512, r=140.
"""

import random

from visualvault import (
    SystemParams,
    default_params,
    derive_q_bits,
    lambda_exact,
    r1_bound,
    r2_bound,
    validate,
)
from visualvault.numtheory import generate_safe_prime

print("=== radius bounds at n=512 ===")
print(f"center-hiding lower bound r2(512)        = {r2_bound(512):.2f}")
print(f"brute-force cap r1(512, 87) in base ten  = {r1_bound(512, 87, 'ten'):.2f}")
print(f"brute-force cap r1(512, 87) natural log  = {r1_bound(512, 87, 'natural'):.2f}")
print("r = 140 sits above the hiding bound; the base-ten cap reproduces it.\n")

print("=== exact ball security ===")
for r in (100, 120, 140, 160):
    print(f"lambda_exact(512, {r:3d}) = {lambda_exact(512, r):7.2f} bits")
print("The exact tail of the (512, 140) ball is ~2^-82.65: a uniformly")
print("random probe hits the ball about once in 10^24 attempts.\n")

print("=== modulus sizing ===")
defaults = SystemParams()
print(f"worst-case flip product bound: {defaults.worst_case_bound.bit_length()} bits")
print(f"requested safe prime width:    {derive_q_bits(defaults)} bits")

print("\n=== generating a small demonstration modulus ===")
q = generate_safe_prime(96, random.Random(1))
print(f"96-bit safe prime: {q} (q mod 4 = {q % 4})\n")

print("=== validating the packaged deployment parameters ===")
print(validate(default_params()).render())
print()
print("The lambda_exact line fails against the 87-bit default target:")
print("the exact tail gives 82.65 bits.  Lower the target (e.g. 80) or")
print("shrink r to 130 (86.6 bits) if the letter of the target matters.")
