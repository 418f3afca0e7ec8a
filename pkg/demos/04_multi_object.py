"""Binding one seed to several objects: all of them must match to unlock.

Each object gets its own encoding and lock; the per-object payloads are
XORed into the single key that masks the seed, so any failed member
poisons the key beyond recovery.
"""

import random
from pathlib import Path

from visualvault import default_params, enroll_multi, retrieve_multi
from visualvault.pipeline import binarize, generate_matrix, read_embeddings_csv

FIXTURE = Path(__file__).parent.parent / "tests" / "fixtures" / "micro_embeddings.csv.gz"

params = default_params()
matrix = generate_matrix(seed=42)
embeddings = {(e.object_id, e.view_id): e for e in read_embeddings_csv(FIXTURE)}

objects = ["obj01", "obj02", "obj03"]
enrolled = [binarize(embeddings[(obj, "view0")], matrix) for obj in objects]
seed = bytes.fromhex("00112233445566778899aabbccddeeff")

vault = enroll_multi(enrolled, seed, params, random.Random(5))
print(f"enrolled {vault.m} objects; one wrapped seed of {len(vault.wrapped_seed)} bytes\n")

fresh = [binarize(embeddings[(obj, "view1")], matrix) for obj in objects]
print(f"all three fresh views:        {retrieve_multi(vault, fresh).hex()}")

imposter = list(fresh)
imposter[1] = binarize(embeddings[("obj08", "view1")], matrix)
print(f"middle object swapped out:    {retrieve_multi(vault, imposter)}")

print("\nEvery subset of matching objects except the full set returns None;")
print("an attacker learns nothing about which member failed.")
