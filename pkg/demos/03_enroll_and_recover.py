"""Full-scale enrollment and recovery, the way the CLI wires it together.

Uses the packaged 1824-bit parameters and the checked-in 10-object
embedding fixture, so it runs offline in a few seconds.
"""

import random
import time
from pathlib import Path

from visualvault import default_params, enroll, retrieve_seed
from visualvault.pipeline import binarize, generate_matrix, hamming, read_embeddings_csv

FIXTURE = Path(__file__).parent.parent / "tests" / "fixtures" / "micro_embeddings.csv.gz"

params = default_params()
matrix = generate_matrix(seed=42)
embeddings = {(e.object_id, e.view_id): e for e in read_embeddings_csv(FIXTURE)}

print("=== enrollment ===")
enrolled_view = embeddings[("obj04", "view0")]
template = binarize(enrolled_view, matrix)
seed = bytes(random.Random(0).getrandbits(8) for _ in range(32))
t0 = time.perf_counter()
record = enroll(template, seed, params, random.Random(123))
print(f"enrolled obj04/view0 in {(time.perf_counter() - t0) * 1e3:.1f} ms")
print(f"template: {template.to_hex()[:48]}...")
print(f"wallet seed: {seed.hex()}\n")

print("=== recovery with a fresh view of the same object ===")
probe = binarize(embeddings[("obj04", "view2")], matrix)
print(f"distance to enrolled template: {hamming(probe, template)} (radius is {params.r})")
t0 = time.perf_counter()
got = retrieve_seed(record, probe)
print(f"retrieve took {(time.perf_counter() - t0) * 1e3:.1f} ms")
print(f"recovered: {got.hex()}")
print(f"bit-exact: {got == seed}\n")

print("=== recovery attempts with other objects ===")
for obj in ("obj00", "obj07", "obj09"):
    probe = binarize(embeddings[(obj, "view0")], matrix)
    verdict = retrieve_seed(record, probe)
    print(
        f"{obj}/view0: distance {hamming(probe, template):3d} -> "
        f"{'ACCEPTED (!)' if verdict is not None else 'rejected'}"
    )
