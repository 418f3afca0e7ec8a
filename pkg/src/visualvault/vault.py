"""Seed vault: Hamming-ball encodings, the payload lock, and record handling.

A record publishes three things: a subset-product encoding of the
enrolled template, a hashed lock that releases a payload only on the
exact template, and the wallet seed XOR-masked by a keystream derived
from that payload.  Recovery decodes a nearby probe back to the
enrolled template, opens the lock with it, and unmasks the seed.
Every failure path returns None; callers cannot tell which stage
rejected, by design.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .numtheory import PrimeSample, rational_reconstruct, sample_primes, subset_product
from .params import SystemParams
from .templates import Template

RECORD_FILE_VERSION = 1
HASH_ALG = "SHA-512"
DIGEST_BITS = 512
KDF_ID = "H(b_bytes ‖ 0x77726170 ‖ counter32_be)"
_KDF_LABEL = bytes.fromhex("77726170")  # "wrap"

MIN_SEED_LEN = 16
MAX_SEED_LEN = 64


class MalformedRecordError(ValueError):
    """A vault record or its file form fails structural validation."""


@dataclass(frozen=True)
class Encoding:
    """Published hiding of a template center: primes, modulus, subset product."""

    sample: PrimeSample
    q: int
    C: int


@dataclass(frozen=True)
class PointLock:
    """Published equality lock on the template halves (c1, c2).

    Releases b = (c2 - a·c1) mod 2^k only to a candidate whose halves
    satisfy the enrolled affine relation; everything else fails the hash
    check.  All arithmetic is in the 2^k ring.
    """

    a: int
    u: int
    t: bytes
    h: bytes
    k: int
    h_bits: int = DIGEST_BITS

    def __post_init__(self) -> None:
        if self.h_bits <= self.k:
            raise ValueError("digest width must exceed the half-template width")
        if len(self.h) != self.h_bits // 8:
            raise ValueError("digest length does not match h_bits")


@dataclass(frozen=True)
class VaultRecord:
    """Everything a user stores: encoding + lock + masked seed."""

    n: int
    r: int
    encoding: Encoding
    lock: PointLock
    wrapped_seed: bytes
    params_digest: str

    def __post_init__(self) -> None:
        if not self.wrapped_seed:
            raise MalformedRecordError("wrapped seed must be nonempty")


@dataclass(frozen=True)
class VaultMember:
    """One object's encoding and lock inside a multi-object vault."""

    encoding: Encoding
    lock: PointLock


@dataclass(frozen=True)
class MultiVault:
    """m encodings whose lock payloads XOR into one seed-wrapping key."""

    n: int
    r: int
    members: tuple[VaultMember, ...]
    wrapped_seed: bytes
    params_digest: str

    @property
    def m(self) -> int:
        return len(self.members)


def _half_bytes(k: int) -> int:
    return (k + 7) // 8


def _int_bytes(v: int, k: int) -> bytes:
    return v.to_bytes(_half_bytes(k), "big")


def _lock_digest(w: int, t: bytes, k: int) -> bytes:
    return hashlib.sha512(_int_bytes(w, k) + t).digest()


def _build_lock(
    c: Template, a: int, s: int, t: bytes, h_bits: int = DIGEST_BITS
) -> tuple[PointLock, int]:
    """Deterministic lock construction from explicit randomness."""
    c1, c2 = c.halves()
    k = c.n // 2
    mask = (1 << k) - 1
    b = (c2 - a * c1) & mask
    u = (s + b) & mask
    h = _lock_digest(s, t, k)
    return PointLock(a=a, u=u, t=t, h=h, k=k, h_bits=h_bits), b


def make_lock(
    c: Template, rng: random.Random | None = None, h_bits: int = DIGEST_BITS
) -> tuple[PointLock, int]:
    """Draw a fresh lock over the template halves; returns (lock, payload b).

    The slope a is drawn odd so it is a unit of the 2^k ring: any
    single-coordinate change of either half then shifts the hashed check
    value and the lock rejects.
    """
    if c.n % 2:
        raise ValueError("lock requires an even-length template")
    k = c.n // 2
    if rng is None:
        rng = random.SystemRandom()
    a = rng.getrandbits(k) | 1
    s = rng.getrandbits(k)
    t = rng.randbytes(_half_bytes(h_bits - k))
    return _build_lock(c, a, s, t, h_bits)


def open_lock(lock: PointLock, candidate: Template) -> int | None:
    """Release the payload iff the candidate matches the enrolled template.

    Computes w = (a·c1' + u - c2') mod 2^k, which equals the enrolled s
    exactly when the candidate halves satisfy the locked relation, and
    compares its salted hash.  Returns b or None.
    """
    if candidate.n != 2 * lock.k:
        raise ValueError("candidate length does not match lock width")
    c1, c2 = candidate.halves()
    mask = (1 << lock.k) - 1
    w = (lock.a * c1 + lock.u - c2) & mask
    if _lock_digest(w, lock.t, lock.k) != lock.h:
        return None
    return (c2 - lock.a * c1) & mask


def encode(c: Template, params: SystemParams, rng: random.Random | None = None) -> Encoding:
    """Hide the template under a fresh prime sample: C = prod(p_i^c_i) mod q."""
    params.check_structure()
    if c.n != params.n:
        raise ValueError(f"template length {c.n} does not match n = {params.n}")
    sample = sample_primes(params.n, params.universe_size, rng)
    assert params.q is not None
    C = subset_product(sample, c.bits, params.q)
    return Encoding(sample=sample, q=params.q, C=C)


def decode(encoding: Encoding, probe: Template, r: int) -> Template | None:
    """Recover the enrolled center from any probe within distance r, else None.

    Forms D = C / prod(p_i^x_i) mod q and reconstructs D as a ratio of
    two small squarefree prime products; the numerator's primes mark
    probe coordinates to raise, the denominator's to lower.  The
    recovered center is re-verified against C before being returned.
    """
    q, C = encoding.q, encoding.C
    if not 1 <= C < q:
        raise MalformedRecordError("encoding value out of range")
    if len(encoding.sample) != probe.n:
        raise ValueError("probe length does not match encoding")
    px = subset_product(encoding.sample, probe.bits, q)
    try:
        D = C * pow(px, -1, q) % q
    except ValueError as exc:
        raise MalformedRecordError("non-invertible residue (corrupt encoding)") from exc
    if D == 0:
        raise MalformedRecordError("non-invertible residue (corrupt encoding)")
    found = rational_reconstruct(D, q, encoding.sample, probe.bits, max_flips=r)
    if found is None:
        return None
    ones, zeros = found
    center = probe.with_flips(ones, zeros)
    # cheap defense: the reconstruction must reproduce C exactly
    if subset_product(encoding.sample, center.bits, q) != C:
        return None
    return center


def _keystream(b: int, k: int, length: int) -> bytes:
    b_bytes = _int_bytes(b, k)
    out = bytearray()
    counter = 0
    while len(out) < length:
        out.extend(hashlib.sha512(b_bytes + _KDF_LABEL + counter.to_bytes(4, "big")).digest())
        counter += 1
    return bytes(out[:length])


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def wrap_seed(seed: bytes, b: int, k: int) -> bytes:
    return _xor(seed, _keystream(b, k, len(seed)))


def enroll(
    c: Template,
    seed: bytes,
    params: SystemParams,
    rng: random.Random | None = None,
) -> VaultRecord:
    """Produce the storable record binding the seed to the template's ball."""
    _check_seed(seed)
    enc = encode(c, params, rng)
    lock, b = make_lock(c, rng)
    return VaultRecord(
        n=params.n,
        r=params.r,
        encoding=enc,
        lock=lock,
        wrapped_seed=wrap_seed(seed, b, lock.k),
        params_digest=params.digest(),
    )


def retrieve_seed(
    record: VaultRecord, probe: Template, params: SystemParams | None = None
) -> bytes | None:
    """Run the three-line recovery: decode, bail on failure, open the lock.

    Returns the seed bytes, or None on any mismatch; decode and lock
    failures are deliberately indistinguishable.
    """
    if params is not None and params.digest() != record.params_digest:
        raise MalformedRecordError("record was enrolled under different parameters")
    center = decode(record.encoding, probe, record.r)
    if center is None:
        return None
    b = open_lock(record.lock, center)
    if b is None:
        return None
    return wrap_seed(record.wrapped_seed, b, record.lock.k)


def enroll_multi(
    templates: Sequence[Template],
    seed: bytes,
    params: SystemParams,
    rng: random.Random | None = None,
) -> MultiVault:
    """Bind one seed to several objects; recovery needs every one to match."""
    if not templates:
        raise ValueError("need at least one template")
    _check_seed(seed)
    members: list[VaultMember] = []
    key = 0
    k = params.n // 2
    for c in templates:
        enc = encode(c, params, rng)
        lock, b = make_lock(c, rng)
        members.append(VaultMember(encoding=enc, lock=lock))
        key ^= b
    return MultiVault(
        n=params.n,
        r=params.r,
        members=tuple(members),
        wrapped_seed=wrap_seed(seed, key, k),
        params_digest=params.digest(),
    )


def retrieve_multi(vault: MultiVault, probes: Sequence[Template]) -> bytes | None:
    """XOR every member's payload into the unwrapping key; None if any member fails."""
    if len(probes) != vault.m:
        raise ValueError(f"expected {vault.m} probes, got {len(probes)}")
    key = 0
    k = vault.n // 2
    for member, probe in zip(vault.members, probes):
        center = decode(member.encoding, probe, vault.r)
        if center is None:
            return None
        b = open_lock(member.lock, center)
        if b is None:
            return None
        key ^= b
    return wrap_seed(vault.wrapped_seed, key, k)


def _check_seed(seed: bytes) -> None:
    if not MIN_SEED_LEN <= len(seed) <= MAX_SEED_LEN:
        raise ValueError(
            f"seed must be {MIN_SEED_LEN}-{MAX_SEED_LEN} bytes, got {len(seed)}"
        )


# --- file form -------------------------------------------------------------

def _lock_to_json(lock: PointLock) -> dict:
    return {
        "a_hex": _int_bytes(lock.a, lock.k).hex(),
        "u_hex": _int_bytes(lock.u, lock.k).hex(),
        "t_hex": lock.t.hex(),
        "h_hex": lock.h.hex(),
        "k": lock.k,
        "h_bits": lock.h_bits,
        "hash_alg": HASH_ALG,
    }


def _lock_from_json(payload: dict) -> PointLock:
    if payload.get("hash_alg") != HASH_ALG:
        raise MalformedRecordError(f"unsupported hash algorithm {payload.get('hash_alg')!r}")
    k = int(payload["k"])
    return PointLock(
        a=int.from_bytes(bytes.fromhex(payload["a_hex"]), "big"),
        u=int.from_bytes(bytes.fromhex(payload["u_hex"]), "big"),
        t=bytes.fromhex(payload["t_hex"]),
        h=bytes.fromhex(payload["h_hex"]),
        k=k,
        h_bits=int(payload["h_bits"]),
    )


def record_to_json(record: VaultRecord) -> dict:
    return {
        "version": RECORD_FILE_VERSION,
        "n": record.n,
        "r": record.r,
        "primes": list(record.encoding.sample.primes),
        "q": str(record.encoding.q),
        "C": str(record.encoding.C),
        "lock": _lock_to_json(record.lock),
        "wrapped_seed_hex": record.wrapped_seed.hex(),
        "kdf": KDF_ID,
        "params_digest_hex": record.params_digest,
    }


def multivault_to_json(vault: MultiVault) -> dict:
    return {
        "version": RECORD_FILE_VERSION,
        "n": vault.n,
        "r": vault.r,
        "q": str(vault.members[0].encoding.q),
        "records": [
            {
                "primes": list(m.encoding.sample.primes),
                "C": str(m.encoding.C),
                "lock": _lock_to_json(m.lock),
            }
            for m in vault.members
        ],
        "wrapped_seed_hex": vault.wrapped_seed.hex(),
        "kdf": KDF_ID,
        "params_digest_hex": vault.params_digest,
    }


def save_record(record: VaultRecord | MultiVault, path: str | Path) -> None:
    payload = (
        multivault_to_json(record) if isinstance(record, MultiVault) else record_to_json(record)
    )
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_record(path: str | Path) -> VaultRecord | MultiVault:
    """Parse a vault file; raises MalformedRecordError on any structural defect."""
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedRecordError(f"cannot parse vault file {path}: {exc}") from exc
    try:
        if payload.get("version") != RECORD_FILE_VERSION:
            raise MalformedRecordError(
                f"unsupported record version {payload.get('version')!r}"
            )
        if payload.get("kdf") != KDF_ID:
            raise MalformedRecordError(f"unsupported kdf {payload.get('kdf')!r}")
        n, r = int(payload["n"]), int(payload["r"])
        wrapped = bytes.fromhex(payload["wrapped_seed_hex"])
        digest = str(payload["params_digest_hex"])
        if "records" in payload:
            q = int(payload["q"])
            members = tuple(
                VaultMember(
                    encoding=_encoding_from_json(m["primes"], q, m["C"], n),
                    lock=_lock_from_json(m["lock"]),
                )
                for m in payload["records"]
            )
            if not members:
                raise MalformedRecordError("multi-vault with no members")
            return MultiVault(
                n=n, r=r, members=members, wrapped_seed=wrapped, params_digest=digest
            )
        encoding = _encoding_from_json(payload["primes"], int(payload["q"]), payload["C"], n)
        return VaultRecord(
            n=n,
            r=r,
            encoding=encoding,
            lock=_lock_from_json(payload["lock"]),
            wrapped_seed=wrapped,
            params_digest=digest,
        )
    except MalformedRecordError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedRecordError(f"malformed vault file {path}: {exc}") from exc


def _encoding_from_json(primes: list, q: int, C: str, n: int) -> Encoding:
    prime_tuple = tuple(int(p) for p in primes)
    if len(prime_tuple) != n:
        raise MalformedRecordError(f"expected {n} primes, found {len(prime_tuple)}")
    c_val = int(C)
    if not 1 <= c_val < q:
        raise MalformedRecordError("encoding value out of range")
    return Encoding(
        sample=PrimeSample(primes=prime_tuple, universe_size=len(prime_tuple)),
        q=q,
        C=c_val,
    )
