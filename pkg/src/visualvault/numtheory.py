"""Arbitrary-precision number theory used by the vault.

Everything here works over plain Python integers (gmpy2 accelerates the
hot loops and primality testing).  The centerpiece is
:func:`rational_reconstruct`, which recovers the two small coprime
"flip products" hidden in a residue via the extended Euclidean
algorithm.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import gmpy2
from gmpy2 import mpz

# Miller-Rabin rounds giving error < 4^-40 = 2^-80.
_MR_ROUNDS = 40

# Trial-division sieve used to pre-screen safe-prime candidates.
_SIEVE_LIMIT = 8000


def first_odd_primes(count: int) -> tuple[int, ...]:
    """Return the first `count` odd primes (3, 5, 7, ...)."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count == 0:
        return ()
    # p_k < k(ln k + ln ln k) for k >= 6; +1 skips the even prime.
    k = count + 1
    hi = 30 if k < 6 else int(k * (math.log(k) + math.log(math.log(k)))) + 10
    sieve = bytearray([1]) * (hi + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(hi) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    primes = [i for i in range(3, hi + 1) if sieve[i]]
    if len(primes) < count:  # bound is safe, but belt and braces
        return first_odd_primes_slow(count)
    return tuple(primes[:count])


def first_odd_primes_slow(count: int) -> tuple[int, ...]:
    """Incremental fallback for :func:`first_odd_primes`."""
    primes: list[int] = []
    c = mpz(2)
    while len(primes) < count:
        c = gmpy2.next_prime(c)
        primes.append(int(c))
    return tuple(primes)


@dataclass(frozen=True)
class PrimeSample:
    """An ordered draw of n distinct small primes, coordinate i bound to primes[i]."""

    primes: tuple[int, ...]
    universe_size: int

    def __post_init__(self) -> None:
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("sampled primes must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.primes)

    def index_of(self) -> dict[int, int]:
        """Map each prime to its coordinate."""
        return {p: i for i, p in enumerate(self.primes)}


def sample_primes(
    n: int, universe_size: int = 1024, rng: random.Random | None = None
) -> PrimeSample:
    """Draw n distinct primes uniformly from the first `universe_size` odd primes.

    Deterministic when `rng` is a seeded ``random.Random``; fresh system
    entropy otherwise.
    """
    if n > universe_size:
        raise ValueError(f"cannot sample {n} primes from a universe of {universe_size}")
    if rng is None:
        rng = random.SystemRandom()
    universe = first_odd_primes(universe_size)
    return PrimeSample(primes=tuple(rng.sample(universe, n)), universe_size=universe_size)


_SIEVE_PRIMES = first_odd_primes(1000)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin primality with error below 2^-80."""
    return bool(gmpy2.is_prime(mpz(n), _MR_ROUNDS))


def generate_safe_prime(
    bits: int,
    rng: random.Random | None = None,
    progress: Callable[[int], None] | None = None,
) -> int:
    """Find a safe prime q (q and (q-1)/2 both prime) of exactly `bits` bits.

    Candidates are scanned incrementally from a random start: m odd with
    the top bit of its (bits-1)-bit width set, q = 2m + 1, both
    pre-screened by trial division before Miller-Rabin.  `progress`, if
    given, is called with the running candidate count every 1024
    candidates.  Deterministic when `rng` is seeded.
    """
    if bits < 3:
        raise ValueError("bits must be at least 3")
    if rng is None:
        rng = random.SystemRandom()
    tested = 0
    while True:
        m = rng.getrandbits(bits - 1) | (1 << (bits - 2)) | 1
        # Scan a window of odd m before redrawing, so seeded runs are cheap.
        for _ in range(1 << 14):
            if m.bit_length() != bits - 1:
                break
            tested += 1
            if progress is not None and tested % 1024 == 0:
                progress(tested)
            q = 2 * m + 1
            if _survives_sieve(m, q) and gmpy2.is_prime(mpz(m), _MR_ROUNDS) and gmpy2.is_prime(
                mpz(q), _MR_ROUNDS
            ):
                return q
            m += 2


def _survives_sieve(m: int, q: int) -> bool:
    for p in _SIEVE_PRIMES:
        if p >= q:
            break
        if m % p == 0 and m != p:
            return False
        if q % p == 0 and q != p:
            return False
    return True


def subset_product(sample: PrimeSample | Sequence[int], bits: Sequence[int], q: int) -> int:
    """Product of sample primes over the set coordinates, reduced mod q."""
    primes = sample.primes if isinstance(sample, PrimeSample) else tuple(sample)
    if len(primes) != len(bits):
        raise ValueError(f"length mismatch: {len(primes)} primes vs {len(bits)} bits")
    acc = 1
    for p, b in zip(primes, bits):
        if b:
            acc *= p
    return int(acc % q)


@dataclass(frozen=True)
class ReconstructionCandidate:
    """One extended-Euclid step: a ≡ sign·b·D (mod q) with a = r_j, b = |t_j|."""

    a: int
    b: int
    step_index: int
    sign: int  # +1 or -1, the sign of t_j


def euclid_candidates(q: int, d: int) -> Iterator[ReconstructionCandidate]:
    """Yield every remainder/coefficient pair of the EEA run on (q, d).

    Step j carries r_j = s_j·q + t_j·d, so r_j ≡ t_j·d (mod q); the pair
    (r_j, |t_j|) is a candidate numerator/denominator for the fraction
    congruent to d.
    """
    r_prev, r_cur = mpz(q), mpz(d)
    t_prev, t_cur = mpz(0), mpz(1)
    step = 1
    while r_cur:
        yield ReconstructionCandidate(
            a=int(r_cur), b=int(abs(t_cur)), step_index=step, sign=1 if t_cur > 0 else -1
        )
        g = r_prev // r_cur
        r_prev, r_cur = r_cur, r_prev - g * r_cur
        t_prev, t_cur = t_cur, t_prev - g * t_cur
        step += 1


def rational_reconstruct(
    d: int,
    q: int,
    sample: PrimeSample,
    probe: Sequence[int],
    max_flips: int,
) -> tuple[list[int], list[int]] | None:
    """Recover the coordinate flips explaining d as a ratio of prime products.

    Interprets d as A/B (mod q) where A multiplies primes at coordinates
    the probe has 0 (bits to raise) and B primes at coordinates the probe
    has 1 (bits to lower), both squarefree, fewer than `max_flips` factors
    in total.  Scans every extended-Euclid step of (q, d); a candidate
    (a, b) is admitted iff a divides the product of the raise-side primes,
    b divides the lower-side product (divisibility by a squarefree product
    is exactly the squarefree-smoothness test), and a ≡ b·d (mod q).

    Returns (one_positions, zero_positions) or None when the Euclid
    sequence is exhausted.
    """
    if not 0 < d < q:
        raise ValueError("d out of range (corrupt encoding)")
    if math.gcd(d, q) != 1:
        raise ValueError("d not invertible mod q (corrupt encoding)")
    primes = sample.primes
    if len(primes) != len(probe):
        raise ValueError("probe length does not match sample")

    zero_idx = [i for i, b in enumerate(probe) if not b]
    one_idx = [i for i, b in enumerate(probe) if b]
    prod_zero = mpz(1)
    for i in zero_idx:
        prod_zero *= primes[i]
    prod_one = mpz(1)
    for i in one_idx:
        prod_one *= primes[i]

    mq, md = mpz(q), mpz(d)
    for cand in euclid_candidates(q, d):
        if cand.sign < 0:
            continue  # a ≡ -b·d can never equal the wanted +b·d (q odd prime)
        a, b = mpz(cand.a), mpz(cand.b)
        if a > prod_zero or b > prod_one:
            continue
        if prod_zero % a or prod_one % b:
            continue
        if (b * md - a) % mq:
            continue
        ones = _extract_factors(int(a), primes, zero_idx)
        zeros = _extract_factors(int(b), primes, one_idx)
        if ones is None or zeros is None:
            continue
        if len(ones) + len(zeros) < max_flips:
            return ones, zeros
    return None


def _extract_factors(v: int, primes: Sequence[int], allowed_idx: Sequence[int]) -> list[int] | None:
    """Factor v over primes at the allowed coordinates; None unless it factors fully."""
    out: list[int] = []
    for i in allowed_idx:
        if v == 1:
            break
        p = primes[i]
        if v % p == 0:
            out.append(i)
            v //= p
    return out if v == 1 else None


def smooth_factor(v: int, allowed: Sequence[int]) -> list[int] | None:
    """Indices I with v = ∏ allowed[i] over I, each exponent exactly one.

    Returns None (not smooth) when v has a repeated factor or a factor
    outside `allowed`.  Since the allowed product is squarefree, v divides
    it iff v is a squarefree product of allowed primes; factor extraction
    then splits v by trial division.
    """
    if v < 1:
        raise ValueError("v must be >= 1")
    if v == 1:
        return []
    total = mpz(1)
    for p in allowed:
        total *= p
    if total % v:
        return None
    out: list[int] = []
    for i, p in enumerate(allowed):
        if v % p == 0:
            out.append(i)
            v //= p
        if v == 1:
            break
    return out if v == 1 else None
