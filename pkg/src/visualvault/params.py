"""System parameters and the security accounting behind them.

The matcher accepts a probe iff it lies in the Hamming ball of radius r
around the enrolled template.  Security comes from two sides: the ball
must be a vanishing fraction of {0,1}^n (quantified exactly by
:func:`lambda_exact`), and r must be large enough that the published
encoding hides its center (:func:`r2_bound`).  The closed-form radius
cap :func:`r1_bound` is reported in both log bases because its source is
ambiguous about which it means; the exact tail probability is what gates
validation.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, replace
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Callable

from . import numtheory

PARAMS_FILE_VERSION = 1

#: 2·sqrt(2·pi·e), the constant in the center-hiding radius bound.
_HIDING_CONST = 2.0 * math.sqrt(2.0 * math.pi * math.e)


@dataclass(frozen=True)
class SystemParams:
    """Deployment-wide parameters shared by every vault record.

    q is generated once per deployment and cached; only the per-encoding
    prime samples are fresh randomness.
    """

    n: int = 512
    r: int = 140
    lambda_target: int = 87
    universe_size: int = 1024
    q_bits: int | None = None
    q: int | None = None

    @cached_property
    def universe(self) -> tuple[int, ...]:
        """The first universe_size odd primes, the sampling pool for encodings."""
        return numtheory.first_odd_primes(self.universe_size)

    @cached_property
    def worst_case_bound(self) -> int:
        """2·(product of the r-1 largest universe primes) + 1.

        Any q above this makes every product of fewer than r sampled
        primes smaller than q/2, whatever the sample, which is what makes
        decoding inside the ball unambiguous.
        """
        prod = 1
        top = self.universe[-(self.r - 1):] if self.r > 1 else ()
        for p in top:
            prod *= p
        return 2 * prod + 1

    def digest(self) -> str:
        """SHA-256 over the canonical JSON form, binding records to parameters."""
        return hashlib.sha256(_canonical_json(self).encode()).hexdigest()

    def with_q(self, q: int) -> "SystemParams":
        return replace(self, q=q, q_bits=q.bit_length())

    def check_structure(self) -> None:
        """Raise ParameterError unless the params can back an encoding.

        This is the cheap gate used on every encode: shape constraints
        plus the q-size condition.  Primality and the security-level gate
        live in :func:`validate`, which is run when parameters are
        generated or loaded.
        """
        if self.n <= 0 or self.n % 2:
            raise ParameterError(f"n must be positive and even, got {self.n}")
        if not 0 < self.r < self.n / 2:
            raise ParameterError(f"need 0 < r < n/2, got r={self.r}, n={self.n}")
        if self.n > self.universe_size:
            raise ParameterError(
                f"universe of {self.universe_size} primes cannot cover n={self.n}"
            )
        if self.q is None:
            raise ParameterError("q not set; generate parameters first")
        if self.q <= self.worst_case_bound:
            raise ParameterError("q too small for the configured universe and radius")


class ParameterError(ValueError):
    """Parameters cannot support the requested operation."""


def r1_bound(n: int, lam: float, log_base: str = "ten") -> float:
    """Radius cap n/2 - sqrt(log(2)·n·λ) for a λ-bit brute-force margin.

    `log_base` selects how log(2) is read: "ten" reproduces the r=140
    reference point at n=512, λ=87 (≈140.2); "natural" is the
    conservative reading (≈80.3).
    """
    if n <= 0 or lam <= 0:
        raise ValueError("n and lambda must be positive")
    if log_base not in ("ten", "natural"):
        raise ValueError(f"log_base must be 'ten' or 'natural', got {log_base!r}")
    log2c = math.log10(2.0) if log_base == "ten" else math.log(2.0)
    radicand = log2c * n * lam
    if radicand < 0:
        raise ValueError("negative radicand: lambda too large for n")
    return n / 2 - math.sqrt(radicand)


def r2_bound(n: int) -> float:
    """Minimum radius below which the encoding no longer hides its center.

    log(2·sqrt(2πe))·n / log(n·log n), all logs natural (the expression is
    a ratio of logarithms of fixed quantities, so the outer base cancels).
    ≈ 134.0 at n = 512.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    return math.log(_HIDING_CONST) * n / math.log(n * math.log(n))


def lambda_exact(n: int, r: int) -> float:
    """Exact security bits of the (n, r) Hamming ball: -log2(|B(r)| / 2^n).

    The ball volume is summed in exact integer arithmetic; only the final
    logarithm goes through floating point.
    """
    if not 0 <= r <= n:
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={n}")
    volume = sum(math.comb(n, i) for i in range(r + 1))
    return n - math.log2(volume)


def derive_q_bits(params: SystemParams) -> int:
    """Bit length to request when generating q.

    The worst-case product bound is rounded up to a multiple of 32 with
    one extra 32-bit word of headroom, so q exceeds the bound by a wide
    margin for every possible sample.  Defaults (n=512, r=140,
    1024-prime universe) give 1824.
    """
    bound_bits = params.worst_case_bound.bit_length()
    return ((bound_bits + 31) // 32 + 1) * 32


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    informational: bool = False


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def render(self) -> str:
        lines = []
        for c in self.checks:
            if c.informational:
                status = "info"
            else:
                status = "PASS" if c.passed else "FAIL"
            lines.append(f"[{status}] {c.name}: {c.detail}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def validate(params: SystemParams) -> ValidationReport:
    """Evaluate every parameter invariant; failures are report entries, not faults.

    The gate on the security level is the exact ball tail
    (lambda_exact >= lambda_target); the closed-form radius cap is
    reported in both log bases for reference but does not gate.
    """
    checks: list[CheckResult] = []

    n, r = params.n, params.r
    checks.append(
        CheckResult("n_even", n > 0 and n % 2 == 0, f"n = {n} (template splits into halves)")
    )
    checks.append(
        CheckResult("r_range", 0 < r < n / 2, f"0 < r < n/2: r = {r}, n/2 = {n / 2:g}")
    )

    if 0 < r < n / 2 and n >= 3:
        hiding = r2_bound(n)
        checks.append(
            CheckResult(
                "r2_hiding",
                r > hiding,
                f"center-hiding bound {hiding:.1f} < r = {r}"
                if r > hiding
                else f"r = {r} does not exceed center-hiding bound {hiding:.1f}",
            )
        )
        exact = lambda_exact(n, r)
        checks.append(
            CheckResult(
                "lambda_exact",
                exact >= params.lambda_target,
                f"exact ball security {exact:.2f} bits vs target {params.lambda_target}",
            )
        )
        for base in ("ten", "natural"):
            checks.append(
                CheckResult(
                    f"r1_bound_{base}",
                    True,
                    f"radius cap (log base {base}) = "
                    f"{r1_bound(n, params.lambda_target, base):.1f}",
                    informational=True,
                )
            )

    if params.q is not None:
        q = params.q
        q_safe = numtheory.is_probable_prime(q) and numtheory.is_probable_prime((q - 1) // 2)
        checks.append(
            CheckResult("q_safe_prime", q_safe, f"q ({q.bit_length()} bits) and (q-1)/2 prime")
        )
        if 0 < r:
            unique = q > params.worst_case_bound
            checks.append(
                CheckResult(
                    "q_uniqueness",
                    unique,
                    f"2·(product of {r - 1} largest universe primes) "
                    f"({params.worst_case_bound.bit_length()} bits) < q",
                )
            )
        if params.q_bits is not None:
            checks.append(
                CheckResult(
                    "q_bit_length",
                    True,
                    f"declared {params.q_bits}, actual {q.bit_length()}",
                    informational=True,
                )
            )

    return ValidationReport(checks=tuple(checks))


def generate(
    n: int = 512,
    r: int = 140,
    lambda_target: int = 87,
    universe_size: int = 1024,
    rng: random.Random | None = None,
    progress: Callable[[int], None] | None = None,
) -> SystemParams:
    """Size and generate q for a fresh parameter set."""
    base = SystemParams(
        n=n, r=r, lambda_target=lambda_target, universe_size=universe_size
    )
    if base.n <= 0 or base.n % 2 or not 0 < base.r < base.n / 2 or base.n > universe_size:
        raise ParameterError(
            f"structurally invalid parameters: n={n}, r={r}, universe={universe_size}"
        )
    bits = derive_q_bits(base)
    q = numtheory.generate_safe_prime(bits, rng=rng, progress=progress)
    return replace(base, q_bits=bits, q=q)


def _canonical_json(params: SystemParams) -> str:
    return json.dumps(
        {
            "n": params.n,
            "r": params.r,
            "lambda_target": params.lambda_target,
            "universe_size": params.universe_size,
            "q_bits": params.q_bits,
            "q": str(params.q) if params.q is not None else None,
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def save_params(params: SystemParams, path: str | Path) -> None:
    payload = {
        "version": PARAMS_FILE_VERSION,
        "n": params.n,
        "r": params.r,
        "lambda_target": params.lambda_target,
        "universe_size": params.universe_size,
        "q_bits": params.q_bits,
        "q": str(params.q) if params.q is not None else None,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_params(path: str | Path) -> SystemParams:
    try:
        payload = json.loads(Path(path).read_text())
        if payload.get("version") != PARAMS_FILE_VERSION:
            raise ValueError(f"unsupported params file version: {payload.get('version')!r}")
        return SystemParams(
            n=int(payload["n"]),
            r=int(payload["r"]),
            lambda_target=int(payload["lambda_target"]),
            universe_size=int(payload["universe_size"]),
            q_bits=int(payload["q_bits"]) if payload.get("q_bits") is not None else None,
            q=int(payload["q"]) if payload.get("q") is not None else None,
        )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ParameterError(f"malformed parameter file {path}: {exc}") from exc


def default_params() -> SystemParams:
    """The packaged deployment defaults, including a pregenerated 1824-bit q."""
    text = resources.files("visualvault.data").joinpath("default_params.json").read_text()
    payload = json.loads(text)
    return SystemParams(
        n=payload["n"],
        r=payload["r"],
        lambda_target=payload["lambda_target"],
        universe_size=payload["universe_size"],
        q_bits=payload["q_bits"],
        q=int(payload["q"]),
    )
