"""Embedding-to-template pipeline: sparse sign projection and Hamming distance.

A 4096-dimensional embedding is multiplied by a persisted sparse ternary
matrix and reduced to bits by keeping only the signs.  The matrix is
regenerated bit-exactly from its seed, so enrollment and recovery agree
as long as they share the matrix file.
"""

from __future__ import annotations

import csv
import gzip
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .templates import Template

MATRIX_FILE_VERSION = 1
DEFAULT_ROWS = 4096
DEFAULT_COLS = 512
DEFAULT_DENSITY = 1.0 / 64.0

#: Raw 64-bit PCG64 stream, consumed column-major; pinned in the file format.
PRNG_NAME = "pcg64-raw"

# Entry rule on each raw 64-bit draw u: zero below 63/64 of the range,
# then +1 / -1 split the rest evenly.
_ZERO_CUT = 63 << 58  # 63/64 * 2^64
_PLUS_CUT = 127 << 57  # 127/128 * 2^64


@dataclass(frozen=True)
class Embedding:
    """One image's float feature vector with its identity labels."""

    object_id: str
    view_id: str
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("embedding values must be one-dimensional")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class ProjectionMatrix:
    """Sparse ternary projection, reproducible from (prng, seed)."""

    rows: int
    cols: int
    density: float
    seed: int
    prng: str
    entries: np.ndarray  # dense int8 (rows, cols) of {-1, 0, +1}

    def nonzero_triplets(self) -> list[list[int]]:
        rr, cc = np.nonzero(self.entries)
        return [[int(i), int(j), int(self.entries[i, j])] for i, j in zip(rr, cc)]


def generate_matrix(seed: int, rows: int = DEFAULT_ROWS, cols: int = DEFAULT_COLS) -> ProjectionMatrix:
    """Deterministic sparse ternary matrix from a 64-bit seed.

    One raw PCG64 draw per entry, filled column-major: entry (i, j) uses
    stream position j*rows + i.  Each entry is 0 with probability 63/64,
    otherwise +1 or -1 with equal probability.
    """
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in 64 bits")
    raw = np.random.PCG64(seed).random_raw(rows * cols)
    flat = np.where(raw < _ZERO_CUT, 0, np.where(raw < _PLUS_CUT, 1, -1)).astype(np.int8)
    entries = flat.reshape(cols, rows).T.copy()
    entries.setflags(write=False)
    return ProjectionMatrix(
        rows=rows,
        cols=cols,
        density=DEFAULT_DENSITY,
        seed=seed,
        prng=PRNG_NAME,
        entries=entries,
    )


def binarize(e: Embedding, m: ProjectionMatrix) -> Template:
    """Project and keep signs: bit i = 1 iff the i-th projection is > 0.

    Exact zeros map to 0, so the zero embedding gives the all-zero
    template and the output is invariant to positive rescaling.
    """
    if e.values.shape[0] != m.rows:
        raise ValueError(f"embedding dim {e.values.shape[0]} != matrix rows {m.rows}")
    if not np.isfinite(e.values).all():
        raise ValueError("embedding contains non-finite values")
    v = e.values @ m.entries.astype(np.float64)
    return Template((v > 0).astype(np.uint8))


def hamming(x: Template, y: Template) -> int:
    """Number of differing coordinates."""
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} vs {y.n}")
    return int(np.count_nonzero(x.bits != y.bits))


# --- file forms --------------------------------------------------------------

def save_matrix(m: ProjectionMatrix, path: str | Path, include_entries: bool = False) -> None:
    payload = {
        "version": MATRIX_FILE_VERSION,
        "rows": m.rows,
        "cols": m.cols,
        "density": m.density,
        "seed": m.seed,
        "prng": m.prng,
    }
    if include_entries:
        payload["entries"] = m.nonzero_triplets()
    Path(path).write_text(json.dumps(payload) + "\n")


def load_matrix(path: str | Path) -> ProjectionMatrix:
    """Rebuild a matrix from its file; explicit entries win over regeneration."""
    payload = json.loads(Path(path).read_text())
    if payload.get("version") != MATRIX_FILE_VERSION:
        raise ValueError(f"unsupported matrix file version {payload.get('version')!r}")
    rows, cols = int(payload["rows"]), int(payload["cols"])
    if "entries" in payload:
        entries = np.zeros((rows, cols), dtype=np.int8)
        for i, j, sign in payload["entries"]:
            entries[int(i), int(j)] = int(sign)
        entries.setflags(write=False)
        return ProjectionMatrix(
            rows=rows,
            cols=cols,
            density=float(payload["density"]),
            seed=int(payload["seed"]),
            prng=str(payload["prng"]),
            entries=entries,
        )
    if payload["prng"] != PRNG_NAME:
        raise ValueError(f"unknown prng {payload['prng']!r}; cannot regenerate entries")
    return generate_matrix(int(payload["seed"]), rows, cols)


def _open_text(path: Path, mode: str):
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t", encoding="utf-8", newline="")
    return open(path, mode, encoding="utf-8", newline="")


def read_embeddings_csv(path: str | Path) -> list[Embedding]:
    """Parse the embeddings CSV (header object_id,view_id,v0,...)."""
    path = Path(path)
    out: list[Embedding] = []
    with _open_text(path, "r") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        header = next(reader, None)
        if not header or header[:2] != ["object_id", "view_id"]:
            raise ValueError(f"{path}: expected header object_id,view_id,v0,...")
        dim = len(header) - 2
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != dim + 2:
                raise ValueError(f"{path}:{lineno}: expected {dim + 2} columns, got {len(row)}")
            values = np.array([float(x) for x in row[2:]], dtype=np.float64)
            if not np.isfinite(values).all():
                raise ValueError(f"{path}:{lineno}: non-finite embedding value")
            out.append(Embedding(object_id=row[0], view_id=row[1], values=values))
    return out


def write_embeddings_csv(embeddings: list[Embedding], path: str | Path) -> None:
    path = Path(path)
    if not embeddings:
        raise ValueError("nothing to write")
    dim = embeddings[0].values.shape[0]
    with _open_text(path, "w") as fh:
        writer = csv.writer(fh)
        writer.writerow(["object_id", "view_id"] + [f"v{i}" for i in range(dim)])
        for e in embeddings:
            writer.writerow([e.object_id, e.view_id] + [repr(float(x)) for x in e.values])


def read_templates_csv(path: str | Path) -> list[tuple[str, str, Template]]:
    """Parse the templates CSV (object_id,view_id,template_hex)."""
    path = Path(path)
    out: list[tuple[str, str, Template]] = []
    with _open_text(path, "r") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["object_id", "view_id", "template_hex"]:
            raise ValueError(f"{path}: expected header object_id,view_id,template_hex")
        for row in reader:
            if not row:
                continue
            n_bits = len(row[2]) * 4
            out.append((row[0], row[1], Template.from_hex(row[2], n_bits)))
    return out


def write_templates_csv(rows: list[tuple[str, str, Template]], path: str | Path) -> None:
    with _open_text(Path(path), "w") as fh:
        writer = csv.writer(fh)
        writer.writerow(["object_id", "view_id", "template_hex"])
        for object_id, view_id, template in rows:
            writer.writerow([object_id, view_id, template.to_hex()])


def templates_from_embeddings(
    embeddings: list[Embedding], m: ProjectionMatrix
) -> list[tuple[str, str, Template]]:
    return [(e.object_id, e.view_id, binarize(e, m)) for e in embeddings]


def expected_nonzero_band(rows: int, cols: int, density: float, sigmas: float = 3.0) -> tuple[float, float]:
    """Binomial confidence band for the nonzero fraction of a generated matrix."""
    total = rows * cols
    sigma = math.sqrt(density * (1.0 - density) / total)
    return density - sigmas * sigma, density + sigmas * sigma
