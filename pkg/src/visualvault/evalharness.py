"""Accuracy evaluation over labeled template sets: FAR/FRR, DET curve, EER.

Scores are integer Hamming distances and a probe is accepted when its
distance is <= threshold, so the DET sweep is exact rather than
interpolated.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .pipeline import hamming
from .templates import Template

LabeledTemplates = list[tuple[str, str, Template]]


@dataclass(frozen=True)
class ScoreSet:
    """Genuine (same object) and impostor (cross object) distance lists."""

    genuine: tuple[int, ...]
    impostor: tuple[int, ...]


@dataclass(frozen=True)
class DetPoint:
    threshold: int
    far: float
    frr: float


def pair_scores(templates: LabeledTemplates) -> ScoreSet:
    """Build the score lists from labeled templates.

    Genuine scores pair every two views of the same object.  Impostor
    scores pair the reference view (first by lexicographic view_id) of
    every two distinct objects.
    """
    by_object: dict[str, list[tuple[str, Template]]] = {}
    for object_id, view_id, t in templates:
        by_object.setdefault(object_id, []).append((view_id, t))
    for views in by_object.values():
        views.sort(key=lambda vt: vt[0])

    genuine: list[int] = []
    for object_id in sorted(by_object):
        views = by_object[object_id]
        for i in range(len(views)):
            for j in range(i + 1, len(views)):
                genuine.append(hamming(views[i][1], views[j][1]))

    references = [(object_id, by_object[object_id][0][1]) for object_id in sorted(by_object)]
    impostor: list[int] = []
    for i in range(len(references)):
        for j in range(i + 1, len(references)):
            impostor.append(hamming(references[i][1], references[j][1]))

    if not genuine:
        raise ValueError("no genuine pairs: need an object with at least two views")
    if not impostor:
        raise ValueError("no impostor pairs: need at least two objects")
    return ScoreSet(genuine=tuple(genuine), impostor=tuple(impostor))


def far_frr(scores: ScoreSet, threshold: int) -> tuple[float, float]:
    """(FAR, FRR) at an integer threshold with accept rule distance <= threshold."""
    if not scores.genuine or not scores.impostor:
        raise ValueError("score lists must be nonempty")
    far = sum(1 for d in scores.impostor if d <= threshold) / len(scores.impostor)
    frr = sum(1 for d in scores.genuine if d > threshold) / len(scores.genuine)
    return far, frr


def det_curve(scores: ScoreSet, n: int | None = None) -> list[DetPoint]:
    """One DET point per threshold 0..n (n defaults to the largest score)."""
    if not scores.genuine or not scores.impostor:
        raise ValueError("score lists must be nonempty")
    if n is None:
        n = max(max(scores.genuine), max(scores.impostor))
    points = []
    for t in range(n + 1):
        far, frr = far_frr(scores, t)
        points.append(DetPoint(threshold=t, far=far, frr=frr))
    return points


def eer(scores: ScoreSet) -> tuple[float, int]:
    """Equal error rate and its threshold.

    Minimizes max(FAR, FRR) over integer thresholds; among minimizers, a
    threshold where the two rates are exactly equal wins and its shared
    rate is returned exactly.  When no threshold equalizes them the
    crossing falls between thresholds, and the midpoint of the two rates
    at the smallest minimizer is reported.
    """
    points = det_curve(scores)
    best_max = min(max(p.far, p.frr) for p in points)
    achieving = [p for p in points if max(p.far, p.frr) == best_max]
    for p in achieving:
        if p.far == p.frr:
            return p.far, p.threshold
    p = achieving[0]
    return (p.far + p.frr) / 2.0, p.threshold


def cross_fa_count(
    probe_templates: list[Template], reference_templates: list[Template], r: int
) -> tuple[int, float]:
    """Count probe/reference pairs within distance r; returns (count, ratio)."""
    if not probe_templates or not reference_templates:
        raise ValueError("both template sets must be nonempty")
    count = sum(
        1
        for a in probe_templates
        for b in reference_templates
        if hamming(a, b) < r
    )
    return count, count / (len(probe_templates) * len(reference_templates))


def accept_ratio(count: int, n_probes: int, n_references: int) -> float:
    """The false-acceptance ratio arithmetic for externally obtained counts."""
    if n_probes <= 0 or n_references <= 0:
        raise ValueError("set sizes must be positive")
    return count / (n_probes * n_references)


def write_det_csv(points: list[DetPoint], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "far", "frr"])
        for p in points:
            writer.writerow([p.threshold, repr(p.far), repr(p.frr)])


def summarize(scores: ScoreSet, r: int) -> dict:
    """Summary dict: EER and the operating point at the vault's accept rule (d < r)."""
    rate, threshold = eer(scores)
    far, frr = far_frr(scores, r - 1)
    return {
        "eer": rate,
        "eer_threshold": threshold,
        "far_at_r": far,
        "frr_at_r": frr,
        "n_genuine": len(scores.genuine),
        "n_impostor": len(scores.impostor),
    }


def write_summary_json(summary: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2) + "\n")
