"""Batch CNN feature dump: images in, 4096-wide embeddings CSV out.

The tapped representation is the output of the second 4096-unit
fully-connected layer of VGG-16, after its rectifier and before the
classifier head, under the standard 224x224 center-crop preprocessing.
Rows are written in filename-sorted order so runs are reproducible.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import torch
from PIL import Image
from torchvision import models, transforms

logger = logging.getLogger(__name__)

EMBEDDING_DIM = 4096

#: filename -> (object, view); e.g. "mug_left.png" -> ("mug", "left")
DEFAULT_ID_PATTERN = r"(?P<object>[^_]+)_(?P<view>.+)\.[^.]+$"

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".webp"}

_PREPROCESS = transforms.Compose(
    [
        transforms.Resize(256),
        transforms.CenterCrop(224),
        transforms.ToTensor(),
        transforms.Normalize(
            mean=[0.485, 0.456, 0.406], std=[0.229, 0.224, 0.225]
        ),
    ]
)


@dataclass
class ExtractorConfig:
    image_dir: Path
    out_csv: Path
    id_pattern: str = DEFAULT_ID_PATTERN
    weights: str = "imagenet"  # "imagenet" or "random"
    device: str = "cpu"
    batch_size: int = 8
    torch_seed: int = 0  # used only for random weights
    skipped: list[dict] = field(default_factory=list)


def build_model(weights: str, torch_seed: int, device: str) -> torch.nn.Module:
    """VGG-16 truncated after the second 4096-wide rectified layer."""
    if weights == "imagenet":
        model = models.vgg16(weights=models.VGG16_Weights.IMAGENET1K_V1)
    elif weights == "random":
        torch.manual_seed(torch_seed)
        model = models.vgg16(weights=None)
    else:
        raise ValueError(f"weights must be 'imagenet' or 'random', got {weights!r}")
    model.classifier = model.classifier[:5]
    model.eval()
    return model.to(device)


def iter_image_files(image_dir: Path) -> list[Path]:
    files = [
        p
        for p in sorted(image_dir.iterdir())
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    ]
    if not files:
        raise ValueError(f"no images found under {image_dir}")
    return files


def parse_ids(pattern: str, filename: str) -> tuple[str, str]:
    match = re.search(pattern, filename)
    if not match or "object" not in match.groupdict() or "view" not in match.groupdict():
        raise ValueError(
            f"id pattern {pattern!r} must match {filename!r} with groups 'object' and 'view'"
        )
    return match.group("object"), match.group("view")


def extract(config: ExtractorConfig) -> Path:
    """Run the dump; returns the CSV path.

    Unreadable or unmatchable files are skipped with a warning and listed
    in a sidecar report next to the CSV.
    """
    files = iter_image_files(Path(config.image_dir))
    model = build_model(config.weights, config.torch_seed, config.device)

    rows: list[tuple[str, str, Path]] = []
    for path in files:
        try:
            rows.append((*parse_ids(config.id_pattern, path.name), path))
        except ValueError as exc:
            logger.warning("skipping %s: %s", path.name, exc)
            config.skipped.append({"file": path.name, "error": str(exc)})

    out = Path(config.out_csv)
    out.parent.mkdir(parents=True, exist_ok=True)
    negatives = 0
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(
            f"# model=vgg16 weights={config.weights} tap=classifier-fc2-post-relu"
            " preprocessing=resize256-crop224-imagenet-norm\r\n"
        )
        writer = csv.writer(fh)
        writer.writerow(["object_id", "view_id"] + [f"v{i}" for i in range(EMBEDDING_DIM)])
        for start in range(0, len(rows), config.batch_size):
            batch = rows[start : start + config.batch_size]
            tensors, kept = [], []
            for object_id, view_id, path in batch:
                try:
                    with Image.open(path) as img:
                        tensors.append(_PREPROCESS(img.convert("RGB")))
                    kept.append((object_id, view_id, path))
                except OSError as exc:
                    logger.warning("skipping %s: %s", path.name, exc)
                    config.skipped.append({"file": path.name, "error": str(exc)})
            if not tensors:
                continue
            with torch.no_grad():
                feats = model(torch.stack(tensors).to(config.device)).cpu().numpy()
            if feats.shape[1] != EMBEDDING_DIM:
                raise RuntimeError(f"unexpected feature width {feats.shape[1]}")
            negatives += int((feats < 0).sum())
            for (object_id, view_id, _), vec in zip(kept, feats):
                writer.writerow([object_id, view_id] + [repr(float(x)) for x in vec])

    if negatives:
        # the tap point sits behind a rectifier, so this indicates a
        # surprising model surgery rather than a hard error
        logger.warning("%d negative activations in post-rectifier features", negatives)
    report_path = out.with_name(out.name + ".skipped.json")
    report_path.write_text(json.dumps(config.skipped, indent=2) + "\n")
    return out
