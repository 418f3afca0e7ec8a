import random

import pytest
from PIL import Image, ImageDraw

from vault_extractor import ExtractorConfig, extract

N_OBJECTS = 10
N_VIEWS = 3
VIEW_ANGLES = (0, 8, 16)


def draw_object_image(object_seed: int, size: int = 256) -> Image.Image:
    """Procedural scene: a handful of seeded colored shapes on a dark ground."""
    rng = random.Random(object_seed)
    img = Image.new("RGB", (size, size), (20, 20, 28))
    draw = ImageDraw.Draw(img)
    for _ in range(7):
        x0, y0 = rng.randrange(size - 60), rng.randrange(size - 60)
        x1, y1 = x0 + rng.randrange(24, 60), y0 + rng.randrange(24, 60)
        color = tuple(rng.randrange(40, 255) for _ in range(3))
        if rng.random() < 0.5:
            draw.rectangle([x0, y0, x1, y1], fill=color)
        else:
            draw.ellipse([x0, y0, x1, y1], fill=color)
    for _ in range(4):
        pts = [tuple(rng.randrange(size) for _ in range(2)) for _ in range(2)]
        draw.line(pts, fill=tuple(rng.randrange(90, 255) for _ in range(3)), width=3)
    return img


@pytest.fixture(scope="session")
def smoke_dir(tmp_path_factory):
    """10 objects x 3 views: rotated renders of the same seeded scene."""
    path = tmp_path_factory.mktemp("smoke_images")
    for obj in range(N_OBJECTS):
        base = draw_object_image(1000 + obj)
        for view, angle in enumerate(VIEW_ANGLES):
            rotated = base.rotate(angle, fillcolor=(20, 20, 28))
            rotated.save(path / f"obj{obj:02d}_view{view}.png")
    return path


@pytest.fixture(scope="session")
def smoke_csv(smoke_dir, tmp_path_factory):
    """One extraction pass over the smoke set with seeded random weights."""
    out = tmp_path_factory.mktemp("smoke_out") / "embeddings.csv"
    config = ExtractorConfig(
        image_dir=smoke_dir, out_csv=out, weights="random", torch_seed=7, batch_size=6
    )
    extract(config)
    assert config.skipped == []
    return out
