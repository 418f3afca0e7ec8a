import csv
import json
from pathlib import Path

import numpy as np
import pytest

from vault_extractor import DEFAULT_ID_PATTERN, ExtractorConfig, extract, parse_ids
from vault_extractor.cli import main

from conftest import draw_object_image


class TestIdParsing:
    def test_default_pattern(self):
        assert parse_ids(DEFAULT_ID_PATTERN, "mug_left.png") == ("mug", "left")
        assert parse_ids(DEFAULT_ID_PATTERN, "obj07_view2.jpg") == ("obj07", "view2")

    def test_custom_pattern(self):
        pattern = r"(?P<object>\d+)-(?P<view>\d+)\.png$"
        assert parse_ids(pattern, "197-035.png") == ("197", "035")

    def test_no_match_raises(self):
        with pytest.raises(ValueError):
            parse_ids(DEFAULT_ID_PATTERN, "noseparator.png")

    def test_missing_groups_raises(self):
        with pytest.raises(ValueError):
            parse_ids(r"(?P<object>.+)\.png$", "a_b.png")


def read_data_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(line for line in fh if not line.startswith("#")))


class TestOutputSchema:
    def test_provenance_comment(self, smoke_csv):
        first = open(smoke_csv).readline()
        assert first.startswith("#") and "vgg16" in first and "tap=" in first

    def test_header_and_width(self, smoke_csv):
        rows = read_data_rows(smoke_csv)
        assert rows[0][:2] == ["object_id", "view_id"]
        assert rows[0][2:] == [f"v{i}" for i in range(4096)]
        assert len(rows) == 1 + 30
        values = np.array([float(x) for x in rows[1][2:]])
        assert values.shape == (4096,)
        assert np.isfinite(values).all()

    def test_rows_sorted_by_filename(self, smoke_csv):
        ids = [(r[0], r[1]) for r in read_data_rows(smoke_csv)[1:]]
        assert ids == sorted(ids)

    def test_post_rectifier_activations_nonnegative(self, smoke_csv):
        for row in read_data_rows(smoke_csv)[1:]:
            assert min(float(x) for x in row[2:]) >= 0.0

    def test_ingestible_by_primary_component(self, smoke_csv):
        # the CSV is the interface: the vault-side reader must accept it as-is
        from visualvault.pipeline import read_embeddings_csv

        embeddings = read_embeddings_csv(smoke_csv)
        assert len(embeddings) == 30
        assert all(e.values.shape == (4096,) for e in embeddings)
        assert {e.object_id for e in embeddings} == {f"obj{i:02d}" for i in range(10)}


class TestDeterminism:
    def test_two_runs_identical(self, smoke_dir, tmp_path):
        subset = tmp_path / "subset"
        subset.mkdir()
        for name in ("obj00_view0.png", "obj01_view1.png", "obj02_view2.png"):
            (subset / name).write_bytes((smoke_dir / name).read_bytes())
        outs = []
        for run in range(2):
            out = tmp_path / f"run{run}.csv"
            extract(
                ExtractorConfig(
                    image_dir=subset, out_csv=out, weights="random", torch_seed=3
                )
            )
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


class TestSmokeSeparation:
    def test_genuine_vs_impostor_majority(self, smoke_csv):
        from visualvault.evalharness import pair_scores
        from visualvault.pipeline import (
            generate_matrix,
            read_embeddings_csv,
            templates_from_embeddings,
        )

        labeled = templates_from_embeddings(
            read_embeddings_csv(smoke_csv), generate_matrix(42)
        )
        scores = pair_scores(labeled)
        assert len(scores.genuine) == 30 and len(scores.impostor) == 45
        wins = sum(1 for g in scores.genuine for i in scores.impostor if g < i)
        total = len(scores.genuine) * len(scores.impostor)
        assert wins / total > 0.5, (
            f"genuine below impostor in only {wins}/{total} cross pairs"
        )
        assert float(np.mean(scores.genuine)) < float(np.mean(scores.impostor))


class TestSkipping:
    def test_unreadable_and_unmatched_files(self, tmp_path):
        images = tmp_path / "imgs"
        images.mkdir()
        draw_object_image(5).save(images / "thing_a.png")
        (images / "broken_b.png").write_bytes(b"not an image at all")
        draw_object_image(6).save(images / "nomatch.png")
        out = tmp_path / "emb.csv"
        config = ExtractorConfig(
            image_dir=images, out_csv=out, weights="random", torch_seed=0
        )
        extract(config)
        skipped_files = {entry["file"] for entry in config.skipped}
        assert skipped_files == {"broken_b.png", "nomatch.png"}
        sidecar = json.loads(Path(str(out) + ".skipped.json").read_text())
        assert {entry["file"] for entry in sidecar} == skipped_files
        assert len(read_data_rows(out)) == 2  # header + the one good image

    def test_empty_directory(self, tmp_path):
        images = tmp_path / "imgs"
        images.mkdir()
        with pytest.raises(ValueError):
            extract(ExtractorConfig(image_dir=images, out_csv=tmp_path / "e.csv"))

    def test_bad_weights_name(self, tmp_path):
        images = tmp_path / "imgs"
        images.mkdir()
        draw_object_image(9).save(images / "thing_a.png")
        with pytest.raises(ValueError, match="weights"):
            extract(
                ExtractorConfig(
                    image_dir=images, out_csv=tmp_path / "e.csv", weights="mystery"
                )
            )


class TestCli:
    def test_end_to_end(self, smoke_dir, tmp_path, capsys):
        subset = tmp_path / "subset"
        subset.mkdir()
        (subset / "obj00_view0.png").write_bytes(
            (smoke_dir / "obj00_view0.png").read_bytes()
        )
        out = tmp_path / "emb.csv"
        code = main(
            ["--images", str(subset), "--out", str(out), "--weights", "random"]
        )
        assert code == 0
        assert "wrote" in capsys.readouterr().out
        assert out.exists()

    def test_missing_directory(self, tmp_path):
        assert (
            main(
                [
                    "--images", str(tmp_path / "nowhere"),
                    "--out", str(tmp_path / "e.csv"),
                    "--weights", "random",
                ]
            )
            == 2
        )
