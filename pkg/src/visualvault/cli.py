"""Command-line surface: parameter management, enrollment, recovery, evaluation.

Exit codes: 0 success, 1 no-match (or a failed validation report), 2
malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import evalharness, params as params_mod, pipeline, vault

EXIT_OK = 0
EXIT_NO_MATCH = 1
EXIT_MALFORMED = 2


def _err(msg: str) -> None:
    print(f"visualvault: {msg}", file=sys.stderr)


def _rng(args) -> random.Random | None:
    return random.Random(args.rng_seed) if args.rng_seed is not None else None


def _load_embedding(path: str, selector: str) -> pipeline.Embedding:
    if ":" not in selector:
        raise ValueError(f"selector must be OBJECT:VIEW, got {selector!r}")
    object_id, view_id = selector.split(":", 1)
    for e in pipeline.read_embeddings_csv(path):
        if e.object_id == object_id and e.view_id == view_id:
            return e
    raise ValueError(f"no embedding row {object_id}:{view_id} in {path}")


def _read_seed(args) -> bytes:
    if args.seed_hex:
        seed = bytes.fromhex(args.seed_hex)
    else:
        seed = bytes.fromhex(Path(args.seed_file).read_text().strip())
    if not vault.MIN_SEED_LEN <= len(seed) <= vault.MAX_SEED_LEN:
        raise ValueError(
            f"seed must be {vault.MIN_SEED_LEN}-{vault.MAX_SEED_LEN} bytes, got {len(seed)}"
        )
    return seed


def cmd_params_gen(args) -> int:
    try:
        generated = params_mod.generate(
            n=args.n,
            r=args.r,
            lambda_target=args.lambda_target,
            universe_size=args.universe,
            rng=_rng(args),
            progress=lambda k: print(f"  ...{k} candidates tested", file=sys.stderr),
        )
    except params_mod.ParameterError as exc:
        report = params_mod.validate(
            params_mod.SystemParams(
                n=args.n,
                r=args.r,
                lambda_target=args.lambda_target,
                universe_size=args.universe,
            )
        )
        print(report.render())
        _err(str(exc))
        return EXIT_NO_MATCH
    report = params_mod.validate(generated)
    params_mod.save_params(generated, args.out)
    print(report.render())
    print(f"wrote {args.out} (q: {generated.q_bits} bits)")
    return EXIT_OK if report.passed else EXIT_NO_MATCH


def cmd_params_validate(args) -> int:
    try:
        loaded = params_mod.load_params(args.params)
    except params_mod.ParameterError as exc:
        _err(str(exc))
        return EXIT_MALFORMED
    report = params_mod.validate(loaded)
    print(report.render())
    return EXIT_OK if report.passed else EXIT_NO_MATCH


def cmd_matrix_gen(args) -> int:
    m = pipeline.generate_matrix(args.seed)
    pipeline.save_matrix(m, args.out, include_entries=args.include_entries)
    print(f"wrote {args.out} ({m.rows}x{m.cols}, seed {m.seed})")
    return EXIT_OK


def cmd_enroll(args) -> int:
    try:
        system = params_mod.load_params(args.params)
        matrix = pipeline.load_matrix(args.matrix)
        seed = _read_seed(args)
        embeddings = [_load_embedding(args.embeddings, sel) for sel in args.select]
    except (ValueError, OSError) as exc:
        _err(str(exc))
        return EXIT_MALFORMED
    rng = _rng(args)
    templates = [pipeline.binarize(e, matrix) for e in embeddings]
    for sel, t in zip(args.select, templates):
        print(f"{sel} template {t.to_hex()}")
    try:
        if args.multi or len(templates) > 1:
            record: vault.VaultRecord | vault.MultiVault = vault.enroll_multi(
                templates, seed, system, rng
            )
        else:
            record = vault.enroll(templates[0], seed, system, rng)
    except (ValueError, params_mod.ParameterError) as exc:
        _err(str(exc))
        return EXIT_MALFORMED
    vault.save_record(record, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_recover(args) -> int:
    try:
        record = vault.load_record(args.vault)
    except vault.MalformedRecordError as exc:
        _err(f"malformed record: {exc}")
        return EXIT_MALFORMED
    try:
        matrix = pipeline.load_matrix(args.matrix)
        embeddings = [_load_embedding(args.embeddings, sel) for sel in args.select]
        probes = [pipeline.binarize(e, matrix) for e in embeddings]
    except (ValueError, OSError) as exc:
        _err(str(exc))
        return EXIT_MALFORMED
    try:
        if isinstance(record, vault.MultiVault):
            seed = vault.retrieve_multi(record, probes)
        else:
            if len(probes) != 1:
                _err(f"vault holds one object but {len(probes)} selectors given")
                return EXIT_MALFORMED
            seed = vault.retrieve_seed(record, probes[0])
    except (vault.MalformedRecordError, ValueError) as exc:
        _err(f"malformed record: {exc}")
        return EXIT_MALFORMED
    if seed is None:
        _err("no match")
        return EXIT_NO_MATCH
    print(seed.hex())
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        if args.templates:
            labeled = pipeline.read_templates_csv(args.templates)
        else:
            if not (args.embeddings and args.matrix):
                raise ValueError("need --templates or both --embeddings and --matrix")
            matrix = pipeline.load_matrix(args.matrix)
            labeled = pipeline.templates_from_embeddings(
                pipeline.read_embeddings_csv(args.embeddings), matrix
            )
        if args.cross:
            if not args.templates_b:
                raise ValueError("--cross needs --templates-b")
            other = pipeline.read_templates_csv(args.templates_b)
            count, ratio = evalharness.cross_fa_count(
                [t for _, _, t in labeled], [t for _, _, t in other], args.r
            )
            result = {
                "count": count,
                "ratio": ratio,
                "n_probes": len(labeled),
                "n_references": len(other),
            }
            print(json.dumps(result, indent=2))
            return EXIT_OK
        scores = evalharness.pair_scores(labeled)
    except (ValueError, OSError) as exc:
        _err(str(exc))
        return EXIT_MALFORMED
    n_bits = labeled[0][2].n
    points = evalharness.det_curve(scores, n=n_bits)
    evalharness.write_det_csv(points, args.det_out)
    summary = evalharness.summarize(scores, args.r)
    evalharness.write_summary_json(summary, args.summary_out)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="visualvault",
        description="Wallet-seed vault unlocked by a visual password.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params-gen", help="generate and validate system parameters")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--r", type=int, default=140)
    p.add_argument("--lambda", type=int, default=87, dest="lambda_target")
    p.add_argument("--universe", type=int, default=1024)
    p.add_argument("--rng-seed", type=int, default=None)
    p.add_argument("--out", default="params.json")
    p.set_defaults(func=cmd_params_gen)

    p = sub.add_parser("params-validate", help="re-run validation on a parameter file")
    p.add_argument("--params", required=True)
    p.set_defaults(func=cmd_params_validate)

    p = sub.add_parser("matrix-gen", help="generate the sparse projection matrix")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="matrix.json")
    p.add_argument("--include-entries", action="store_true")
    p.set_defaults(func=cmd_matrix_gen)

    p = sub.add_parser("enroll", help="bind a seed to one or more embedding rows")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--select", action="append", required=True, metavar="OBJECT:VIEW")
    p.add_argument("--multi", action="store_true", help="write a multi-object vault")
    seed_group = p.add_mutually_exclusive_group(required=True)
    seed_group.add_argument("--seed-hex")
    seed_group.add_argument("--seed-file")
    p.add_argument("--params", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--out", default="vault.json")
    p.add_argument("--rng-seed", type=int, default=None)
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("recover", help="retrieve the seed with a fresh view")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--select", action="append", required=True, metavar="OBJECT:VIEW")
    p.add_argument("--vault", required=True)
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("eval", help="score a labeled template set")
    p.add_argument("--templates")
    p.add_argument("--embeddings")
    p.add_argument("--matrix")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--det-out", default="det.csv")
    p.add_argument("--summary-out", default="summary.json")
    p.add_argument("--cross", action="store_true", help="cross false-accept count mode")
    p.add_argument("--templates-b")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
