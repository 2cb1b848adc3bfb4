"""Command-line interface: a thin client of the HTTP service.

Every subcommand builds a request, sends it to the service (in-process
by default, or a remote instance via ``--server``), and prints the JSON
report to stdout.  Exit codes are stable: 0 success, 2 parse/validation
failure, 3 empty seed, 4 training divergence, 5 zero evaluable queries.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings


def _client(server: str | None):
    import httpx

    if server:
        return httpx.Client(base_url=server, timeout=None)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient
    from .service.app import create_app

    return TestClient(create_app())


def _call(server: str | None, path: str, payload: dict) -> int:
    import httpx

    try:
        with _client(server) as client:
            response = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return 1
    if response.status_code == 200:
        print(json.dumps(response.json(), indent=2, sort_keys=True))
        return 0
    try:
        detail = response.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, dict) and "code" in detail:
        print(f"error: {detail.get('message', 'request failed')}", file=sys.stderr)
        return int(detail["code"])
    print(f"error: HTTP {response.status_code}: {response.text}", file=sys.stderr)
    return 2 if response.status_code == 422 else 1


def _add_space_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--src", required=True, help="source .vec file")
    parser.add_argument("--tgt", required=True, help="target .vec file")
    parser.add_argument("--max-vocab", type=int, default=None)
    parser.add_argument(
        "--no-normalize", action="store_true",
        help="keep raw vector lengths instead of unit-normalizing on load",
    )
    parser.add_argument(
        "--no-header", action="store_true",
        help="the .vec files have no '<count> <dim>' header line",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexalign",
        description="Cross-lingual embedding alignment and alignability diagnostics",
    )
    parser.add_argument(
        "--server", default=None,
        help="base URL of a running service; default runs in-process",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    diagnose = commands.add_parser(
        "diagnose", help="sampled-subgraph spectral similarity and isomorphism checks"
    )
    _add_space_flags(diagnose)
    diagnose.add_argument("--gold", required=True, help="gold dictionary file")
    diagnose.add_argument("--samples", type=int, default=10)
    diagnose.add_argument("--sample-size", type=int, default=10)
    diagnose.add_argument("--neighbors", type=int, default=1)
    diagnose.add_argument("--seed", type=int, default=0)
    diagnose.add_argument("--out", default=None, help="also write the report JSON here")

    align = commands.add_parser("align", help="learn a translation matrix")
    _add_space_flags(align)
    align.add_argument(
        "--mode", choices=["identical", "seed-file", "adversarial"], default="identical"
    )
    align.add_argument("--seed-dict", default=None, help="seed dictionary for mode=seed-file")
    align.add_argument("--iterations", type=int, default=5)
    align.add_argument("--retrieval", choices=["cosine", "csls"], default="csls")
    align.add_argument("--csls-k", type=int, default=10)
    align.add_argument("--top-frequent", type=int, default=10000)
    align.add_argument("--seed", type=int, default=0)
    align.add_argument("--out", required=True, help="where to write the matrix file")
    align.add_argument("--epochs", type=int, default=50)
    align.add_argument("--batch-size", type=int, default=64)
    align.add_argument("--hidden-units", type=int, default=256)
    align.add_argument("--disc-lr", type=float, default=0.1)
    align.add_argument("--gen-lr", type=float, default=0.05)
    align.add_argument("--lr-decay", type=float, default=0.98)
    align.add_argument("--lr-hold-epochs", type=int, default=0)
    align.add_argument("--momentum", type=float, default=0.0)
    align.add_argument("--smoothing", type=float, default=0.1)
    align.add_argument("--adv-vocab-cap", type=int, default=5000)

    evaluate = commands.add_parser("evaluate", help="score P@1 against a gold dictionary")
    _add_space_flags(evaluate)
    evaluate.add_argument("--matrix", required=True, help="translation matrix file")
    evaluate.add_argument("--gold", required=True)
    evaluate.add_argument("--retrieval", choices=["cosine", "csls"], default="csls")
    evaluate.add_argument("--csls-k", type=int, default=10)
    evaluate.add_argument("--candidates", type=int, default=None)
    evaluate.add_argument("--word-class", default=None, help="word<TAB>label file")
    evaluate.add_argument("--predictions-out", default=None, help="write predictions TSV here")
    evaluate.add_argument("--seed", type=int, default=0)
    evaluate.add_argument("--out", default=None, help="also write the report JSON here")

    domainsim = commands.add_parser(
        "domainsim", help="domain similarity (1 - JS divergence) of two corpora"
    )
    domainsim.add_argument("--src", required=True, help="first corpus, plain text")
    domainsim.add_argument("--tgt", required=True, help="second corpus, plain text")
    domainsim.add_argument("--dict", default=None, help="translate the first corpus with this dictionary")
    domainsim.add_argument("--vocab-cap", type=int, default=None)
    domainsim.add_argument("--seed", type=int, default=0)
    domainsim.add_argument("--out", default=None)

    synth = commands.add_parser(
        "synth", help="generate a synthetic pair and run the noise sweep"
    )
    synth.add_argument("--n", type=int, default=2000)
    synth.add_argument("--d", type=int, default=20)
    synth.add_argument("--sigma", type=float, default=0.1)
    synth.add_argument("--shift", type=float, default=0.0)
    synth.add_argument("--shared", type=float, default=0.3)
    synth.add_argument(
        "--transform", choices=["rotation", "rotation+scaling"], default="rotation"
    )
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument(
        "--noise-levels", default="0,0.2,0.4,0.6,0.8",
        help="comma-separated sigmas for the sweep",
    )
    synth.add_argument("--iterations", type=int, default=5)
    synth.add_argument("--samples", type=int, default=10)
    synth.add_argument("--sample-size", type=int, default=10)
    synth.add_argument("--train-fraction", type=float, default=0.1)
    synth.add_argument("--retrieval", choices=["cosine", "csls"], default="csls")
    synth.add_argument("--csls-k", type=int, default=10)
    synth.add_argument("--out", required=True, help="output directory")

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("lexalign.service.app:app", host=args.host, port=args.port)
        return 0

    if args.command == "diagnose":
        payload = {
            "src": args.src,
            "tgt": args.tgt,
            "gold": args.gold,
            "samples": args.samples,
            "sample_size": args.sample_size,
            "neighbors_per_node": args.neighbors,
            "seed": args.seed,
            "max_vocab": args.max_vocab,
            "normalize": not args.no_normalize,
            "expect_header": not args.no_header,
            "out": args.out,
        }
        return _call(args.server, "/diagnose", payload)

    if args.command == "align":
        payload = {
            "src": args.src,
            "tgt": args.tgt,
            "out_path": args.out,
            "mode": args.mode,
            "seed_dict": args.seed_dict,
            "iterations": args.iterations,
            "retrieval": args.retrieval,
            "csls_k": args.csls_k,
            "top_frequent": args.top_frequent,
            "max_vocab": args.max_vocab,
            "normalize": not args.no_normalize,
            "expect_header": not args.no_header,
            "seed": args.seed,
            "adversarial": {
                "epochs": args.epochs,
                "batch_size": args.batch_size,
                "hidden_units": args.hidden_units,
                "discriminator_lr": args.disc_lr,
                "generator_lr": args.gen_lr,
                "lr_decay": args.lr_decay,
                "lr_hold_epochs": args.lr_hold_epochs,
                "generator_momentum": args.momentum,
                "label_smoothing": args.smoothing,
                "vocab_cap": args.adv_vocab_cap,
            },
        }
        return _call(args.server, "/align", payload)

    if args.command == "evaluate":
        payload = {
            "src": args.src,
            "tgt": args.tgt,
            "matrix": args.matrix,
            "gold": args.gold,
            "retrieval": args.retrieval,
            "csls_k": args.csls_k,
            "candidates": args.candidates,
            "max_vocab": args.max_vocab,
            "normalize": not args.no_normalize,
            "expect_header": not args.no_header,
            "word_class": args.word_class,
            "predictions_out": args.predictions_out,
            "seed": args.seed,
            "out": args.out,
        }
        return _call(args.server, "/evaluate", payload)

    if args.command == "domainsim":
        payload = {
            "corpus_a": args.src,
            "corpus_b": args.tgt,
            "dictionary": args.dict,
            "vocab_cap": args.vocab_cap,
            "seed": args.seed,
            "out": args.out,
        }
        return _call(args.server, "/domainsim", payload)

    if args.command == "synth":
        try:
            levels = [float(x) for x in args.noise_levels.split(",") if x.strip()]
        except ValueError:
            print(f"error: bad --noise-levels {args.noise_levels!r}", file=sys.stderr)
            return 2
        payload = {
            "out_dir": args.out,
            "n": args.n,
            "d": args.d,
            "noise_sigma": args.sigma,
            "domain_shift": args.shift,
            "shared_label_fraction": args.shared,
            "transform": args.transform,
            "seed": args.seed,
            "noise_levels": levels,
            "iterations": args.iterations,
            "samples": args.samples,
            "sample_size": args.sample_size,
            "train_fraction": args.train_fraction,
            "retrieval": args.retrieval,
            "csls_k": args.csls_k,
        }
        return _call(args.server, "/synth", payload)

    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
