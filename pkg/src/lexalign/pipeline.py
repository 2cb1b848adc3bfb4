"""End-to-end pipeline runs shared by the HTTP service and the CLI.

Each ``run_*`` function loads its inputs, executes one pipeline, writes
any requested artifacts, and returns a JSON-ready report that embeds a
manifest (command, config snapshot, input digests, seed, version,
timings) so every report is self-describing and reproducible.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import time

from . import __version__
from .corpus import domain_similarity, term_distribution, translate_tokens
from .dictionaries import load_dictionary, save_dictionary
from .embeddings import EmbeddingSpace, load_vec, normalize, save_vec
from .errors import ParseError
from .graphs import sampled_subgraph_similarity, vf2_isomorphic
from .mapping import (
    AdversarialConfig,
    adversarial_init,
    identical_seed,
    load_matrix,
    procrustes,
    refine,
    save_matrix,
)
from .retrieval import (
    RetrievalConfig,
    breakdown_report,
    frequency_bin,
    homograph_class,
    load_word_class_map,
    translate,
)
from .synthetic import SynthSpec, correlation_suite, make_pair


def _sha256(path: str | os.PathLike) -> str:
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as handle:
            for chunk in iter(lambda: handle.read(65536), b""):
                digest.update(chunk)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return digest.hexdigest()


def build_manifest(command: str, seed: int, config: dict, inputs: dict) -> dict:
    """Self-description embedded in every report; timings filled at the end."""
    return {
        "command": command,
        "version": __version__,
        "seed": seed,
        "config": config,
        "inputs": {
            name: {"path": str(path), "sha256": _sha256(path)}
            for name, path in inputs.items()
            if path is not None
        },
        "timings": {},
    }


def write_json(report: dict, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as out:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")


def _load_space(path, max_vocab, expect_header, normalize_spaces) -> EmbeddingSpace:
    space = load_vec(path, max_vocab=max_vocab, expect_header=expect_header)
    return normalize(space) if normalize_spaces else space


def _read_tokens(path) -> list[str]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read().split()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def run_diagnose(
    src_path: str,
    tgt_path: str,
    gold_path: str,
    samples: int = 10,
    sample_size: int = 10,
    neighbors_per_node: int = 1,
    seed: int = 0,
    max_vocab: int | None = None,
    normalize_spaces: bool = True,
    expect_header: bool = True,
    out: str | None = None,
) -> dict:
    """Sampled-subgraph spectral similarity plus per-sample isomorphism."""
    started = time.perf_counter()
    config = {
        "samples": samples,
        "sample_size": sample_size,
        "neighbors_per_node": neighbors_per_node,
        "max_vocab": max_vocab,
        "normalize": normalize_spaces,
    }
    manifest = build_manifest(
        "diagnose", seed, config,
        {"source": src_path, "target": tgt_path, "gold": gold_path},
    )
    src = _load_space(src_path, max_vocab, expect_header, normalize_spaces)
    tgt = _load_space(tgt_path, max_vocab, expect_header, normalize_spaces)
    gold = load_dictionary(gold_path)

    result = sampled_subgraph_similarity(
        src, tgt, gold,
        num_samples=samples,
        sample_size=sample_size,
        seed=seed,
        neighbors_per_node=neighbors_per_node,
    )
    isomorphic = [
        vf2_isomorphic(s.source_graph, s.target_graph) for s in result.samples
    ]
    report = {
        "mean_delta": result.mean_delta,
        "per_sample_delta": [s.similarity.delta for s in result.samples],
        "k_values": [s.similarity.k_used for s in result.samples],
        "pairs_sampled": samples * sample_size,
        "isomorphic": isomorphic,
        "isomorphic_count": sum(isomorphic),
        "manifest": manifest,
    }
    manifest["timings"]["total_seconds"] = round(time.perf_counter() - started, 6)
    if out:
        write_json(report, out)
    return report


def run_align(
    src_path: str,
    tgt_path: str,
    out_path: str,
    mode: str = "identical",
    seed_dict_path: str | None = None,
    iterations: int = 5,
    retrieval: str = "csls",
    csls_k: int = 10,
    top_frequent: int = 10000,
    max_vocab: int | None = None,
    normalize_spaces: bool = True,
    expect_header: bool = True,
    seed: int = 0,
    epochs: int = 50,
    batch_size: int = 64,
    hidden_units: int = 256,
    discriminator_lr: float = 0.1,
    generator_lr: float = 0.05,
    lr_decay: float = 0.98,
    lr_hold_epochs: int = 0,
    generator_momentum: float = 0.0,
    label_smoothing: float = 0.1,
    adversarial_vocab_cap: int = 5000,
    out: str | None = None,
) -> dict:
    """Initialize a translation matrix, refine it, and write it to disk."""
    started = time.perf_counter()
    if mode not in ("identical", "seed-file", "adversarial"):
        raise ParseError(f"unknown alignment mode {mode!r}")
    if mode == "seed-file" and not seed_dict_path:
        raise ParseError("mode=seed-file requires a seed dictionary path")
    config = {
        "mode": mode,
        "iterations": iterations,
        "retrieval": retrieval,
        "csls_k": csls_k,
        "top_frequent": top_frequent,
        "max_vocab": max_vocab,
        "normalize": normalize_spaces,
    }
    if mode == "adversarial":
        config["adversarial"] = {
            "epochs": epochs,
            "batch_size": batch_size,
            "hidden_units": hidden_units,
            "discriminator_lr": discriminator_lr,
            "generator_lr": generator_lr,
            "lr_decay": lr_decay,
            "lr_hold_epochs": lr_hold_epochs,
            "generator_momentum": generator_momentum,
            "label_smoothing": label_smoothing,
            "vocab_cap": adversarial_vocab_cap,
        }
    manifest = build_manifest(
        "align", seed, config,
        {"source": src_path, "target": tgt_path, "seed_dict": seed_dict_path},
    )
    src = _load_space(src_path, max_vocab, expect_header, normalize_spaces)
    tgt = _load_space(tgt_path, max_vocab, expect_header, normalize_spaces)
    cfg = RetrievalConfig(method=retrieval, csls_k=csls_k)

    seed_pairs = None
    pairs_used = None
    pairs_dropped = None
    adversarial_summary = None
    if mode == "adversarial":
        adv_cfg = AdversarialConfig(
            epochs=epochs,
            batch_size=batch_size,
            discriminator_hidden_units=hidden_units,
            discriminator_lr=discriminator_lr,
            generator_lr=generator_lr,
            lr_decay=lr_decay,
            lr_hold_epochs=lr_hold_epochs,
            generator_momentum=generator_momentum,
            label_smoothing=label_smoothing,
            vocab_cap=adversarial_vocab_cap,
            seed=seed,
        )
        result = adversarial_init(src, tgt, adv_cfg)
        w = result.matrix
        adversarial_summary = {
            "epochs": epochs,
            "final_discriminator_accuracy": (
                result.trace[-1].discriminator_accuracy if result.trace else None
            ),
            "trace": [dataclasses.asdict(t) for t in result.trace],
        }
    else:
        if mode == "identical":
            seed_dict = identical_seed(src, tgt)
        else:
            seed_dict = load_dictionary(seed_dict_path, provenance="gold")
        seed_pairs = len(seed_dict)
        fit = procrustes(src, tgt, seed_dict)
        w = fit.matrix
        pairs_used = fit.pairs_used
        pairs_dropped = fit.pairs_dropped

    refined = refine(src, tgt, w, iterations=iterations, top_frequent=top_frequent, cfg=cfg)
    save_matrix(refined.matrix, out_path)

    report = {
        "mode": mode,
        "matrix_path": str(out_path),
        "dim": refined.matrix.dim,
        "orthogonality_residual": refined.matrix.orthogonality_residual,
        "seed_pairs": seed_pairs,
        "pairs_used": pairs_used,
        "pairs_dropped": pairs_dropped,
        "refine_iterations": iterations,
        "dictionary_sizes": refined.dictionary_sizes,
        "adversarial": adversarial_summary,
        "manifest": manifest,
    }
    manifest["timings"]["total_seconds"] = round(time.perf_counter() - started, 6)
    if out:
        write_json(report, out)
    return report


def _write_predictions_tsv(
    path, predictions, gold, src, tgt, correct_flags, word_class_map
) -> None:
    gold_map = {s: set(ts) for s, ts in gold.by_source().items()}
    with open(path, "w", encoding="utf-8") as handle:
        header = ["query", "prediction", "score", "correct", "frequency", "homograph"]
        if word_class_map is not None:
            header.append("word_class")
        handle.write("\t".join(header) + "\n")
        for pred, correct in zip(predictions, correct_flags):
            rank = src.frequency_rank(pred.query)
            row = [
                pred.query,
                pred.target,
                repr(pred.score),
                "1" if correct else "0",
                frequency_bin(rank),
                homograph_class(pred.query, gold_map.get(pred.query, set()), tgt),
            ]
            if word_class_map is not None:
                row.append(word_class_map.get(pred.query, "other"))
            handle.write("\t".join(row) + "\n")


def run_evaluate(
    src_path: str,
    tgt_path: str,
    matrix_path: str,
    gold_path: str,
    retrieval: str = "csls",
    csls_k: int = 10,
    candidates: int | None = None,
    max_vocab: int | None = None,
    normalize_spaces: bool = True,
    expect_header: bool = True,
    word_class_path: str | None = None,
    predictions_out: str | None = None,
    seed: int = 0,
    out: str | None = None,
) -> dict:
    """Translate the gold queries, score P@1, and emit grouped breakdowns."""
    started = time.perf_counter()
    config = {
        "retrieval": retrieval,
        "csls_k": csls_k,
        "candidates": candidates,
        "max_vocab": max_vocab,
        "normalize": normalize_spaces,
    }
    manifest = build_manifest(
        "evaluate", seed, config,
        {
            "source": src_path,
            "target": tgt_path,
            "matrix": matrix_path,
            "gold": gold_path,
            "word_class": word_class_path,
        },
    )
    src = _load_space(src_path, max_vocab, expect_header, normalize_spaces)
    tgt = _load_space(tgt_path, max_vocab, expect_header, normalize_spaces)
    w = load_matrix(matrix_path)
    gold = load_dictionary(gold_path)
    word_class_map = load_word_class_map(word_class_path) if word_class_path else None
    cfg = RetrievalConfig(method=retrieval, csls_k=csls_k, candidates=candidates)

    result = translate(gold.sources(), src, tgt, w, cfg)
    report_data = breakdown_report(result.predictions, gold, src, tgt, word_class_map)
    report_data.skipped_oov = len(result.skipped_oov)

    if predictions_out:
        gold_map = {s: set(ts) for s, ts in gold.by_source().items()}
        flags = [p.target in gold_map.get(p.query, set()) for p in result.predictions]
        _write_predictions_tsv(
            predictions_out, result.predictions, gold, src, tgt, flags, word_class_map
        )

    report = {
        "p_at_1": report_data.p_at_1,
        "evaluated": report_data.evaluated,
        "skipped_oov": report_data.skipped_oov,
        "skipped_no_gold": report_data.skipped_no_gold,
        "groups": {
            family: {
                label: dataclasses.asdict(score) for label, score in members.items()
            }
            for family, members in report_data.groups.items()
        },
        "notes": report_data.notes,
        "retrieval": config,
        "predictions_path": str(predictions_out) if predictions_out else None,
        "manifest": manifest,
    }
    manifest["timings"]["total_seconds"] = round(time.perf_counter() - started, 6)
    if out:
        write_json(report, out)
    return report


def run_domainsim(
    corpus_a_path: str,
    corpus_b_path: str,
    dict_path: str | None = None,
    vocab_cap: int | None = None,
    seed: int = 0,
    out: str | None = None,
) -> dict:
    """Domain similarity (1 - Jensen-Shannon divergence) of two corpora.

    With a dictionary the first corpus is token-translated before the
    term distributions are compared.
    """
    started = time.perf_counter()
    config = {"vocab_cap": vocab_cap, "translated": dict_path is not None}
    manifest = build_manifest(
        "domainsim", seed, config,
        {"corpus_a": corpus_a_path, "corpus_b": corpus_b_path, "dictionary": dict_path},
    )
    tokens_a = _read_tokens(corpus_a_path)
    tokens_b = _read_tokens(corpus_b_path)
    dropped = None
    if dict_path:
        dictionary = load_dictionary(dict_path)
        tokens_a, dropped = translate_tokens(tokens_a, dictionary)
        if not tokens_a:
            raise ParseError("no tokens of the first corpus are translatable")
    dist_a = term_distribution(tokens_a, vocab_cap)
    dist_b = term_distribution(tokens_b, vocab_cap)
    js, dsim = domain_similarity(dist_a, dist_b)
    report = {
        "js": js,
        "dsim": dsim,
        "tokens": {"corpus_a": len(tokens_a), "corpus_b": len(tokens_b)},
        "untranslatable_dropped": dropped,
        "manifest": manifest,
    }
    manifest["timings"]["total_seconds"] = round(time.perf_counter() - started, 6)
    if out:
        write_json(report, out)
    return report


def run_synth(
    out_dir: str,
    n: int = 2000,
    d: int = 20,
    noise_sigma: float = 0.1,
    domain_shift: float = 0.0,
    shared_label_fraction: float = 0.3,
    transform: str = "rotation",
    seed: int = 0,
    noise_levels: tuple[float, ...] = (0.0, 0.2, 0.4, 0.6, 0.8),
    iterations: int = 5,
    samples: int = 10,
    sample_size: int = 10,
    train_fraction: float = 0.1,
    retrieval: str = "csls",
    csls_k: int = 10,
    out: str | None = None,
) -> dict:
    """Write a synthetic .vec pair plus gold, and run the noise sweep."""
    started = time.perf_counter()
    spec = SynthSpec(
        n=n,
        d=d,
        noise_sigma=noise_sigma,
        transform=transform,
        domain_shift=domain_shift,
        shared_label_fraction=shared_label_fraction,
        seed=seed,
    )
    config = dataclasses.asdict(spec)
    config.update(
        {
            "noise_levels": list(noise_levels),
            "iterations": iterations,
            "samples": samples,
            "sample_size": sample_size,
            "train_fraction": train_fraction,
            "retrieval": retrieval,
            "csls_k": csls_k,
        }
    )
    manifest = build_manifest("synth", seed, config, {})

    os.makedirs(out_dir, exist_ok=True)
    pair = make_pair(spec)
    src_path = os.path.join(out_dir, "synth-src.vec")
    tgt_path = os.path.join(out_dir, "synth-tgt.vec")
    gold_path = os.path.join(out_dir, "synth-gold.txt")
    csv_path = os.path.join(out_dir, "suite.csv")
    save_vec(pair.source, src_path)
    save_vec(pair.target, tgt_path)
    save_dictionary(pair.gold, gold_path)

    suite = correlation_suite(
        list(noise_levels),
        spec,
        train_fraction=train_fraction,
        iterations=iterations,
        retrieval_cfg=RetrievalConfig(method=retrieval, csls_k=csls_k),
        num_samples=samples,
        sample_size=sample_size,
    )
    with open(csv_path, "w", encoding="utf-8") as handle:
        handle.write("sigma,mean_delta,p_at_1\n")
        for row in suite.rows:
            handle.write(f"{row.sigma!r},{row.mean_delta!r},{row.p_at_1!r}\n")

    report = {
        "files": {
            "source": src_path,
            "target": tgt_path,
            "gold": gold_path,
            "suite_csv": csv_path,
        },
        "rows": [dataclasses.asdict(row) for row in suite.rows],
        "pearson": suite.correlation.pearson,
        "spearman": suite.correlation.spearman,
        "correlation_defined": suite.correlation.defined,
        "manifest": manifest,
    }
    manifest["timings"]["total_seconds"] = round(time.perf_counter() - started, 6)
    if out:
        write_json(report, out)
    return report
