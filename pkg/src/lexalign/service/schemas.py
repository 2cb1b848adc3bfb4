"""Pydantic request/response models for the HTTP endpoints.

Paths in requests refer to files on the machine running the service;
the CLI runs the service in-process by default, so they are local paths
in the common case.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class DiagnoseRequest(BaseModel):
    src: str
    tgt: str
    gold: str
    samples: int = 10
    sample_size: int = 10
    neighbors_per_node: int = 1
    seed: int = 0
    max_vocab: Optional[int] = None
    normalize: bool = True
    expect_header: bool = True
    out: Optional[str] = None


class DiagnoseResponse(BaseModel):
    mean_delta: float
    per_sample_delta: list[float]
    k_values: list[int]
    pairs_sampled: int
    isomorphic: list[bool]
    isomorphic_count: int
    manifest: dict


class AdversarialOptions(BaseModel):
    epochs: int = 50
    batch_size: int = 64
    hidden_units: int = 256
    discriminator_lr: float = 0.1
    generator_lr: float = 0.05
    lr_decay: float = 0.98
    lr_hold_epochs: int = 0
    generator_momentum: float = 0.0
    label_smoothing: float = 0.1
    vocab_cap: int = 5000


class AlignRequest(BaseModel):
    src: str
    tgt: str
    out_path: str = Field(description="where the matrix file is written")
    mode: Literal["identical", "seed-file", "adversarial"] = "identical"
    seed_dict: Optional[str] = None
    iterations: int = 5
    retrieval: Literal["cosine", "csls"] = "csls"
    csls_k: int = 10
    top_frequent: int = 10000
    max_vocab: Optional[int] = None
    normalize: bool = True
    expect_header: bool = True
    seed: int = 0
    adversarial: AdversarialOptions = AdversarialOptions()
    out: Optional[str] = None


class AlignResponse(BaseModel):
    mode: str
    matrix_path: str
    dim: int
    orthogonality_residual: float
    seed_pairs: Optional[int]
    pairs_used: Optional[int]
    pairs_dropped: Optional[int]
    refine_iterations: int
    dictionary_sizes: list[int]
    adversarial: Optional[dict]
    manifest: dict


class EvaluateRequest(BaseModel):
    src: str
    tgt: str
    matrix: str
    gold: str
    retrieval: Literal["cosine", "csls"] = "csls"
    csls_k: int = 10
    candidates: Optional[int] = None
    max_vocab: Optional[int] = None
    normalize: bool = True
    expect_header: bool = True
    word_class: Optional[str] = None
    predictions_out: Optional[str] = None
    seed: int = 0
    out: Optional[str] = None


class EvaluateResponse(BaseModel):
    p_at_1: float
    evaluated: int
    skipped_oov: int
    skipped_no_gold: int
    groups: dict
    notes: dict
    retrieval: dict
    predictions_path: Optional[str]
    manifest: dict


class DomainSimRequest(BaseModel):
    corpus_a: str
    corpus_b: str
    dictionary: Optional[str] = None
    vocab_cap: Optional[int] = None
    seed: int = 0
    out: Optional[str] = None


class DomainSimResponse(BaseModel):
    js: float
    dsim: float
    tokens: dict
    untranslatable_dropped: Optional[int]
    manifest: dict


class SynthRequest(BaseModel):
    out_dir: str
    n: int = 2000
    d: int = 20
    noise_sigma: float = 0.1
    domain_shift: float = 0.0
    shared_label_fraction: float = 0.3
    transform: Literal["rotation", "rotation+scaling"] = "rotation"
    seed: int = 0
    noise_levels: list[float] = [0.0, 0.2, 0.4, 0.6, 0.8]
    iterations: int = 5
    samples: int = 10
    sample_size: int = 10
    train_fraction: float = 0.1
    retrieval: Literal["cosine", "csls"] = "csls"
    csls_k: int = 10
    out: Optional[str] = None


class SynthResponse(BaseModel):
    files: dict
    rows: list[dict]
    pearson: Optional[float]
    spearman: Optional[float]
    correlation_defined: bool
    manifest: dict


class HealthResponse(BaseModel):
    status: str
    version: str
