"""FastAPI application exposing the pipeline as HTTP endpoints.

Toolkit failures become HTTP 400 responses whose detail carries the
stable exit code ({"code": ..., "message": ...}), which the CLI maps
back onto its process exit status.
"""

from __future__ import annotations

import functools

from fastapi import FastAPI, HTTPException

from .. import __version__, pipeline
from ..errors import ToolkitError
from . import schemas


def _toolkit_errors(endpoint):
    @functools.wraps(endpoint)
    def wrapped(*args, **kwargs):
        try:
            return endpoint(*args, **kwargs)
        except ToolkitError as exc:
            raise HTTPException(
                status_code=400,
                detail={"code": exc.exit_code, "message": str(exc)},
            ) from exc

    return wrapped


def create_app() -> FastAPI:
    app = FastAPI(
        title="lexalign",
        version=__version__,
        description=(
            "Cross-lingual embedding alignment, dictionary induction, and "
            "alignability diagnostics"
        ),
    )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/diagnose", response_model=schemas.DiagnoseResponse)
    @_toolkit_errors
    def diagnose(request: schemas.DiagnoseRequest):
        return pipeline.run_diagnose(
            request.src,
            request.tgt,
            request.gold,
            samples=request.samples,
            sample_size=request.sample_size,
            neighbors_per_node=request.neighbors_per_node,
            seed=request.seed,
            max_vocab=request.max_vocab,
            normalize_spaces=request.normalize,
            expect_header=request.expect_header,
            out=request.out,
        )

    @app.post("/align", response_model=schemas.AlignResponse)
    @_toolkit_errors
    def align(request: schemas.AlignRequest):
        adv = request.adversarial
        return pipeline.run_align(
            request.src,
            request.tgt,
            request.out_path,
            mode=request.mode,
            seed_dict_path=request.seed_dict,
            iterations=request.iterations,
            retrieval=request.retrieval,
            csls_k=request.csls_k,
            top_frequent=request.top_frequent,
            max_vocab=request.max_vocab,
            normalize_spaces=request.normalize,
            expect_header=request.expect_header,
            seed=request.seed,
            epochs=adv.epochs,
            batch_size=adv.batch_size,
            hidden_units=adv.hidden_units,
            discriminator_lr=adv.discriminator_lr,
            generator_lr=adv.generator_lr,
            lr_decay=adv.lr_decay,
            lr_hold_epochs=adv.lr_hold_epochs,
            generator_momentum=adv.generator_momentum,
            label_smoothing=adv.label_smoothing,
            adversarial_vocab_cap=adv.vocab_cap,
            out=request.out,
        )

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    @_toolkit_errors
    def evaluate(request: schemas.EvaluateRequest):
        return pipeline.run_evaluate(
            request.src,
            request.tgt,
            request.matrix,
            request.gold,
            retrieval=request.retrieval,
            csls_k=request.csls_k,
            candidates=request.candidates,
            max_vocab=request.max_vocab,
            normalize_spaces=request.normalize,
            expect_header=request.expect_header,
            word_class_path=request.word_class,
            predictions_out=request.predictions_out,
            seed=request.seed,
            out=request.out,
        )

    @app.post("/domainsim", response_model=schemas.DomainSimResponse)
    @_toolkit_errors
    def domainsim(request: schemas.DomainSimRequest):
        return pipeline.run_domainsim(
            request.corpus_a,
            request.corpus_b,
            dict_path=request.dictionary,
            vocab_cap=request.vocab_cap,
            seed=request.seed,
            out=request.out,
        )

    @app.post("/synth", response_model=schemas.SynthResponse)
    @_toolkit_errors
    def synth(request: schemas.SynthRequest):
        return pipeline.run_synth(
            request.out_dir,
            n=request.n,
            d=request.d,
            noise_sigma=request.noise_sigma,
            domain_shift=request.domain_shift,
            shared_label_fraction=request.shared_label_fraction,
            transform=request.transform,
            seed=request.seed,
            noise_levels=tuple(request.noise_levels),
            iterations=request.iterations,
            samples=request.samples,
            sample_size=request.sample_size,
            train_fraction=request.train_fraction,
            retrieval=request.retrieval,
            csls_k=request.csls_k,
            out=request.out,
        )

    return app


app = create_app()
