"""FastAPI application wrapping the core package.

Each endpoint resolves a graph source, runs the requested operation and
returns both a structured summary and the file artifacts (CSV/JSON/edge
lists) as text, so remote or in-process clients can persist them wherever
they want.
"""
from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..access import AccessSession
from ..errors import (
    BudgetExhausted,
    CapabilityUnavailable,
    DomainError,
    EmptyGraph,
    NodeNotFound,
    ParseError,
    RewalkError,
    TooLarge,
)
from ..estimation import estimate_report_csv, importance_estimate
from ..experiments import population_mean, resolve_graph, run_experiment, verify_overlay
from ..generators import barbell, coords_sidecar_text, latent_space
from ..graph import edgelist_text, export_overlay_text, giant_component
from ..rewiring import audit_csv
from ..samplers import SamplerConfig, Walker, samples_csv, trace_csv
from ..spectral import spectral_report_json_dict
from .schemas import (
    EstimateResponse,
    ExperimentRequest,
    ExperimentResponse,
    GenerateRequest,
    GenerateResponse,
    SampleResponse,
    SpectralRequest,
    SpectralResponse,
    VerifyOverlayRequest,
    VerifyOverlayResponse,
    WalkRequest,
)

_NOT_FOUND = (NodeNotFound,)
_BAD_REQUEST = (
    DomainError,
    ParseError,
    EmptyGraph,
    TooLarge,
    BudgetExhausted,
    CapabilityUnavailable,
)


def create_app() -> FastAPI:
    app = FastAPI(title="rewalk", version=__version__)

    @app.exception_handler(RewalkError)
    async def _rewalk_error(request: Request, exc: RewalkError) -> JSONResponse:
        status = 404 if isinstance(exc, _NOT_FOUND) else 400 if isinstance(exc, _BAD_REQUEST) else 422
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/generate", response_model=GenerateResponse)
    def generate(req: GenerateRequest) -> GenerateResponse:
        files: dict[str, str] = {}
        if req.barbell is not None:
            graph = barbell(req.barbell)
        else:
            assert req.latent is not None
            graph, coords = latent_space(req.latent.to_config())
            files["coords.txt"] = coords_sidecar_text(coords)
        if req.giant_component:
            graph, _ = giant_component(graph)
        files["graph.edgelist"] = edgelist_text(graph)
        return GenerateResponse(nodes=graph.num_nodes, edges=graph.num_edges, files=files)

    def _run_walk(req: WalkRequest):
        graph, attrs = resolve_graph(req.graph.to_source())
        session = AccessSession(graph, attributes=attrs, budget=req.budget)
        config = SamplerConfig(
            scheme=req.scheme,
            jump_prob=req.jump_prob,
            replace_prob=req.replace_prob,
            geweke_threshold=req.geweke_threshold,
            sample_size=req.sample_size,
            start_node=req.start,
            step_cap=req.step_cap,
            attribute=req.attribute,
        )
        walker = Walker(session, config, seed=req.seed)
        samples = walker.run_walk()
        return graph, attrs, session, walker, samples

    @app.post("/sample", response_model=SampleResponse)
    def sample(req: WalkRequest) -> SampleResponse:
        _, _, session, walker, samples = _run_walk(req)
        files = {
            "samples.csv": samples_csv(samples),
            "trace.csv": trace_csv(walker),
            "queries.txt": session.ledger.export_state(),
        }
        if walker.ledger is not None:
            files["overlay.edgelist"] = export_overlay_text(walker.ledger.base, walker.ledger)
            files["rewiring_audit.csv"] = audit_csv(walker.events)
        return SampleResponse(
            scheme=req.scheme,
            samples=[e.node for e in samples.entries],
            weights=[e.weight for e in samples.entries],
            unique_queries=session.unique_queries,
            steps=walker.state.steps,
            geweke_z=walker.last_geweke.z if walker.last_geweke else None,
            files=files,
        )

    @app.post("/estimate", response_model=EstimateResponse)
    def estimate(req: WalkRequest) -> EstimateResponse:
        graph, attrs, session, walker, samples = _run_walk(req)
        value = importance_estimate(samples, req.attribute)
        truth = population_mean(graph, attrs, req.attribute)
        rel = abs(value - truth) / abs(truth) if truth else None
        z = walker.last_geweke.z if walker.last_geweke else None
        files = {
            "estimates.csv": estimate_report_csv(
                [
                    {
                        "scheme": req.scheme,
                        "attribute": req.attribute,
                        "N": len(samples),
                        "estimate": value,
                        "relative_error": rel,
                        "unique_queries": session.unique_queries,
                        "geweke_z": z,
                    }
                ]
            ),
            "queries.txt": session.ledger.export_state(),
        }
        return EstimateResponse(
            scheme=req.scheme,
            attribute=req.attribute,
            estimate=value,
            truth=truth,
            relative_error=rel,
            unique_queries=session.unique_queries,
            geweke_z=z,
            files=files,
        )

    @app.post("/spectral", response_model=SpectralResponse)
    def spectral(req: SpectralRequest) -> SpectralResponse:
        graph, _ = resolve_graph(req.graph.to_source())
        delta_ts = tuple(range(req.delta_t_max + 1)) if req.delta_t_max > 0 else ()
        report = spectral_report_json_dict(graph, delta_ts=delta_ts, want_conductance=req.conductance)
        files = {"spectral.json": json.dumps(report, indent=2, sort_keys=True) + "\n"}
        return SpectralResponse(
            phi=report["phi"],
            cut=report["cut"],
            slem=report["slem"],
            mixing_time=report["mixing_time"],
            mixing_time_infinite=report["mixing_time_infinite"],
            delta_series=[(t, d) for t, d in report["delta_series"]],
            files=files,
        )

    @app.post("/experiment", response_model=ExperimentResponse)
    def experiment(req: ExperimentRequest) -> ExperimentResponse:
        report = run_experiment(req.to_spec())
        return ExperimentResponse(summary=report.summary, failures=report.failures, files=report.files)

    @app.post("/verify-overlay", response_model=VerifyOverlayResponse)
    def verify(req: VerifyOverlayRequest) -> VerifyOverlayResponse:
        report = verify_overlay(req.to_spec())
        return VerifyOverlayResponse(summary=report.summary, files=report.files)

    return app
