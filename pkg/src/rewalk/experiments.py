"""Reproducible experiment driver: scheme comparisons, bias and spectral reports.

Everything here has ground-truth access (it owns the full graph), unlike the
samplers it drives.  Reports are plain CSV/JSON text so a service can return
them and a thin client can write them; rerunning a spec with the same seed
reproduces every byte.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from typing import Mapping, Sequence

from .access import AccessSession, load_attributes, load_edgelist
from .errors import AttributeMissing, DomainError, RewalkError
from .estimation import (
    estimate_report_csv,
    importance_estimate,
    kl_bias,
    visit_distribution,
)
from .generators import LatentSpaceConfig, barbell, latent_space
from .graph import (
    Graph,
    export_overlay_text,
    giant_component,
    is_connected,
    overlay_graph,
)
from .rewiring import audit_csv
from .samplers import (
    ALL_SCHEMES,
    MTO_VARIANTS,
    SCHEME_MHRW,
    SCHEME_RJ,
    SCHEME_SRW,
    SamplerConfig,
    Walker,
    samples_csv,
    trace_csv,
)
from .spectral import MAX_EXACT_NODES, conductance_exact, slem_mixing_time

ERROR_LEVELS = (0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2)


@dataclass(frozen=True)
class GraphSource:
    """Where the experiment graph comes from: exactly one of the options."""

    path: str | None = None
    mode: str = "undirected"
    edges: tuple[tuple[int, int], ...] | None = None
    barbell_m: int | None = None
    latent: LatentSpaceConfig | None = None
    giant_only: bool = False
    attributes_path: str | None = None

    def __post_init__(self) -> None:
        chosen = [x is not None for x in (self.path, self.edges, self.barbell_m, self.latent)]
        if sum(chosen) != 1:
            raise DomainError("specify exactly one of path, edges, barbell_m, latent")


def resolve_graph(source: GraphSource) -> tuple[Graph, dict[int, dict[str, float]]]:
    """Materialize the graph (and sidecar attributes) a source describes."""
    if source.path is not None:
        graph = load_edgelist(source.path, mode=source.mode)
    elif source.edges is not None:
        graph = Graph.from_edges(source.edges)
    elif source.barbell_m is not None:
        graph = barbell(source.barbell_m)
    else:
        assert source.latent is not None
        graph, _ = latent_space(source.latent)
    attrs: dict[int, dict[str, float]] = {}
    if source.attributes_path is not None:
        # sidecar ids refer to the pre-extraction graph
        attrs = load_attributes(source.attributes_path, graph)
    if source.giant_only:
        graph, kept = giant_component(graph)
        attrs = {new: attrs[old] for new, old in enumerate(kept) if old in attrs}
    return graph, attrs


@dataclass(frozen=True)
class ExperimentSpec:
    graph: GraphSource
    schemes: tuple[str, ...] = (SCHEME_SRW, "mto")
    attribute: str = "degree"
    geweke_thresholds: tuple[float, ...] = (0.1,)
    runs: int = 20
    seed: int = 0
    sample_size: int = 100
    jump_prob: float = 0.5
    replace_prob: float = 0.5
    budget: int | None = None
    step_cap: int = 1_000_000
    kl_max_nodes: int = 1000
    presumptive_truth: bool = False
    out_dir: str | None = None

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise DomainError("runs must be >= 1")
        for t in self.geweke_thresholds:
            if not 0.0 < t <= 1.0:
                raise DomainError("geweke thresholds must lie in (0, 1]")
        for s in self.schemes:
            if s not in ALL_SCHEMES:
                raise DomainError(f"unknown scheme {s!r}")


@dataclass
class ExperimentReport:
    summary: dict
    files: dict[str, str]
    failures: int


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from heterogeneous parts (process-independent)."""
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def population_mean(graph: Graph, attrs: Mapping[int, Mapping[str, float]], attribute: str) -> float:
    values = []
    for v in graph.node_ids():
        if attribute == "degree":
            values.append(float(graph.degree(v)))
        elif v in attrs and attribute in attrs[v]:
            values.append(attrs[v][attribute])
        else:
            raise AttributeMissing(f"node {v} lacks attribute {attribute!r}")
    return sum(values) / len(values)


def _ideal_distribution(graph: Graph, scheme: str, walker: Walker) -> dict[int, float]:
    n = graph.num_nodes
    if scheme in (SCHEME_MHRW, SCHEME_RJ):
        return {v: 1.0 / n for v in graph.node_ids()}
    if scheme in MTO_VARIANTS:
        overlay = overlay_graph(graph, walker.ledger)
        two_m = 2.0 * overlay.num_edges
        return {v: overlay.degree(v) / two_m for v in overlay.node_ids()}
    two_m = 2.0 * graph.num_edges
    return {v: graph.degree(v) / two_m for v in graph.node_ids()}


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(x)


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """Run every scheme x threshold x run cell and aggregate the reports.

    Per cell: a fresh session and walker draw ``sample_size`` samples after
    Geweke convergence, the mean of the chosen attribute is estimated by the
    self-normalized ratio estimator, and bias is recorded as the symmetrized
    KL divergence between the ideal and sampled node distributions (small
    graphs only).  A failed run becomes a row with an error tag; the report
    counts failures so callers can reflect partial failure in exit codes.
    """
    graph, attrs = resolve_graph(spec.graph)
    truth: float | None = None
    if not spec.presumptive_truth:
        truth = population_mean(graph, attrs, spec.attribute)

    rows: list[dict] = []
    estimate_rows: list[dict] = []
    failures = 0
    for scheme in spec.schemes:
        scheme_truth = truth
        if spec.presumptive_truth:
            scheme_truth = _presumptive_truth(spec, graph, attrs, scheme)
        for threshold in spec.geweke_thresholds:
            for run in range(spec.runs):
                seed = derive_seed(spec.seed, scheme, threshold, run)
                row: dict = {
                    "scheme": scheme,
                    "threshold": threshold,
                    "run": run,
                    "seed": seed,
                    "attribute": spec.attribute,
                    "N": spec.sample_size,
                    "estimate": None,
                    "relative_error": None,
                    "unique_queries": None,
                    "geweke_z": None,
                    "kl_bias": None,
                    "steps": None,
                    "error": "",
                }
                session = AccessSession(graph, attributes=attrs, budget=spec.budget)
                config = SamplerConfig(
                    scheme=scheme,
                    jump_prob=spec.jump_prob,
                    replace_prob=spec.replace_prob,
                    geweke_threshold=threshold,
                    sample_size=spec.sample_size,
                    step_cap=spec.step_cap,
                    attribute=spec.attribute,
                )
                try:
                    walker = Walker(session, config, seed=seed)
                    samples = walker.run_walk()
                    estimate = importance_estimate(samples, spec.attribute)
                    row["estimate"] = estimate
                    if scheme_truth is not None and scheme_truth != 0:
                        row["relative_error"] = abs(estimate - scheme_truth) / abs(scheme_truth)
                    row["unique_queries"] = session.unique_queries
                    row["steps"] = walker.state.steps
                    if walker.last_geweke is not None:
                        row["geweke_z"] = walker.last_geweke.z
                    if graph.num_nodes <= spec.kl_max_nodes and len(samples) > 0:
                        ideal = _ideal_distribution(graph, scheme, walker)
                        empirical = visit_distribution([e.node for e in samples.entries])
                        row["kl_bias"] = kl_bias(ideal, empirical)
                except RewalkError as exc:
                    failures += 1
                    row["error"] = type(exc).__name__
                rows.append(row)
                if not row["error"]:
                    estimate_rows.append(
                        {
                            "scheme": scheme,
                            "attribute": spec.attribute,
                            "N": spec.sample_size,
                            "estimate": row["estimate"],
                            "relative_error": row["relative_error"],
                            "unique_queries": row["unique_queries"],
                            "geweke_z": row["geweke_z"],
                        }
                    )

    files = {
        "measurements.csv": _measurements_csv(rows),
        "estimates.csv": estimate_report_csv(estimate_rows),
    }
    summary = _summarize(spec, rows, truth)
    files["summary.json"] = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if spec.out_dir is not None:
        write_files(spec.out_dir, files)
    return ExperimentReport(summary=summary, files=files, failures=failures)


def _presumptive_truth(
    spec: ExperimentSpec, graph: Graph, attrs: Mapping[int, Mapping[str, float]], scheme: str
) -> float:
    """Converged long-run estimate used as stand-in truth for one scheme."""
    seed = derive_seed(spec.seed, scheme, "reference")
    session = AccessSession(graph, attributes=attrs, budget=spec.budget)
    config = SamplerConfig(
        scheme=scheme,
        jump_prob=spec.jump_prob,
        replace_prob=spec.replace_prob,
        geweke_threshold=min(spec.geweke_thresholds),
        sample_size=max(spec.sample_size * 4, 400),
        step_cap=spec.step_cap,
        attribute=spec.attribute,
    )
    walker = Walker(session, config, seed=seed)
    return importance_estimate(walker.run_walk(), spec.attribute)


def _measurements_csv(rows: Sequence[Mapping[str, object]]) -> str:
    header = (
        "scheme,threshold,run,seed,attribute,N,estimate,relative_error,"
        "unique_queries,geweke_z,kl_bias,steps,error"
    )
    lines = [header]
    for r in rows:
        lines.append(
            ",".join(
                [
                    str(r["scheme"]),
                    repr(r["threshold"]),
                    str(r["run"]),
                    str(r["seed"]),
                    str(r["attribute"]),
                    str(r["N"]),
                    _fmt(r["estimate"]),
                    _fmt(r["relative_error"]),
                    "" if r["unique_queries"] is None else str(r["unique_queries"]),
                    _fmt(r["geweke_z"]),
                    _fmt(r["kl_bias"]),
                    "" if r["steps"] is None else str(r["steps"]),
                    str(r["error"]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _summarize(spec: ExperimentSpec, rows: Sequence[Mapping], truth: float | None) -> dict:
    def _mean(xs):
        xs = [x for x in xs if x is not None]
        return sum(xs) / len(xs) if xs else None

    def _median(xs):
        xs = sorted(x for x in xs if x is not None)
        if not xs:
            return None
        mid = len(xs) // 2
        return xs[mid] if len(xs) % 2 else (xs[mid - 1] + xs[mid]) / 2.0

    groups: dict[tuple, list] = {}
    for r in rows:
        groups.setdefault((r["scheme"], r["threshold"]), []).append(r)
    cells = []
    for (scheme, threshold), cell_rows in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        ok = [r for r in cell_rows if not r["error"]]
        errs = [r["relative_error"] for r in ok]
        costs = [r["unique_queries"] for r in ok]
        # worst-case query cost among runs whose relative error is at least the level
        curve = {}
        for level in ERROR_LEVELS:
            eligible = [
                r["unique_queries"]
                for r in ok
                if r["relative_error"] is not None and r["relative_error"] >= level
            ]
            curve[repr(level)] = max(eligible) if eligible else None
        cells.append(
            {
                "scheme": scheme,
                "threshold": threshold,
                "runs": len(cell_rows),
                "failed": len(cell_rows) - len(ok),
                "mean_estimate": _mean([r["estimate"] for r in ok]),
                "mean_relative_error": _mean(errs),
                "median_relative_error": _median(errs),
                "mean_unique_queries": _mean(costs),
                "median_unique_queries": _median(costs),
                "mean_kl_bias": _mean([r["kl_bias"] for r in ok]),
                "mean_geweke_z": _mean([r["geweke_z"] for r in ok]),
                "query_cost_at_error_level": curve,
            }
        )
    return {
        "attribute": spec.attribute,
        "seed": spec.seed,
        "sample_size": spec.sample_size,
        "truth": truth,
        "cells": cells,
    }


@dataclass(frozen=True)
class VerifySpec:
    graph: GraphSource
    scheme: str = "mto"
    seed: int = 0
    replace_prob: float = 0.5
    step_cap: int = 1_000_000
    out_dir: str | None = None

    def __post_init__(self) -> None:
        if self.scheme not in MTO_VARIANTS:
            raise DomainError(f"overlay verification needs a rewiring scheme, got {self.scheme!r}")


def verify_overlay(spec: VerifySpec) -> ExperimentReport:
    """Run the rewiring walk to full node coverage and compare base vs overlay.

    Reports exact conductance for both graphs when small enough, the SLEM
    pair, a connectivity flag, and ships the overlay edge list plus the
    rewiring audit log.
    """
    graph, attrs = resolve_graph(spec.graph)
    session = AccessSession(graph, attributes=attrs)
    config = SamplerConfig(
        scheme=spec.scheme,
        replace_prob=spec.replace_prob,
        step_cap=spec.step_cap,
    )
    walker = Walker(session, config, seed=spec.seed)
    steps = walker.run_until_coverage()
    overlay = overlay_graph(graph, walker.ledger)

    phi_base = phi_overlay = None
    if graph.num_nodes <= MAX_EXACT_NODES:
        phi_base = conductance_exact(graph).phi
        if is_connected(overlay):
            phi_overlay = conductance_exact(overlay).phi
    slem_base = slem_mixing_time(graph).slem
    slem_overlay = slem_mixing_time(overlay).slem if is_connected(overlay) else 1.0

    summary = {
        "scheme": spec.scheme,
        "seed": spec.seed,
        "steps_to_coverage": steps,
        "unique_queries": session.unique_queries,
        "phi_base": phi_base,
        "phi_overlay": phi_overlay,
        "slem_base": slem_base,
        "slem_overlay": slem_overlay,
        "overlay_connected": is_connected(overlay),
        "removed_edges": len(walker.ledger.removed),
        "added_edges": len(walker.ledger.added),
    }
    files = {
        "overlay.edgelist": export_overlay_text(graph, walker.ledger),
        "rewiring_audit.csv": audit_csv(walker.events),
        "verify.json": json.dumps(summary, indent=2, sort_keys=True) + "\n",
    }
    if spec.out_dir is not None:
        write_files(spec.out_dir, files)
    return ExperimentReport(summary=summary, files=files, failures=0)


def write_files(out_dir: str, files: Mapping[str, str]) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for name, content in files.items():
        with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
