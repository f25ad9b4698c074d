"""Pydantic request/response models for the HTTP surface."""
from __future__ import annotations

import math
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from ..generators import LatentSpaceConfig
from ..experiments import ExperimentSpec, GraphSource, VerifySpec


class LatentParams(BaseModel):
    n: int = Field(ge=2)
    a: float = Field(gt=0, default=4.0)
    b: float = Field(gt=0, default=5.0)
    r: float = Field(gt=0, default=0.7)
    alpha: Optional[float] = None  # null means the hard-threshold (infinite) model
    seed: int = 0

    def to_config(self) -> LatentSpaceConfig:
        alpha = math.inf if self.alpha is None else self.alpha
        return LatentSpaceConfig(n=self.n, a=self.a, b=self.b, r=self.r, alpha=alpha, seed=self.seed)


class GraphSourceModel(BaseModel):
    path: Optional[str] = None
    mode: str = "undirected"
    edges: Optional[list[tuple[int, int]]] = None
    barbell: Optional[int] = Field(default=None, ge=3)
    latent: Optional[LatentParams] = None
    giant_component: bool = False
    attributes_path: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self) -> "GraphSourceModel":
        chosen = sum(x is not None for x in (self.path, self.edges, self.barbell, self.latent))
        if chosen != 1:
            raise ValueError("specify exactly one of path, edges, barbell, latent")
        return self

    def to_source(self) -> GraphSource:
        return GraphSource(
            path=self.path,
            mode=self.mode,
            edges=tuple(tuple(e) for e in self.edges) if self.edges is not None else None,
            barbell_m=self.barbell,
            latent=self.latent.to_config() if self.latent is not None else None,
            giant_only=self.giant_component,
            attributes_path=self.attributes_path,
        )


class GenerateRequest(BaseModel):
    barbell: Optional[int] = Field(default=None, ge=3)
    latent: Optional[LatentParams] = None
    giant_component: bool = False

    @model_validator(mode="after")
    def _one_kind(self) -> "GenerateRequest":
        if (self.barbell is None) == (self.latent is None):
            raise ValueError("specify exactly one of barbell, latent")
        return self


class GenerateResponse(BaseModel):
    nodes: int
    edges: int
    files: dict[str, str]


class WalkRequest(BaseModel):
    graph: GraphSourceModel
    scheme: str = "srw"
    seed: int = 0
    sample_size: int = Field(default=100, ge=0)
    geweke_threshold: float = Field(default=0.1, gt=0, le=1)
    jump_prob: float = Field(default=0.5, ge=0, le=1)
    replace_prob: float = Field(default=0.5, ge=0, le=1)
    budget: Optional[int] = Field(default=None, ge=1)
    start: Optional[int] = None
    attribute: str = "degree"
    step_cap: int = Field(default=1_000_000, ge=1)


class SampleResponse(BaseModel):
    scheme: str
    samples: list[int]
    weights: list[float]
    unique_queries: int
    steps: int
    geweke_z: Optional[float]
    files: dict[str, str]


class EstimateResponse(BaseModel):
    scheme: str
    attribute: str
    estimate: float
    truth: Optional[float]
    relative_error: Optional[float]
    unique_queries: int
    geweke_z: Optional[float]
    files: dict[str, str]


class SpectralRequest(BaseModel):
    graph: GraphSourceModel
    delta_t_max: int = Field(default=0, ge=0)
    conductance: Optional[bool] = None  # default: only when small enough


class SpectralResponse(BaseModel):
    phi: Optional[float]
    cut: Optional[dict]
    slem: float
    mixing_time: Optional[float]
    mixing_time_infinite: bool
    delta_series: list[tuple[int, float]]
    files: dict[str, str]


class ExperimentRequest(BaseModel):
    graph: GraphSourceModel
    schemes: list[str] = ["srw", "mto"]
    attribute: str = "degree"
    geweke_thresholds: list[float] = [0.1]
    runs: int = Field(default=20, ge=1)
    seed: int = 0
    sample_size: int = Field(default=100, ge=0)
    jump_prob: float = Field(default=0.5, ge=0, le=1)
    replace_prob: float = Field(default=0.5, ge=0, le=1)
    budget: Optional[int] = Field(default=None, ge=1)
    step_cap: int = Field(default=1_000_000, ge=1)
    presumptive_truth: bool = False

    def to_spec(self) -> ExperimentSpec:
        return ExperimentSpec(
            graph=self.graph.to_source(),
            schemes=tuple(self.schemes),
            attribute=self.attribute,
            geweke_thresholds=tuple(self.geweke_thresholds),
            runs=self.runs,
            seed=self.seed,
            sample_size=self.sample_size,
            jump_prob=self.jump_prob,
            replace_prob=self.replace_prob,
            budget=self.budget,
            step_cap=self.step_cap,
            presumptive_truth=self.presumptive_truth,
        )


class ExperimentResponse(BaseModel):
    summary: dict
    failures: int
    files: dict[str, str]


class VerifyOverlayRequest(BaseModel):
    graph: GraphSourceModel
    scheme: str = "mto"
    seed: int = 0
    replace_prob: float = Field(default=0.5, ge=0, le=1)
    step_cap: int = Field(default=1_000_000, ge=1)

    def to_spec(self) -> VerifySpec:
        return VerifySpec(
            graph=self.graph.to_source(),
            scheme=self.scheme,
            seed=self.seed,
            replace_prob=self.replace_prob,
            step_cap=self.step_cap,
        )


class VerifyOverlayResponse(BaseModel):
    summary: dict
    files: dict[str, str]
