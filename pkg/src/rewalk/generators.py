"""Synthetic graph construction: the two-clique benchmark and a latent-space model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientTrials
from .graph import EdgeKey, Graph


def barbell(m: int) -> Graph:
    """Two m-cliques joined by a single bridge edge.

    Nodes 0..m-1 form the first clique, m..2m-1 the second; the bridge runs
    between m-1 and m.  |V| = 2m and |E| = 2*C(m,2) + 1.
    """
    if m < 3:
        raise DomainError(f"clique size must be >= 3, got {m}")
    edges = []
    for base in (0, m):
        for i in range(m):
            for j in range(i + 1, m):
                edges.append((base + i, base + j))
    edges.append((m - 1, m))
    return Graph.from_edges(edges, num_nodes=2 * m)


def barbell_bridge(m: int) -> EdgeKey:
    """The bridge edge of :func:`barbell`."""
    if m < 3:
        raise DomainError(f"clique size must be >= 3, got {m}")
    return (m - 1, m)


@dataclass(frozen=True)
class LatentSpaceConfig:
    """Random geometric-style model on a rectangle.

    Nodes are uniform points in [0, a] x [0, b]; a pair at distance d is
    connected with probability 1 / (1 + exp(alpha * (d - r))).  An infinite
    ``alpha`` degenerates to the hard rule d < r.  Dimension is fixed at 2.
    """

    n: int
    a: float
    b: float
    r: float
    alpha: float = math.inf
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise DomainError("need at least two nodes")
        if min(self.a, self.b, self.r) <= 0:
            raise DomainError("a, b and r must be positive")


def latent_space(config: LatentSpaceConfig) -> tuple[Graph, np.ndarray]:
    """Sample a latent-space graph; returns the graph and the n x 2 coordinates.

    Isolated nodes are retained; callers that need connectivity extract the
    giant component afterwards.  Bit-for-bit reproducible for a fixed seed.
    """
    rng = np.random.default_rng(config.seed)
    coords = np.column_stack(
        (rng.random(config.n) * config.a, rng.random(config.n) * config.b)
    )
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    iu, ju = np.triu_indices(config.n, k=1)
    d = dist[iu, ju]
    if math.isinf(config.alpha):
        connected = d < config.r
    else:
        p = 1.0 / (1.0 + np.exp(np.clip(config.alpha * (d - config.r), -700, 700)))
        connected = rng.random(d.shape[0]) < p
    edges = [(int(iu[k]), int(ju[k])) for k in np.nonzero(connected)[0]]
    return Graph.from_edges(edges, num_nodes=config.n), coords


def coords_sidecar_text(coords: np.ndarray) -> str:
    """Coordinate sidecar: ``node_id x y`` per line."""
    lines = [f"{i} {float(x)!r} {float(y)!r}" for i, (x, y) in enumerate(coords)]
    return "\n".join(lines) + "\n"


def expected_conductance_gain(config: LatentSpaceConfig, trials: int, seed: int = 0) -> float:
    """Monte Carlo lower bound on the conductance-improvement factor.

    Draws ``trials`` independent point pairs uniform in the rectangle and
    estimates p = P(z1^2 + z2^2 <= 0.75 r^2) for the coordinate-difference
    magnitudes z; edges shorter than that threshold are removable, so the
    expected post-removal conductance is at least 1 / (1 - p) times the
    original.  Requires the hard-threshold model (infinite alpha).
    """
    if trials < 1000:
        raise InsufficientTrials(f"need at least 1000 trials, got {trials}")
    if not math.isinf(config.alpha):
        raise DomainError("the removable-fraction bound assumes an infinite alpha")
    rng = np.random.default_rng(seed)
    z1 = np.abs(rng.random(trials) - rng.random(trials)) * config.a
    z2 = np.abs(rng.random(trials) - rng.random(trials)) * config.b
    p_hat = float(np.mean(z1 * z1 + z2 * z2 <= 0.75 * config.r * config.r))
    if p_hat >= 1.0:
        raise DomainError("degenerate geometry: every pair within the removal radius")
    return 1.0 / (1.0 - p_hat)
