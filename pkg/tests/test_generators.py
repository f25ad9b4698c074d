import math
import statistics

import numpy as np
import pytest
from scipy import integrate

from rewalk.errors import DomainError, InsufficientTrials
from rewalk.generators import (
    LatentSpaceConfig,
    barbell,
    barbell_bridge,
    coords_sidecar_text,
    expected_conductance_gain,
    latent_space,
)
from rewalk.graph import is_connected
from rewalk.spectral import conductance_exact


def test_barbell_counts():
    g = barbell(11)
    assert g.num_nodes == 22 and g.num_edges == 111
    g3 = barbell(3)
    assert g3.num_nodes == 6 and g3.num_edges == 7
    for m in (3, 5, 8):
        gm = barbell(m)
        assert gm.num_edges == m * (m - 1) + 1
        assert is_connected(gm)


def test_barbell_bridge_edge():
    g = barbell(5)
    u, v = barbell_bridge(5)
    assert g.has_edge(u, v)
    # the bridge is the only inter-clique edge
    inter = [(a, b) for a, b in g.edges() if (a < 5) != (b < 5)]
    assert inter == [(4, 5)]


def test_barbell_conductance():
    assert conductance_exact(barbell(11)).phi_exact == pytest.approx(1 / 56)


def test_barbell_domain():
    with pytest.raises(DomainError):
        barbell(2)
    with pytest.raises(DomainError):
        barbell_bridge(1)


def test_latent_space_reproducible():
    cfg = LatentSpaceConfig(n=60, a=4, b=5, r=0.7, seed=13)
    g1, c1 = latent_space(cfg)
    g2, c2 = latent_space(cfg)
    assert np.array_equal(c1, c2)
    assert sorted(g1.edges()) == sorted(g2.edges())
    g3, _ = latent_space(LatentSpaceConfig(n=60, a=4, b=5, r=0.7, seed=14))
    assert sorted(g3.edges()) != sorted(g1.edges())


def test_latent_space_hard_threshold_rule():
    cfg = LatentSpaceConfig(n=40, a=4, b=5, r=0.9, seed=2)
    g, coords = latent_space(cfg)
    for i in range(40):
        for j in range(i + 1, 40):
            d = math.dist(coords[i], coords[j])
            assert g.has_edge(i, j) == (d < cfg.r)


def test_latent_space_finite_alpha_is_probabilistic():
    cfg = LatentSpaceConfig(n=60, a=2, b=2, r=0.7, alpha=2.0, seed=5)
    g, coords = latent_space(cfg)
    beyond = sum(
        1
        for i in range(60)
        for j in range(i + 1, 60)
        if g.has_edge(i, j) and math.dist(coords[i], coords[j]) > cfg.r
    )
    assert beyond > 0, "a soft profile connects some distant pairs"


def test_latent_space_mean_degree_matches_geometry():
    # disk-area estimate n*pi*r^2/(a*b) holds within 20% (boundary deficit)
    means = []
    for seed in range(50):
        g, _ = latent_space(LatentSpaceConfig(n=100, a=4, b=5, r=0.7, seed=seed))
        means.append(2 * g.num_edges / g.num_nodes)
    naive = 100 * math.pi * 0.7 * 0.7 / 20.0
    assert abs(statistics.mean(means) - naive) / naive < 0.20


def test_latent_space_config_validation():
    with pytest.raises(DomainError):
        LatentSpaceConfig(n=1, a=1, b=1, r=0.5)
    with pytest.raises(DomainError):
        LatentSpaceConfig(n=5, a=0, b=1, r=0.5)


def test_coords_sidecar_format():
    _, coords = latent_space(LatentSpaceConfig(n=3, a=1, b=1, r=0.5, seed=0))
    lines = coords_sidecar_text(coords).strip().splitlines()
    assert len(lines) == 3
    idx, x, y = lines[1].split()
    assert idx == "1"
    assert float(x) == coords[1][0] and float(y) == coords[1][1]


# -- conductance-gain factor -------------------------------------------------


def quadrature_hit_probability(a: float, b: float, r: float) -> float:
    """Independent oracle: P(z1^2+z2^2 <= 0.75 r^2) for |U-U'| differences.

    z1, z2 have triangular densities 2(a-z)/a^2 on [0,a] and 2(b-z)/b^2 on
    [0,b]; integrate the disk of radius sqrt(0.75) r by quadrature.
    """
    d0 = math.sqrt(0.75) * r
    assert d0 <= min(a, b)

    def inner(z1: float) -> float:
        y = math.sqrt(max(d0 * d0 - z1 * z1, 0.0))
        f_a = 2.0 * (a - z1) / (a * a)
        cdf_b = 2.0 * y / b - (y * y) / (b * b)
        return f_a * cdf_b

    value, _ = integrate.quad(inner, 0.0, d0, limit=200)
    return value


def test_gain_factor_matches_quadrature():
    a, b, r, trials = 4.0, 5.0, 0.7, 20000
    p_exact = quadrature_hit_probability(a, b, r)
    cfg = LatentSpaceConfig(n=2, a=a, b=b, r=r)
    sigma = math.sqrt(p_exact * (1 - p_exact) / trials)
    for seed in range(5):
        factor = expected_conductance_gain(cfg, trials, seed=seed)
        p_hat = 1.0 - 1.0 / factor
        assert abs(p_hat - p_exact) <= 3 * sigma


def test_gain_factor_reference_level():
    cfg = LatentSpaceConfig(n=2, a=4.0, b=5.0, r=0.7)
    vals = [expected_conductance_gain(cfg, 20000, seed=s) for s in range(10)]
    assert min(vals) >= 1.052 - 0.01
    assert max(vals) <= 1.08


def test_gain_factor_limit_and_monotonicity():
    tiny = expected_conductance_gain(LatentSpaceConfig(n=2, a=4, b=5, r=1e-3), 20000, seed=0)
    assert tiny == pytest.approx(1.0, abs=1e-4)
    factors = [
        expected_conductance_gain(LatentSpaceConfig(n=2, a=4, b=5, r=r), 200_000, seed=1)
        for r in (0.3, 0.7, 1.2)
    ]
    assert factors[0] < factors[1] < factors[2]


def test_gain_factor_validation():
    cfg = LatentSpaceConfig(n=2, a=4, b=5, r=0.7)
    with pytest.raises(InsufficientTrials):
        expected_conductance_gain(cfg, 999)
    soft = LatentSpaceConfig(n=2, a=4, b=5, r=0.7, alpha=3.0)
    with pytest.raises(DomainError):
        expected_conductance_gain(soft, 5000)
