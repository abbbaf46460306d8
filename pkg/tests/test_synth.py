import itertools
import math

import numpy as np
import pytest
from scipy import stats

from mlmod.estimator import multiplex_agreement_model
from mlmod.netcore import InterlayerTopology, TopologyKind, ValidationError
from mlmod.quality import pairwise_agreement, persistence
from mlmod.synth import (
    GeneratorConfig,
    change_point_etas,
    change_point_network,
    generate,
    mixing_to_eps,
    order_posterior_mass,
    order_weights,
    qsigma_table,
    sample_multiplex_partition,
    sample_temporal_partition,
    toy_merge_network,
)


def test_full_copying_is_constant():
    part = sample_temporal_partition(GeneratorConfig(N=50, T=6, K=4, eta=1.0, rng_seed=0))
    L = np.vstack(part.layers())
    assert np.all(L == L[0])
    part = sample_multiplex_partition(GeneratorConfig(N=50, T=4, K=4, eta=1.0, rng_seed=0))
    L = np.vstack(part.layers())
    assert np.all(L == L[0])


def test_no_copying_is_uniform():
    part = sample_temporal_partition(GeneratorConfig(N=2000, T=5, K=4, eta=0.0, rng_seed=1))
    for t in range(5):
        counts = np.bincount(part.layer(t), minlength=4)
        assert stats.chisquare(counts).pvalue > 1e-3


def test_temporal_persistence_rate():
    N, T = 4000, 6
    part = sample_temporal_partition(GeneratorConfig(N=N, T=T, K=2, eta=0.9, rng_seed=2))
    n = N * (T - 1)
    rate = persistence(part, InterlayerTopology.temporal()) / n
    assert abs(rate - 0.95) <= 3 * math.sqrt(0.95 * 0.05 / n)


def test_multiplex_agreement_rate():
    N = 6000
    part = sample_multiplex_partition(GeneratorConfig(N=N, T=3, K=2, eta=0.5, rng_seed=3))
    target = multiplex_agreement_model(0.5, 2, 3)
    assert target == pytest.approx(0.7083, abs=1e-4)
    # 3 pair comparisons per node are dependent; bound by per-node variance
    assert abs(pairwise_agreement(part) - target) <= 3 * math.sqrt(target * (1 - target) / N)


def test_mean_degree():
    cfg = GeneratorConfig(N=512, T=4, K=2, eta=0.5, c=32, eps=0.4, rng_seed=4)
    net, _, _ = generate(cfg)
    d = np.concatenate([net.degrees(t) for t in range(4)])
    assert abs(d.mean() - 32) <= 3 * math.sqrt(32 / len(d))


def test_equal_probabilities_give_er():
    cfg = GeneratorConfig(N=100, T=1, K=4, p_in=0.1, p_out=0.1)
    assert cfg.edge_probabilities() == (0.1, 0.1)


def test_toy_network_expected_degree():
    net, part = toy_merge_network(0)
    g = part.layer(0)
    a = net.layers[0]
    within = np.asarray((a.multiply(g[:, None] == g[None, :])).sum(axis=1)).ravel()
    assert within.mean() == pytest.approx(0.32 * 49, rel=0.05)
    assert len(np.unique(part.layer(1))) == 10


def test_config_validation():
    with pytest.raises(ValidationError):
        GeneratorConfig(N=10, T=2, K=2, p_in=0.1, p_out=0.1, c=5, eps=0.5)
    with pytest.raises(ValidationError):
        GeneratorConfig(N=10, T=2, K=2, eta=1.5, c=5, eps=0.5)
    with pytest.raises(ValidationError):
        GeneratorConfig(N=10, T=2, K=2, c=50, eps=0.1).edge_probabilities()


def test_generator_is_seeded():
    cfg = GeneratorConfig(N=60, T=3, K=3, eta=0.5, c=8, eps=0.3, kind=TopologyKind.MULTIPLEX, rng_seed=9)
    (n1, p1, _), (n2, p2, _) = generate(cfg), generate(cfg)
    assert p1 == p2 and all((a != b).nnz == 0 for a, b in zip(n1.layers, n2.layers))


def test_change_points():
    e = change_point_etas(100)
    assert e[0] == 0 and e[24] == e[49] == e[74] == 0 and e[1] == 0.9
    assert mixing_to_eps(0.4, 5) == pytest.approx(0.4 / 3.4)
    net, part, etas = change_point_network(0, N=30, T=30, change_points=(10,), c=4)
    assert net.num_layers == 30 and etas[9] == 0


def test_order_weights_uniform_without_copying():
    q = order_weights(np.array([0, 1, 0, 2]), 0.0, 3)
    assert np.allclose(q, 1 / 24)


def test_order_mass_sums_to_t_minus_one():
    mass = order_posterior_mass(np.array([0, 0, 1, 1]), 0.7, 2)
    assert mass.sum() == pytest.approx(3.0)


def exact_qsigma_moments(p, K, T):
    """Mean and std of the statistic over all K^T label vectors of one node,
    weighted by their probability under order-then-copy sampling."""
    perms = list(itertools.permutations(range(T)))
    vals, probs = [], []
    for g in itertools.product(range(K), repeat=T):
        g = np.array(g)
        prob = 0.0
        for sig in perms:
            w = 1.0 / K
            for a, b in zip(sig[:-1], sig[1:]):
                w *= p * (g[a] == g[b]) + (1 - p) / K
            prob += w / len(perms)
        q = [np.prod([(1 - p) + p * K * (g[a] == g[b]) for a, b in zip(sig[:-1], sig[1:])]) for sig in perms]
        q = np.array(q) / np.sum(q)
        adjacent = [any(s == 0 and t == 1 for s, t in zip(sig[:-1], sig[1:])) for sig in perms]
        vals.append(q[adjacent].sum() - 1 / T)
        probs.append(prob)
    vals, probs = np.array(vals), np.array(probs)
    mean = probs @ vals
    return mean, math.sqrt(probs @ (vals - mean) ** 2)


def test_qsigma_matches_exact_moments():
    mean, std = exact_qsigma_moments(0.7, 3, 3)
    r = qsigma_table(0.7, 3, 3, 4000, seed=5)
    assert abs(r["mean"] - mean) <= 4 * std / math.sqrt(4000)
    assert r["std"] == pytest.approx(std, rel=0.1)


def test_qsigma_degenerate_cases():
    assert qsigma_table(0.0, 5, 3, 10)["std"] == 0.0
    r = qsigma_table(1.0, 5, 4, 10)
    assert np.all(np.isfinite(r["values"])) and r["mean"] == pytest.approx(0.0)
