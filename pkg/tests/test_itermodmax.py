import json

import numpy as np
import pytest

from mlmod.evalx import layer_avg_nmi
from mlmod.itermodmax import (
    _estimate_uniform,
    IterConfig,
    iterate,
    iterate_layer_dependent,
    multi_run,
    summary,
    write_matrix_csv,
    write_records_csv,
    write_trajectory_jsonl,
)
from mlmod.netcore import InterlayerTopology, MultilayerNetwork, ValidationError
from mlmod.optimizer import OptimizerConfig, maximize
from mlmod.params import ModularityParams
from mlmod.quality import multilayer_modularity
from mlmod.synth import GeneratorConfig, generate

TEMPORAL = InterlayerTopology.temporal()


@pytest.fixture(scope="module")
def easy():
    cfg = GeneratorConfig(N=200, T=6, K=3, eta=0.8, c=16, eps=0.1, rng_seed=11)
    return generate(cfg)


def test_iterate_converges_on_easy_network(easy):
    net, truth, topo = easy
    res = iterate(net, topo, IterConfig(optimizer=OptimizerConfig(rng_seed=1)))
    assert res.converged
    assert layer_avg_nmi(res.partition, truth) > 0.95
    assert res.final_Q == pytest.approx(res.trajectory[-1].Q)


def test_trajectory_invariants(easy):
    net, _, topo = easy
    res = iterate(net, topo, IterConfig(max_iters=5))
    qs = [s.Q for s in res.trajectory]
    assert res.best_Q == max(qs)
    assert res.best_Q == pytest.approx(multilayer_modularity(
        net, topo, res.best_partition,
        ModularityParams(res.trajectory[res.best_iteration].gamma, res.trajectory[res.best_iteration].omega)))
    for s in res.trajectory:
        assert s.gamma > 0 and 0 <= s.omega <= 1000


def test_fixed_point_is_self_consistent(easy):
    net, _, topo = easy
    res = iterate(net, topo, IterConfig(optimizer=OptimizerConfig(rng_seed=2)))
    assert res.converged
    prm = ModularityParams(res.gamma, res.omega)
    dev = []
    for seed in range(5):
        part, _ = maximize(net, topo, prm, OptimizerConfig(rng_seed=seed))
        g, w, *_ = _estimate_uniform(net, topo, part, 1000.0)
        dev.append(max(abs(g - res.gamma), abs(w - res.omega)))
    assert min(dev) <= 1e-3


def test_one_iteration(easy):
    net, _, topo = easy
    res = iterate(net, topo, IterConfig(max_iters=1))
    assert res.iterations == 1 and not res.converged
    assert "no convergence" in res.message


def test_no_copying_gives_zero_coupling():
    cfg = GeneratorConfig(N=200, T=4, K=3, eta=0.0, c=16, eps=0.05, rng_seed=5)
    net, truth, topo = generate(cfg)
    res = iterate(net, topo)
    assert res.omega < 0.1
    assert layer_avg_nmi(res.partition, truth) > 0.9


def test_k_max_shrinks_gamma(easy):
    net, _, topo = easy
    res = iterate(net, topo, IterConfig(gamma0=4.0, K_max=3, max_iters=3))
    step = res.trajectory[0]
    assert step.action == "shrink"
    assert res.trajectory[1].gamma == pytest.approx(0.8 * 4.0)
    assert res.trajectory[1].omega == step.omega


def test_degenerate_partition_stops():
    edges = [(i, j) for i in range(6) for j in range(i + 1, 6)]
    net = MultilayerNetwork.from_edges([edges, edges], 6)
    res = iterate(net, TEMPORAL)
    assert not res.converged and res.trajectory[-1].action == "degenerate"
    assert "single community" in res.message


def test_layer_dependent_identical_layers(easy):
    net, _, topo = easy
    res = iterate_layer_dependent(net, topo, IterConfig(optimizer=OptimizerConfig(rng_seed=3)))
    assert np.allclose(res.beta, 1.0, atol=0.2)
    om = np.asarray(res.omega)[1:]
    assert om.std() < 0.5 * om.mean()


def test_layer_dependent_fix_gamma(easy):
    net, _, topo = easy
    res = iterate_layer_dependent(net, topo, IterConfig(fix_gamma=True, gamma0=1.0, max_iters=3))
    for s in res.trajectory:
        assert np.all(s.gamma == 1.0) and np.all(s.beta == 1.0)


def test_weak_layer_gets_small_weight():
    cfg = GeneratorConfig(N=300, T=4, K=3, eta=0.9, c=20, eps=0.05, rng_seed=6)
    strong, truth, topo = generate(cfg)
    noise = GeneratorConfig(N=300, T=4, K=3, eta=0.9, c=20, eps=1.0, rng_seed=7)
    weak, _, _ = generate(noise)
    layers = list(strong.layers)
    layers[2] = weak.layers[2]
    net = MultilayerNetwork(layers)
    from mlmod.estimator import beta_weights, estimate_theta
    th = estimate_theta(net, truth, per_layer=True)
    assert beta_weights(th.theta_in, th.theta_out)[2] < 0.1


def test_layer_dependent_rejects_multiplex(easy):
    net, _, _ = easy
    with pytest.raises(ValidationError):
        iterate_layer_dependent(net, InterlayerTopology.multiplex())


def test_multi_run_tables(easy, tmp_path):
    net, _, topo = easy
    cfg = IterConfig(max_iters=10)
    mr = multi_run(net, topo, cfg, 3, seed=4, gamma_range=(0.5, 2.0))
    assert len(mr.records) == 3 and mr.nmi.shape == (3, 3)
    assert np.allclose(np.diag(mr.nmi), 1.0)
    again = multi_run(net, topo, cfg, 3, seed=4, gamma_range=(0.5, 2.0), workers=3)
    assert again.records == mr.records
    write_records_csv(mr.records, tmp_path / "runs.csv")
    write_matrix_csv(mr.nmi, tmp_path / "nmi.csv")
    header = (tmp_path / "runs.csv").read_text().splitlines()[0]
    assert header.startswith("run,gamma0,omega0")
    single = multi_run(net, topo, cfg, 1)
    assert np.array_equal(single.nmi, [[1.0]])


def test_serialization(easy, tmp_path):
    net, _, topo = easy
    res = iterate(net, topo, IterConfig(max_iters=3))
    write_trajectory_jsonl(res, tmp_path / "t.jsonl")
    lines = (tmp_path / "t.jsonl").read_text().splitlines()
    assert len(lines) == res.iterations
    assert set(json.loads(lines[0])) >= {"gamma", "omega", "Q", "K", "p", "theta_in", "theta_out"}
    s = summary(res)
    assert s["omega_symmetric"] == pytest.approx(s["omega"] / 2)
    json.dumps(s)


def test_config_validation():
    with pytest.raises(ValidationError):
        IterConfig(tol=0)
    with pytest.raises(ValidationError):
        IterConfig(gamma_shrink=1.0)
