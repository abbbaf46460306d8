import math
import warnings

import numpy as np
import pytest
import scipy.sparse as sp

from mlmod.estimator import (
    OMEGA_MAX,
    DegenerateEstimate,
    beta_weights,
    estimate_K,
    estimate_p_multilevel,
    estimate_p_multiplex,
    estimate_p_temporal,
    estimate_sbm,
    estimate_theta,
    gamma_from_theta,
    multiplex_agreement_model,
    omega_multiplex_pairwise,
    omega_multiplex_uniform,
    omega_temporal,
    ppm_theta,
    solve_multiplex_p,
)
from mlmod.netcore import InterlayerTopology, MultilayerNetwork, Partition, ValidationError
from mlmod.synth import GeneratorConfig, binary_tree_topology, generate


def test_theta_single_community():
    net = MultilayerNetwork.from_edges([[(0, 1), (1, 2), (2, 3)]], 4)
    th = estimate_theta(net, Partition(np.zeros(4, int), [4]))
    assert th.theta_in == pytest.approx(1.0)
    assert th.clamped


def test_theta_no_cross_edges_is_floored():
    net = MultilayerNetwork.from_edges([[(0, 1), (2, 3)]], 4)
    th = estimate_theta(net, Partition([0, 0, 1, 1], [4]))
    assert th.clamped and th.theta_out == pytest.approx(1e-6 * th.theta_in)


def test_theta_hand_computed():
    # path 0-1-2-3 split {0,1} {2,3}: 2 m_in = 4 of mass 6; kappa = (3, 3)
    net = MultilayerNetwork.from_edges([[(0, 1), (1, 2), (2, 3)]], 4)
    th = estimate_theta(net, Partition([0, 0, 1, 1], [4]))
    assert th.theta_in == pytest.approx(4 / 3)
    assert th.theta_out == pytest.approx(2 / 3)


def test_theta_on_empty_network():
    net = MultilayerNetwork([sp.csr_matrix((3, 3))])
    with pytest.raises(DegenerateEstimate):
        estimate_theta(net, Partition([0, 1, 1], [3]))


def test_theta_per_layer_empty_layer_is_neutral():
    net = MultilayerNetwork.from_edges([[(0, 1), (2, 3), (1, 2)], []], 4)
    th = estimate_theta(net, Partition([0, 0, 1, 1] * 2, [4, 4]), per_layer=True)
    assert th.theta_in[1] == th.theta_out[1] == 1.0


def test_theta_recovered_from_ppm():
    cfg = GeneratorConfig(N=512, T=40, K=2, eta=0.5, c=32, eps=1 / 3, rng_seed=3)
    net, part, _ = generate(cfg)
    ti, to = ppm_theta(512, 2, *cfg.edge_probabilities())
    assert (ti, to) == pytest.approx((1.5, 0.5), rel=0.01)
    th = estimate_theta(net, part)
    assert th.theta_in == pytest.approx(ti, rel=0.1)
    assert th.theta_out == pytest.approx(to, rel=0.1)


def test_K_examples(fig1_partition):
    assert estimate_K(Partition(np.zeros(6, int), [3, 3])) == 1
    assert estimate_K(fig1_partition) == 20
    assert list(estimate_K(fig1_partition, per_layer=True)) == [20, 10]
    assert estimate_K(Partition(list(range(5)) * 2, [5, 5])) == 5


def test_p_temporal_examples():
    assert estimate_p_temporal(Partition(np.zeros(6, int), [2] * 3), 2) == 1.0
    # persistence rate exactly 1/K
    assert estimate_p_temporal(Partition.from_layers([[0, 1], [0, 0]]), 2) == 0.0
    # N=2, T=3, Pers=3
    assert estimate_p_temporal(Partition.from_layers([[0, 1], [0, 1], [0, 0]]), 2) == pytest.approx(0.5)


def test_p_temporal_per_layer():
    p = estimate_p_temporal(Partition.from_layers([[0, 1], [0, 1], [0, 0]]), 2, per_layer=True)
    assert list(p) == [0.0, 1.0, 0.0]


def test_p_requires_two_labels():
    with pytest.raises(DegenerateEstimate):
        estimate_p_temporal(Partition(np.zeros(4, int), [2, 2]), 1)


def test_p_multilevel_examples():
    topo, sizes = binary_tree_topology(3, root_size=2)
    full = Partition.from_layers([[0, 1], [0, 0, 1, 1], [0, 0, 0, 0, 1, 1, 1, 1]])
    assert estimate_p_multilevel(full, topo, 2) == 1.0
    # half the children agree with their parent
    half = Partition.from_layers([[0, 1], [0, 1, 1, 0], [0, 1, 1, 0, 0, 1, 1, 0]])
    assert estimate_p_multilevel(half, topo, 2) == pytest.approx(0.0)


def test_multiplex_agreement_examples():
    assert multiplex_agreement_model(1.0, 4, 5) == pytest.approx(1.0)
    assert multiplex_agreement_model(0.0, 4, 5) == pytest.approx(0.25)
    a = multiplex_agreement_model(0.5, 2, 3)
    assert a == pytest.approx(17 / 24)
    assert solve_multiplex_p(a, 2, 3) == pytest.approx(0.5, abs=1e-9)
    assert solve_multiplex_p(1.0, 2, 3) == 1.0
    assert solve_multiplex_p(0.1, 2, 3) == 0.0


def test_multiplex_p_from_partition():
    part = Partition(np.zeros(9, int), [3] * 3)
    assert estimate_p_multiplex(part, 2) == 1.0


def test_gamma_examples():
    assert gamma_from_theta(0.7, 0.7) == pytest.approx(0.7, abs=1e-12)
    assert gamma_from_theta(2.0, 0.5) == pytest.approx(1.5 / math.log(4))
    assert gamma_from_theta(2.0, 0.5) == pytest.approx(1.0820, abs=1e-4)
    assert gamma_from_theta(math.e, 1.0) == pytest.approx(math.e - 1)


def test_gamma_continuity_at_equal_thetas():
    for th in (0.3, 1.0, 4.2, 50.0):
        assert gamma_from_theta(th, th) == th
        for rel in (1e-6, 1e-9, 1e-12):
            a = th * (1 + rel)
            # the logarithmic mean matches the arithmetic mean to second order in the gap
            assert gamma_from_theta(a, th) == pytest.approx((a + th) / 2, rel=1e-13)


def test_omega_examples():
    assert omega_temporal(2.0, 0.5, 0.0, 2) == 0.0
    assert omega_temporal(2.0, 0.5, 1.0, 2) == OMEGA_MAX
    assert omega_temporal(2.0, 0.5, 0.5, 2) == pytest.approx(math.log(3) / math.log(4))
    assert omega_temporal(2.0, 0.5, 0.5, 2) == pytest.approx(0.7925, abs=1e-4)
    assert omega_temporal(2.0, 0.5, 0.3, 1) > 0
    assert omega_temporal(1.0001, 1.0, 0.999999, 50) == OMEGA_MAX


def test_omega_requires_assortative_thetas():
    with pytest.raises(ValidationError):
        omega_temporal(0.5, 2.0, 0.5, 2)


def test_omega_per_layer_uses_mean_gap():
    tin, tout = np.array([2.0, 2.0, 4.0]), np.array([1.0, 1.0, 1.0])
    om = omega_temporal(tin, tout, np.array([0, 0.5, 0.5]), 2)
    mean_gap = np.mean(np.log(tin / tout))
    assert om[0] == 0
    assert om[1] == pytest.approx(math.log(3) / mean_gap)
    assert om[1] == om[2]


def test_multiplex_omega_examples():
    assert omega_multiplex_uniform(2.0, 0.5, 0.5, 2, 3) == pytest.approx(math.log(3) / math.log(4) / 3)
    assert omega_multiplex_uniform(2.0, 0.5, 0.5, 2, 3) == pytest.approx(0.2642, abs=1e-4)
    assert omega_multiplex_uniform(2.0, 0.5, 0.0, 2, 3) == 0.0


def test_pairwise_reduces_to_uniform():
    P = np.full((3, 3), 0.4)
    om = omega_multiplex_pairwise(2.0, 0.5, P, 3)
    off = om[~np.eye(3, dtype=bool)]
    assert np.allclose(off, omega_multiplex_uniform(2.0, 0.5, 0.4, 3, 3))
    P[0, 1] = 0.0
    assert omega_multiplex_pairwise(2.0, 0.5, P, 3)[0, 1] == 0.0


def test_beta_examples():
    assert np.allclose(beta_weights([2.0, 2.0], [1.0, 1.0]), 1.0)
    assert np.allclose(beta_weights([4.0, 2.0], [1.0, 1.0]), [4 / 3, 2 / 3])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        b = beta_weights([4.0, 1.0 + 1e-9], [1.0, 1.0])
    assert b[1] == pytest.approx(0.0, abs=1e-6)


def test_beta_warns_on_disassortative_layer():
    with pytest.warns(RuntimeWarning):
        beta_weights([4.0, 0.5], [1.0, 1.0])


def test_estimate_sbm_bundle():
    cfg = GeneratorConfig(N=200, T=5, K=2, eta=0.8, c=20, eps=0.2, rng_seed=1)
    net, part, topo = generate(cfg)
    sbm = estimate_sbm(net, topo, part)
    assert sbm.K == 2 and 0.6 < sbm.p <= 1.0
    assert sbm.theta_in > 1 > sbm.theta_out
