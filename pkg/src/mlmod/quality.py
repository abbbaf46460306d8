"""Multilayer modularity, persistence and the planted-partition log-posterior.

Every double sum runs over all ordered pairs (i, j), diagonal included, and
modularity is reported without a 1/(2m) prefactor. Undirected layers use
the same ordered-pair convention as directed ones, so a symmetric directed
evaluation equals the undirected one exactly.
"""
from __future__ import annotations

import itertools
import math
import warnings

import numpy as np

from .netcore import (
    InterlayerTopology,
    MultilayerNetwork,
    Partition,
    TopologyKind,
    ValidationError,
    coupling_weights,
)
from .params import ModularityParams, SBMParams


def _null_degrees(net: MultilayerNetwork, t: int, directed: bool | None):
    if directed is False and net.directed:
        raise ValidationError("an undirected null model cannot be applied to a directed network")
    return net.out_degrees(t), net.in_degrees(t), net.adjacency_mass(t)


def modularity_matrix(net: MultilayerNetwork, t: int, gamma: float, directed: bool | None = None) -> np.ndarray:
    """Dense modularity matrix B^t = A^t - gamma d_out d_in^T / m'.

    For undirected layers ``d_out = d_in = d`` and ``m' = 2 m``. An empty layer
    gets a zero null term.
    """
    a = net.layers[t].toarray()
    dout, din, mass = _null_degrees(net, t, directed)
    if mass == 0:
        warnings.warn(f"layer {t + 1} has no edges; its null-model term is zero", RuntimeWarning,
                      stacklevel=2)
        return a
    return a - gamma * np.outer(dout, din) / mass


def null_coefficients(net: MultilayerNetwork, params: ModularityParams) -> np.ndarray:
    """Per-layer weight ``beta_t gamma_t / m'_t`` of the rank-one null term."""
    T = net.num_layers
    mass = np.array([net.adjacency_mass(t) for t in range(T)])
    with np.errstate(divide="ignore", invalid="ignore"):
        c = params.betas(T) * params.gammas(T) / mass
    c[mass == 0] = 0.0
    return c


def intralayer_terms(net: MultilayerNetwork, p: Partition, gamma, directed: bool | None = None) -> np.ndarray:
    """Per-layer ``sum_ij B^t_ij delta(g_i^t, g_j^t)`` (no layer weights)."""
    p.check_matches(net)
    T = net.num_layers
    gam = np.broadcast_to(np.asarray(gamma, dtype=np.float64), (T,))
    out = np.zeros(T)
    for t in range(T):
        g = p.layer(t)
        a = net.layers[t].tocoo()
        within = a.data[g[a.row] == g[a.col]].sum()
        dout, din, mass = _null_degrees(net, t, directed)
        if mass == 0:
            out[t] = within
            continue
        _, inv = np.unique(g, return_inverse=True)
        k_out = np.bincount(inv, weights=dout)
        k_in = np.bincount(inv, weights=din)
        out[t] = within - gam[t] * float(k_out @ k_in) / mass
    return out


def interlayer_term(net: MultilayerNetwork, topo: InterlayerTopology, p: Partition, omega) -> float:
    """Coupling reward ``sum over links of weight * delta`` for the topology."""
    p.check_matches(net)
    src, dst, ls, lt = topo.coupling_pairs(net)
    if len(src) == 0:
        return 0.0
    w = coupling_weights(omega, ls, lt, net.num_layers)
    same = p.labels[src] == p.labels[dst]
    return float(w[same].sum())


def multilayer_modularity(net: MultilayerNetwork, topo: InterlayerTopology, p: Partition,
                          params: ModularityParams) -> float:
    """Q = sum_t beta_t sum_ij B^t_ij delta + interlayer coupling term."""
    T = net.num_layers
    intra = intralayer_terms(net, p, params.gammas(T), params.directed)
    return float(params.betas(T) @ intra) + interlayer_term(net, topo, p, params.omega)


def supra_modularity_matrix(net: MultilayerNetwork, topo: InterlayerTopology,
                            params: ModularityParams) -> np.ndarray:
    """Dense multilayer modularity matrix with ``Q = sum_ab B_ab delta(g_a, g_b)``.

    Diagonal blocks are ``beta_t B^t``; coupling links sit in the off-diagonal
    blocks. Intended for small networks (brute-force checks, debugging).
    """
    T = net.num_layers
    n = net.num_states
    B = np.zeros((n, n))
    gam, bet = params.gammas(T), params.betas(T)
    o = net.offsets
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for t in range(T):
            B[o[t]:o[t + 1], o[t]:o[t + 1]] = bet[t] * modularity_matrix(net, t, gam[t], params.directed)
    src, dst, ls, lt = topo.coupling_pairs(net)
    if len(src):
        np.add.at(B, (src, dst), coupling_weights(params.omega, ls, lt, T))
    return B


# -- persistence -------------------------------------------------------------

def persistence_per_layer(p: Partition, topo: InterlayerTopology) -> np.ndarray:
    """Entry t counts nodes of layer t sharing the label of their copy (or parent) in t-1.

    Entry 0 is always 0.
    """
    if topo.kind is TopologyKind.MULTIPLEX:
        raise ValidationError("persistence is defined for temporal and multilevel topologies; "
                              "use pairwise_agreement for multiplex networks")
    T = p.num_layers
    out = np.zeros(T, dtype=np.int64)
    for t in range(1, T):
        prev, cur = p.layer(t - 1), p.layer(t)
        if topo.kind is TopologyKind.MULTILEVEL:
            prev = prev[topo.parents[t - 1]]
        elif len(prev) != len(cur):
            raise ValidationError("temporal layers must have equal node counts")
        out[t] = int(np.count_nonzero(prev == cur))
    return out


def persistence(p: Partition, topo: InterlayerTopology) -> int:
    """Pers(g): number of node-layer pairs that keep the label of the coupled copy."""
    return int(persistence_per_layer(p, topo).sum())


def pairwise_agreement(p: Partition) -> float:
    """Fraction of ordered (s, t), s != t, layer pairs in which a node keeps its label."""
    T = p.num_layers
    if T < 2:
        raise ValidationError("pairwise agreement needs at least two layers")
    L = np.vstack(p.layers())
    same = 0
    for s in range(T):
        same += np.count_nonzero(L[s][None, :] == L)
    same -= L.size  # s == t terms
    return same / (L.shape[1] * T * (T - 1))


# -- posterior ---------------------------------------------------------------

def _check_sbm(sbm: SBMParams, T: int):
    tin, tout = sbm.thetas(T)
    if np.any(tin <= 0) or np.any(tout <= 0):
        raise ValidationError("theta values must be positive")
    pa = np.asarray(sbm.p, dtype=np.float64)
    if np.any(pa < 0) or np.any(pa > 1):
        raise ValidationError("copying probabilities must lie in [0, 1]")
    if np.any(pa >= 1):
        raise ValidationError("p = 1 means infinite coupling; handle that limit separately")
    K = sbm.Ks(T)
    if np.any(K < 1):
        raise ValidationError("K must be at least 1")
    return tin, tout, pa, K


def log_likelihood(net: MultilayerNetwork, p: Partition, sbm: SBMParams) -> float:
    """Planted-partition log-likelihood summed over ordered pairs (no 1/2 factor).

    ``sum_t sum_ij [A_ij log theta_{g_i g_j} - d_out_i d_in_j theta_{g_i g_j} / m'_t]``
    with the ``log A_ij!`` and ``A_ij log(d d / m')`` constants dropped.
    """
    p.check_matches(net)
    T = net.num_layers
    tin, tout, _, _ = _check_sbm(sbm, T)
    total = 0.0
    for t in range(T):
        mass = net.adjacency_mass(t)
        if mass == 0:
            continue
        g = p.layer(t)
        a = net.layers[t].tocoo()
        same_edge = g[a.row] == g[a.col]
        edge_term = (a.data * np.where(same_edge, math.log(tin[t]), math.log(tout[t]))).sum()
        _, inv = np.unique(g, return_inverse=True)
        dout, din = net.out_degrees(t), net.in_degrees(t)
        within_null = float(np.bincount(inv, weights=dout) @ np.bincount(inv, weights=din)) / mass
        all_null = dout.sum() * din.sum() / mass
        null_term = tin[t] * within_null + tout[t] * (all_null - within_null)
        total += edge_term - null_term
    return float(total)


def log_prior(net: MultilayerNetwork, topo: InterlayerTopology, p: Partition, sbm: SBMParams) -> float:
    """Log-probability of the labels under the copy-or-resample prior.

    Temporal and multilevel: first layer uniform over K_1 labels, then each
    label copied from the previous layer (or parent) with probability p_t.
    Multiplex: exact sum over all layer orders (T <= 8) with uniform P(sigma).
    """
    p.check_matches(net)
    T = net.num_layers
    _, _, pa, K = _check_sbm(sbm, T)
    if topo.kind is TopologyKind.MULTIPLEX:
        return _multiplex_log_prior(p, pa, K)
    pt = np.broadcast_to(pa, (T,)) if pa.ndim == 0 else pa
    if pt.shape != (T,):
        raise ValidationError("temporal/multilevel copying probabilities need a scalar or T values")
    total = -p.layer_sizes[0] * math.log(K[0])
    pers = persistence_per_layer(p, topo)
    for t in range(1, T):
        n = p.layer_sizes[t]
        same = math.log(pt[t] + (1 - pt[t]) / K[t])
        diff = math.log((1 - pt[t]) / K[t])
        total += pers[t] * same + (n - pers[t]) * diff
    return float(total)


def _multiplex_log_prior(p: Partition, pa: np.ndarray, K: np.ndarray) -> float:
    T = p.num_layers
    if T > 8:
        raise ValidationError("exact multiplex prior enumerates T! layer orders; T <= 8 supported")
    P = np.full((T, T), float(pa)) if pa.ndim == 0 else pa
    L = np.vstack(p.layers())
    perms = list(itertools.permutations(range(T)))
    logs = np.empty((len(perms), L.shape[1]))
    for k, sig in enumerate(perms):
        lp = np.full(L.shape[1], -math.log(K[sig[0]]))
        for a, b in zip(sig[:-1], sig[1:]):
            q = P[a, b]
            lp += np.log(np.where(L[a] == L[b], q, 0.0) + (1 - q) / K[b])
        logs[k] = lp
    m = logs.max(axis=0)
    per_node = m + np.log(np.exp(logs - m).sum(axis=0)) - math.log(len(perms))
    return float(per_node.sum())


def log_posterior(net: MultilayerNetwork, topo: InterlayerTopology, p: Partition, sbm: SBMParams) -> float:
    """Log-posterior of a partition up to a partition-independent constant."""
    return log_likelihood(net, p, sbm) + log_prior(net, topo, p, sbm)
