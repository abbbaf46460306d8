"""Estimate planted-partition parameters from a partition and map them to
modularity parameters (resolution, coupling, layer weights)."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .netcore import InterlayerTopology, MultilayerNetwork, Partition, TopologyKind, ValidationError
from .params import SBMParams
from .quality import pairwise_agreement, persistence_per_layer

OMEGA_MAX = 1000.0
THETA_OUT_FLOOR = 1e-6
P_CEIL = 1.0 - 1e-9


class DegenerateEstimate(ValueError):
    """The partition carries no information about a parameter (e.g. K = 1)."""


@dataclass
class PartitionStats:
    """Per-layer edge and degree tallies of a partition.

    ``m_in``/``m_out`` count edges (directed edges for directed layers);
    ``kappa[t]`` maps community label -> (out-degree sum, in-degree sum).
    """

    m_in: np.ndarray
    m_out: np.ndarray
    within_mass: np.ndarray  # sum_ij A_ij delta (= 2 m_in undirected)
    null_within: np.ndarray  # sum_r kappa_out kappa_in / m'
    mass: np.ndarray  # m'_t, or 2 m_t for undirected layers
    kappa: list
    persistence: np.ndarray | None = None
    agreement: float | None = None


def partition_stats(net: MultilayerNetwork, p: Partition, topo: InterlayerTopology | None = None) -> PartitionStats:
    p.check_matches(net)
    T = net.num_layers
    within = np.zeros(T)
    null_within = np.zeros(T)
    mass = np.array([net.adjacency_mass(t) for t in range(T)])
    kappa = []
    for t in range(T):
        g = p.layer(t)
        a = net.layers[t].tocoo()
        within[t] = a.data[g[a.row] == g[a.col]].sum()
        labels, inv = np.unique(g, return_inverse=True)
        ko = np.bincount(inv, weights=net.out_degrees(t), minlength=len(labels))
        ki = np.bincount(inv, weights=net.in_degrees(t), minlength=len(labels))
        kappa.append({int(r): (float(o), float(i)) for r, o, i in zip(labels, ko, ki)})
        if mass[t] > 0:
            null_within[t] = float(ko @ ki) / mass[t]
    scale = 1.0 if net.directed else 0.5
    stats = PartitionStats(
        m_in=within * scale, m_out=(mass - within) * scale, within_mass=within,
        null_within=null_within, mass=mass, kappa=kappa)
    if topo is not None and T > 1:
        if topo.kind is TopologyKind.MULTIPLEX:
            stats.agreement = pairwise_agreement(p)
        else:
            stats.persistence = persistence_per_layer(p, topo)
    return stats


class ThetaEstimate(NamedTuple):
    theta_in: object
    theta_out: object
    clamped: object  # True where theta_out was floored


def _theta_pair(within, null_within, mass):
    if null_within <= 0:
        raise DegenerateEstimate("no layer has edges; theta is undefined")
    theta_in = within / null_within
    denom = mass - null_within
    theta_out = (mass - within) / denom if denom > 1e-12 * mass else 0.0
    floor = THETA_OUT_FLOOR * theta_in
    clamped = theta_out < floor
    return theta_in, max(theta_out, floor), clamped


def estimate_theta(net: MultilayerNetwork, p: Partition, per_layer: bool = False) -> ThetaEstimate:
    """Moment estimates of theta_in and theta_out from observed edge counts.

    theta_in = sum_t 2 m_in^t / sum_t sum_r (kappa_r^t)^2 / (2 m_t), and
    theta_out analogously over inter-community edges. Directed layers use
    out/in degree sums and m'_t. theta_out is floored at 1e-6 theta_in.
    """
    s = partition_stats(net, p)
    if not per_layer:
        if s.mass.sum() == 0:
            raise DegenerateEstimate("the network has no edges")
        return ThetaEstimate(*_theta_pair(s.within_mass.sum(), s.null_within.sum(), s.mass.sum()))
    tin, tout, flags = [], [], []
    for t in range(net.num_layers):
        if s.mass[t] == 0:
            # empty layer: no information, carries zero weight downstream
            tin.append(1.0), tout.append(1.0), flags.append(True)
            continue
        a, b, c = _theta_pair(s.within_mass[t], s.null_within[t], s.mass[t])
        tin.append(a), tout.append(b), flags.append(c)
    return ThetaEstimate(np.array(tin), np.array(tout), np.array(flags))


def estimate_K(p: Partition, per_layer: bool = False):
    """Number of distinct labels, over the whole partition or per layer."""
    if per_layer:
        return np.array([len(np.unique(p.layer(t))) for t in range(p.num_layers)], dtype=np.int64)
    return int(len(np.unique(p.labels)))


def _p_from_rate(rate, K):
    K = np.asarray(K, dtype=np.float64)
    if np.any(K < 2):
        raise DegenerateEstimate("K = 1 leaves the copying probability undefined; treat omega as 0")
    return np.clip((rate - 1.0 / K) / (1.0 - 1.0 / K), 0.0, 1.0)


def estimate_p_temporal(p: Partition, K, per_layer: bool = False):
    """Copying probability from the persistence rate between consecutive layers.

    p = [Pers / (N (T-1)) - 1/K] / (1 - 1/K), clamped to [0, 1]. The per-layer
    variant returns a length-T vector with entry 0 set to 0.
    """
    if p.num_layers < 2:
        raise ValidationError("copying probabilities need at least two layers")
    pers = persistence_per_layer(p, InterlayerTopology.temporal())
    n = np.asarray(p.layer_sizes[1:], dtype=np.float64)
    if per_layer:
        out = np.zeros(p.num_layers)
        out[1:] = _p_from_rate(pers[1:] / n, K)
        return out
    return float(_p_from_rate(pers[1:].sum() / n.sum(), K))


def estimate_p_multilevel(p: Partition, topo: InterlayerTopology, K, per_layer: bool = False):
    """As the temporal estimate, but agreement is measured against parents.

    The uniform variant normalises by sum_t N^t (t >= 2); the per-layer
    variant by N^t.
    """
    if topo.kind is not TopologyKind.MULTILEVEL:
        raise ValidationError("multilevel estimation needs a multilevel topology")
    pers = persistence_per_layer(p, topo)
    n = np.asarray(p.layer_sizes[1:], dtype=np.float64)
    rates = pers[1:] / n
    if per_layer:
        out = np.zeros(p.num_layers)
        out[1:] = _p_from_rate(rates, K)
        return out
    return float(_p_from_rate(pers[1:].sum() / n.sum(), K))


def multiplex_agreement_model(p: float, K: float, T: int) -> float:
    """P(g_i^s = g_i^t) under permutation-order copying with uniform P(sigma)."""
    n = np.arange(1, T)
    return float(2 * (1 - 1 / K) / (T * (T - 1)) * np.sum(p ** n * (T - n)) + 1 / K)


def solve_multiplex_p(agreement: float, K: float, T: int, tol: float = 1e-10) -> float:
    """Invert :func:`multiplex_agreement_model` in p by bisection on [0, 1]."""
    if T < 2 or K < 2:
        raise DegenerateEstimate("multiplex p needs T >= 2 and K >= 2")
    a = min(max(agreement, 1.0 / K), 1.0)
    lo, hi = 0.0, 1.0
    if a >= 1.0:
        return 1.0
    if a <= 1.0 / K:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if multiplex_agreement_model(mid, K, T) < a:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def estimate_p_multiplex(p: Partition, K, T: int | None = None) -> float:
    T = p.num_layers if T is None else T
    return solve_multiplex_p(pairwise_agreement(p), K, T)


# -- parameter maps ----------------------------------------------------------

def gamma_from_theta(theta_in, theta_out):
    """Resolution (theta_in - theta_out) / (log theta_in - log theta_out).

    Symmetric in its arguments; equals theta_in in the limit theta_in -> theta_out.
    """
    a = np.asarray(theta_in, dtype=np.float64)
    b = np.asarray(theta_out, dtype=np.float64)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValidationError("theta values must be positive")
    d = a - b
    # log1p of the relative gap keeps the ratio accurate when the thetas nearly coincide
    x = np.log1p(d / b)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(x == 0, a, d / x)
    return float(g) if g.ndim == 0 else g


def _log_gap(theta_in, theta_out):
    return np.log(np.asarray(theta_in, dtype=np.float64)) - np.log(np.asarray(theta_out, dtype=np.float64))


def _coupling_numerator(p, K):
    p = np.asarray(p, dtype=np.float64)
    K = np.asarray(K, dtype=np.float64)
    if np.any(p < 0) or np.any(p > 1):
        raise ValidationError("copying probabilities must lie in [0, 1]")
    if np.any(K < 1):
        raise ValidationError("K must be at least 1")
    q = np.minimum(p, P_CEIL)
    return np.log1p(q / (1 - q) * K)


def omega_temporal(theta_in, theta_out, p, K, omega_max: float = OMEGA_MAX):
    """Coupling log(1 + p K / (1 - p)) / (log theta_in - log theta_out).

    Works for temporal and multilevel chains. p = 1 gives ``omega_max`` and
    every value is capped there. Per-layer inputs (vectors for theta, p, K)
    give omega_t with the layer-mean log-gap as denominator; entry 0 of the
    result is unused and set to 0.
    """
    gap = _log_gap(theta_in, theta_out)
    per_layer = any(np.ndim(x) > 0 for x in (theta_in, theta_out, p, K))
    denom = float(gap.mean()) if per_layer else float(gap)
    if denom <= 0:
        raise ValidationError("omega needs theta_in > theta_out (mean log-gap must be positive)")
    num = _coupling_numerator(p, K)
    om = np.where(np.asarray(p) >= 1, omega_max, np.minimum(num / denom, omega_max))
    if per_layer:
        om = np.array(np.broadcast_to(om, np.broadcast_shapes(np.shape(om), np.shape(gap))), dtype=np.float64)
        om[0] = 0.0
        return om
    return float(om)


def omega_multiplex_uniform(theta_in, theta_out, p, K, T: int, omega_max: float = OMEGA_MAX):
    """Uniform multiplex coupling, exactly :func:`omega_temporal` divided by T."""
    if T < 1:
        raise ValidationError("T must be positive")
    om = omega_temporal(theta_in, theta_out, p, K, omega_max)
    if np.ndim(om) > 0:
        # per-layer inputs: a single uniform coupling from the layer-mean terms
        om = float(np.mean(om[1:])) if len(om) > 1 else 0.0
    return om / T


def omega_multiplex_pairwise(theta_in, theta_out, P, K, qsum=None, omega_max: float = OMEGA_MAX) -> np.ndarray:
    """Pairwise multiplex couplings omega_st.

    omega_st = log(1 + p_st K_t / (1 - p_st)) * qsum[s, t] / <log theta_in - log theta_out>.

    :param P: T x T copying probabilities (diagonal ignored)
    :param K: scalar or per-layer community counts
    :param qsum: T x T posterior mass of layer orders placing s right before t
        (see :func:`mlmod.synth.order_posterior_mass`); ``None`` uses 1/T
    """
    P = np.asarray(P, dtype=np.float64)
    T = P.shape[0]
    if P.shape != (T, T):
        raise ValidationError("P must be a square matrix")
    if T > 8:
        raise ValidationError("pairwise multiplex couplings enumerate T! layer orders; T <= 8 supported")
    denom = float(np.mean(_log_gap(theta_in, theta_out)))
    if denom <= 0:
        raise ValidationError("omega needs theta_in > theta_out (mean log-gap must be positive)")
    Kt = np.broadcast_to(np.asarray(K, dtype=np.float64), (T,))
    q = np.full((T, T), 1.0 / T) if qsum is None else np.asarray(qsum, dtype=np.float64)
    om = np.minimum(_coupling_numerator(P, Kt[None, :]) * q / denom, omega_max)
    om = np.where(P >= 1, omega_max, om)
    np.fill_diagonal(om, 0.0)
    return om


def beta_weights(theta_in, theta_out) -> np.ndarray:
    """Layer weights log-gap_t / mean(log-gap); their mean is 1.

    Non-positive weights (layers without assortative structure) are allowed
    and trigger a warning.
    """
    gap = np.atleast_1d(_log_gap(theta_in, theta_out))
    mean = gap.mean()
    if mean <= 0:
        raise ValidationError("layer weights need a positive mean log-gap")
    beta = gap / mean
    if np.any(beta <= 0):
        warnings.warn("some layers have theta_in <= theta_out; their weights are non-positive",
                      RuntimeWarning, stacklevel=2)
    return beta


def estimate_sbm(net: MultilayerNetwork, topo: InterlayerTopology, p: Partition,
                 per_layer: bool = False) -> SBMParams:
    """All planted-partition parameters of a partition in one call."""
    th = estimate_theta(net, p, per_layer=per_layer)
    K = estimate_K(p)
    T = net.num_layers
    flags = ("theta_out_floored",) if np.any(th.clamped) else ()
    if T < 2:
        return SBMParams(th.theta_in, th.theta_out, 0.0, K, flags)
    if topo.kind is TopologyKind.MULTIPLEX:
        if per_layer:
            raise ValidationError("layer-dependent multiplex copying probabilities are not supported")
        pr = estimate_p_multiplex(p, K)
    elif topo.kind is TopologyKind.MULTILEVEL:
        pr = estimate_p_multilevel(p, topo, K, per_layer=per_layer)
    else:
        pr = estimate_p_temporal(p, K, per_layer=per_layer)
    K_out = estimate_K(p, per_layer=True) if per_layer else K
    return SBMParams(th.theta_in, th.theta_out, pr, K_out, flags)


def log_gap_mean(theta_in, theta_out) -> float:
    return float(np.mean(_log_gap(theta_in, theta_out)))


def ppm_theta(N: int, K: int, p_in: float, p_out: float) -> tuple[float, float]:
    """theta values of an equal-size planted partition with edge probabilities p_in, p_out.

    Each node has expected degree c = p_in (N/K - 1) + p_out N (K-1)/K and
    E[A_ij] = theta c / N, so theta = p N / c.
    """
    c = p_in * (N / K - 1) + p_out * N * (K - 1) / K
    return p_in * N / c, p_out * N / c


__all__ = [
    "OMEGA_MAX", "DegenerateEstimate", "PartitionStats", "ThetaEstimate", "partition_stats",
    "estimate_theta", "estimate_K", "estimate_p_temporal", "estimate_p_multilevel",
    "estimate_p_multiplex", "multiplex_agreement_model", "solve_multiplex_p", "gamma_from_theta",
    "omega_temporal", "omega_multiplex_uniform", "omega_multiplex_pairwise", "beta_weights",
    "estimate_sbm", "ppm_theta", "log_gap_mean",
]

