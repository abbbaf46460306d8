"""Synthetic multilayer benchmarks: label-copying partitions, planted-partition
edges, and the layer-order posterior used for multiplex couplings."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .netcore import InterlayerTopology, MultilayerNetwork, Partition, TopologyKind, ValidationError


@dataclass(frozen=True)
class GeneratorConfig:
    """Benchmark parameters.

    Edges come either from ``(p_in, p_out)`` or from mean degree ``c`` with
    ratio ``eps = p_out / p_in``. ``eta`` is the copying probability, scalar
    or per layer (entry t is used when generating layer t; entry 0 unused).
    """

    N: int
    T: int
    K: int
    eta: object = 0.0
    p_in: float | None = None
    p_out: float | None = None
    c: float | None = None
    eps: float | None = None
    kind: TopologyKind = TopologyKind.TEMPORAL
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", TopologyKind(self.kind))
        if self.N < 1 or self.T < 1 or self.K < 1:
            raise ValidationError("N, T and K must be positive")
        e = np.asarray(self.eta, dtype=np.float64)
        if e.ndim > 0 and e.shape != (self.T,):
            raise ValidationError(f"eta needs a scalar or {self.T} values")
        if np.any(e < 0) or np.any(e > 1):
            raise ValidationError("eta must lie in [0, 1]")
        by_prob = self.p_in is not None or self.p_out is not None
        by_degree = self.c is not None or self.eps is not None
        if by_prob and by_degree:
            raise ValidationError("give either (p_in, p_out) or (c, eps), not both")
        if by_prob and (self.p_in is None or self.p_out is None):
            raise ValidationError("both p_in and p_out are needed")
        if by_degree and (self.c is None or self.eps is None):
            raise ValidationError("both c and eps are needed")
        if by_prob and not 0 <= self.p_out <= self.p_in <= 1:
            raise ValidationError("need 0 <= p_out <= p_in <= 1")
        if by_degree and not (0 <= self.eps <= 1 and self.c >= 0):
            raise ValidationError("need eps in [0, 1] and c >= 0")

    def etas(self) -> np.ndarray:
        e = np.asarray(self.eta, dtype=np.float64)
        return np.full(self.T, float(e)) if e.ndim == 0 else e.copy()

    def edge_probabilities(self, N: int | None = None) -> tuple[float, float]:
        """(p_in, p_out), converting from (c, eps) via c = p_in (N/K - 1) + p_out N (K-1)/K."""
        if self.p_in is not None:
            return float(self.p_in), float(self.p_out)
        if self.c is None:
            raise ValidationError("no edge model given")
        n = self.N if N is None else N
        denom = (n / self.K - 1) + self.eps * n * (self.K - 1) / self.K
        if denom <= 0:
            raise ValidationError("mean degree is undefined for these N, K, eps")
        p_in = self.c / denom
        if p_in > 1:
            raise ValidationError(f"mean degree {self.c} needs p_in = {p_in:.3f} > 1")
        return p_in, self.eps * p_in


def _rng(cfg: GeneratorConfig, rng):
    return np.random.default_rng(cfg.rng_seed) if rng is None else rng


def sample_temporal_partition(cfg: GeneratorConfig, rng=None) -> Partition:
    """First layer uniform over K labels; each later label copied from the
    previous layer with probability eta_t, else drawn uniformly."""
    rng = _rng(cfg, rng)
    eta = cfg.etas()
    g = rng.integers(0, cfg.K, cfg.N)
    layers = [g]
    for t in range(1, cfg.T):
        copy = rng.random(cfg.N) < eta[t]
        fresh = rng.integers(0, cfg.K, cfg.N)
        g = np.where(copy, g, fresh)
        layers.append(g)
    return Partition.from_layers(layers)


def sample_multiplex_partition(cfg: GeneratorConfig, rng=None) -> Partition:
    """Per node, draw a uniform layer order and copy labels along it."""
    rng = _rng(cfg, rng)
    eta = np.asarray(cfg.eta, dtype=np.float64)
    if eta.ndim:
        raise ValidationError("multiplex sampling takes a single copying probability")
    N, T, K = cfg.N, cfg.T, cfg.K
    order = np.argsort(rng.random((N, T)), axis=1)
    L = np.empty((T, N), np.int64)
    rows = np.arange(N)
    g = rng.integers(0, K, N)
    L[order[:, 0], rows] = g
    for k in range(1, T):
        copy = rng.random(N) < eta
        g = np.where(copy, g, rng.integers(0, K, N))
        L[order[:, k], rows] = g
    return Partition.from_layers(list(L))


def sample_multilevel_partition(cfg: GeneratorConfig, topo: InterlayerTopology, rng=None) -> Partition:
    """Top layer (``cfg.N`` nodes) uniform; each child copies its parent's
    label with probability eta_t, else draws uniformly."""
    if topo.kind is not TopologyKind.MULTILEVEL:
        raise ValidationError("multilevel sampling needs a multilevel topology")
    if len(topo.parents) != cfg.T - 1:
        raise ValidationError(f"expected {cfg.T - 1} parent maps")
    rng = _rng(cfg, rng)
    eta = cfg.etas()
    g = rng.integers(0, cfg.K, cfg.N)
    layers = [g]
    for t in range(1, cfg.T):
        par = topo.parents[t - 1]
        if len(par) and par.max() >= len(g):
            raise ValidationError(f"parent map of layer {t + 1} points outside layer {t}")
        n = len(par)
        g = np.where(rng.random(n) < eta[t], g[par], rng.integers(0, cfg.K, n))
        layers.append(g)
    return Partition.from_layers(layers)


def _ppm_layer(g: np.ndarray, p_in: float, p_out: float, rng) -> sp.csr_matrix:
    n = len(g)
    i, j = np.triu_indices(n, 1)
    prob = np.where(g[i] == g[j], p_in, p_out)
    keep = rng.random(len(i)) < prob
    i, j = i[keep], j[keep]
    a = sp.coo_matrix((np.ones(2 * len(i)), (np.r_[i, j], np.r_[j, i])), shape=(n, n))
    return a.tocsr()


def place_ppm_edges(p: Partition, cfg: GeneratorConfig, rng=None) -> MultilayerNetwork:
    """Independent undirected edges per layer: probability p_in within a
    community, p_out across. No self-loops, no degree correction."""
    rng = _rng(cfg, rng)
    mats = []
    for t in range(p.num_layers):
        g = p.layer(t)
        p_in, p_out = cfg.edge_probabilities(len(g))
        mats.append(_ppm_layer(g, p_in, p_out, rng))
    return MultilayerNetwork(mats)


def generate(cfg: GeneratorConfig, topo: InterlayerTopology | None = None):
    """Planted partition and network from one seeded stream.

    :return: (network, planted partition, topology)
    """
    rng = np.random.default_rng(cfg.rng_seed)
    if cfg.kind is TopologyKind.TEMPORAL:
        topo = InterlayerTopology.temporal()
        part = sample_temporal_partition(cfg, rng)
    elif cfg.kind is TopologyKind.MULTIPLEX:
        topo = InterlayerTopology.multiplex()
        part = sample_multiplex_partition(cfg, rng)
    else:
        if topo is None:
            raise ValidationError("multilevel generation needs parent maps")
        part = sample_multilevel_partition(cfg, topo, rng)
    return place_ppm_edges(part, cfg, rng), part, topo


def toy_merge_network(seed: int = 0, N: int = 1000, K1: int = 20, p_in: float = 0.32,
                      p_out: float = 0.1):
    """Two layers: K1 equal communities, then pairs of them merged.

    Layer-2 label of a node is its layer-1 label integer-divided by two.

    :return: (network, planted partition)
    """
    if N % K1 or K1 % 2:
        raise ValidationError("N must split into K1 equal groups and K1 must be even")
    g1 = np.arange(N) // (N // K1)
    part = Partition.from_layers([g1, g1 // 2])
    cfg = GeneratorConfig(N=N, T=2, K=K1, p_in=p_in, p_out=p_out, rng_seed=seed)
    return place_ppm_edges(part, cfg, np.random.default_rng(seed)), part


def change_point_etas(T: int, change_points=(25, 50, 75), eta: float = 0.9,
                      eta_change: float = 0.0) -> np.ndarray:
    """Per-layer copying probabilities with drops at 1-based layers ``change_points``."""
    e = np.full(T, eta)
    e[0] = 0.0
    for t in change_points:
        if not 2 <= t <= T:
            raise ValidationError(f"change point {t} outside layers 2..{T}")
        e[t - 1] = eta_change
    return e


def mixing_to_eps(mu: float, K: int) -> float:
    """Ratio p_out / p_in matching a mixing parameter ``mu`` (each edge is
    random with probability mu, else inside its community) for K equal groups."""
    if not 0 <= mu <= 1:
        raise ValidationError("mu must lie in [0, 1]")
    return mu / (K * (1 - mu) + mu)


def change_point_network(seed: int = 0, N: int = 150, K: int = 5, T: int = 100, c: float = 20.0,
                         eps: float = mixing_to_eps(0.4, 5), change_points=(25, 50, 75), eta: float = 0.9):
    """Temporal benchmark whose communities are resampled at the change points.

    The default ``eps`` corresponds to mixing parameter 0.4 with five groups.

    :return: (network, planted partition, per-layer copying probabilities)
    """
    etas = change_point_etas(T, change_points, eta)
    cfg = GeneratorConfig(N=N, T=T, K=K, eta=etas, c=c, eps=eps, rng_seed=seed)
    net, part, _ = generate(cfg)
    return net, part, etas


def binary_tree_topology(depth: int, root_size: int = 1):
    """Multilevel hierarchy where every node has two children.

    :return: (topology, layer sizes)
    """
    sizes = [root_size * 2 ** t for t in range(depth)]
    parents = [np.arange(sizes[t]) // 2 for t in range(1, depth)]
    return InterlayerTopology.multilevel(parents), sizes


# -- layer-order posterior ---------------------------------------------------

@lru_cache(maxsize=None)
def _perms(T: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(T))), dtype=np.int8)


def order_weights(labels: np.ndarray, p: float, K: int) -> np.ndarray:
    """Posterior q^sigma of every layer order for one node's labels.

    With uniform P(sigma), q^sigma is proportional to the product over
    successive positions of (1 - p) + p K delta(g_a, g_b). Orders are in
    ``itertools.permutations`` order.
    """
    g = np.asarray(labels)
    T = len(g)
    P = _perms(T)
    F = (1 - p) + p * K * (g[:, None] == g[None, :])
    w = np.ones(len(P))
    for k in range(T - 1):
        w *= F[P[:, k], P[:, k + 1]]
    Z = w.sum()
    if Z <= 0:
        raise ValidationError("labels have zero probability under these copying parameters")
    return w / Z


def order_posterior_mass(labels: np.ndarray, p: float, K: int) -> np.ndarray:
    """T x T matrix whose (s, t) entry sums q^sigma over orders placing s
    immediately before t."""
    g = np.asarray(labels)
    T = len(g)
    if T > 8:
        raise ValidationError("order enumeration is limited to T <= 8 here")
    P = _perms(T)
    q = order_weights(g, p, K)
    out = np.zeros((T, T))
    for k in range(T - 1):
        np.add.at(out, (P[:, k], P[:, k + 1]), q)
    return out


@lru_cache(maxsize=None)
def _adjacent_mask(T: int, s: int, t: int) -> np.ndarray:
    P = _perms(T)
    return np.any((P[:, :-1] == s) & (P[:, 1:] == t), axis=1)


def qsigma_table(p: float, K: int, T: int, n_trials: int, seed: int = 0, pair=(0, 1)) -> dict:
    """Deviation of the posterior mass of 's right before t' from 1/T.

    Each trial samples one node's labels from the multiplex copying process
    and sums q^sigma over the (T-1)! orders with s immediately before t.

    :return: dict with ``mean``, ``std`` (ddof=1) and the per-trial ``values``
    """
    if not 3 <= T <= 10:
        raise ValidationError("q-sigma statistics support 3 <= T <= 10")
    if n_trials < 1:
        raise ValidationError("need at least one trial")
    s, t = pair
    mask = _adjacent_mask(T, s, t)
    cfg = GeneratorConfig(N=n_trials, T=T, K=K, eta=p, kind=TopologyKind.MULTIPLEX, rng_seed=seed)
    L = np.vstack(sample_multiplex_partition(cfg).layers())
    vals = np.array([order_weights(L[:, i], p, K)[mask].sum() - 1.0 / T for i in range(n_trials)])
    std = float(vals.std(ddof=1)) if n_trials > 1 else 0.0
    return {"p": p, "K": K, "T": T, "n_trials": n_trials, "mean": float(vals.mean()), "std": std,
            "values": vals}


__all__ = [
    "GeneratorConfig", "sample_temporal_partition", "sample_multiplex_partition",
    "sample_multilevel_partition", "place_ppm_edges", "generate", "toy_merge_network",
    "change_point_etas", "change_point_network", "mixing_to_eps", "binary_tree_topology", "order_weights",
    "order_posterior_mass", "qsigma_table",
]
