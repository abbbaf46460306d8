"""Louvain-style maximization of multilayer modularity.

The objective is written as ``Q = sum_ab W_ab delta - sum_t c_t sum_X Dout_X^t Din_X^t``
where ``W`` holds layer-weighted intralayer edges plus interlayer couplings,
``c_t = beta_t gamma_t / m'_t`` and ``Dout_X^t`` (``Din_X^t``) is the
out- (in-) degree mass of community X inside layer t. Moves only need the
symmetrised weights ``S = W + W^T`` and per-community degree sums, so a
sweep costs O(edges + states * layers per super-node).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp
from numba import njit
from scipy.optimize import linear_sum_assignment

from .netcore import (
    InterlayerTopology,
    MultilayerNetwork,
    Partition,
    TopologyKind,
    ValidationError,
    coupling_weights,
)
from .params import ModularityParams
from .quality import interlayer_term, multilayer_modularity, null_coefficients

_MOVE_TOL = 1e-12
_MAX_SWEEPS = 100_000


class MovePolicy(str, Enum):
    BEST = "BestMove"
    WEIGHTED_RANDOM = "WeightedRandomMove"


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings of one optimizer run.

    :param move_policy: ``BestMove`` takes the largest gain (lowest label on
        ties); ``WeightedRandomMove`` samples an improving move with
        probability proportional to its gain
    :param rng_seed: seed of the sweep-order and move-sampling stream
    :param max_passes: cap on local-moving + aggregation passes
    :param min_gain: a pass must raise Q by more than this to continue
    :param postprocess_persistence: relabel layer by layer afterwards
    :param polish_max_states: instances with at most this many node-layer
        pairs get vertex-mover polishing after the multilevel phase; a
        polishing pass is quadratic in the number of states
    """

    move_policy: MovePolicy = MovePolicy.BEST
    rng_seed: int = 0
    max_passes: int = 100
    min_gain: float = 1e-10
    postprocess_persistence: bool = False
    polish_max_states: int = 512

    def __post_init__(self):
        object.__setattr__(self, "move_policy", MovePolicy(self.move_policy))
        if int(self.max_passes) < 1:
            raise ValidationError("max_passes must be at least 1")
        if not self.min_gain >= 0:
            raise ValidationError("min_gain must be non-negative")


@njit(cache=True, nogil=True)
def _null(a, X, lptr, lay, ldout, ldin, coef, Dout, Din):
    s = 0.0
    for q in range(lptr[a], lptr[a + 1]):
        t = lay[q]
        s += coef[t] * (ldout[q] * Din[X, t] + ldin[q] * Dout[X, t])
    return s


@njit(cache=True, nogil=True)
def _sweep(indptr, indices, data, lptr, lay, ldout, ldin, coef, comm, Dout, Din, size,
           free, nfree, order, uni, weighted, wbuf, flag, touched, cand, cwt, key, ckey):
    """One pass over ``order``; returns (moves, total gain, free-list length).

    A node may only join communities whose ``ckey`` equals its ``key``.
    """
    moves = 0
    total = 0.0
    for k in range(order.shape[0]):
        a = order[k]
        A = comm[a]
        for q in range(lptr[a], lptr[a + 1]):
            t = lay[q]
            Dout[A, t] -= ldout[q]
            Din[A, t] -= ldin[q]
        size[A] -= 1

        nt = 0
        for q in range(indptr[a], indptr[a + 1]):
            b = indices[q]
            if b == a:
                continue
            X = comm[b]
            if ckey[X] != key[a]:
                continue
            if flag[X] == 0:
                flag[X] = 1
                wbuf[X] = 0.0
                touched[nt] = X
                nt += 1
            wbuf[X] += data[q]

        w_stay = wbuf[A] if flag[A] == 1 else 0.0
        g_stay = w_stay - _null(a, A, lptr, lay, ldout, ldin, coef, Dout, Din)
        can_empty = size[A] > 0
        target = A
        gain = 0.0
        if weighted:
            nc = 0
            wsum = 0.0
            for j in range(nt):
                X = touched[j]
                if X == A:
                    continue
                imp = wbuf[X] - _null(a, X, lptr, lay, ldout, ldin, coef, Dout, Din) - g_stay
                if imp > _MOVE_TOL:
                    cand[nc] = X
                    cwt[nc] = imp
                    wsum += imp
                    nc += 1
            if can_empty and -g_stay > _MOVE_TOL:
                cand[nc] = -1
                cwt[nc] = -g_stay
                wsum += -g_stay
                nc += 1
            if nc > 0:
                r = uni[k] * wsum
                pick = nc - 1
                acc = 0.0
                for j in range(nc):
                    acc += cwt[j]
                    if r < acc:
                        pick = j
                        break
                target = cand[pick]
                gain = cwt[pick]
        else:
            best = -np.inf
            bestX = -1
            for j in range(nt):
                X = touched[j]
                if X == A:
                    continue
                g = wbuf[X] - _null(a, X, lptr, lay, ldout, ldin, coef, Dout, Din)
                if g > best or (g == best and X < bestX):
                    best = g
                    bestX = X
            if bestX >= 0 and best > g_stay + _MOVE_TOL:
                target = bestX
                gain = best - g_stay
            if can_empty and 0.0 > g_stay + _MOVE_TOL and (bestX < 0 or 0.0 > best):
                target = -1
                gain = -g_stay

        for j in range(nt):
            flag[touched[j]] = 0

        if target == -1:
            nfree -= 1
            target = free[nfree]
            ckey[target] = key[a]
        if target != A:
            moves += 1
            total += gain
            if size[A] == 0:
                free[nfree] = A
                nfree += 1
        comm[a] = target
        size[target] += 1
        for q in range(lptr[a], lptr[a + 1]):
            t = lay[q]
            Dout[target, t] += ldout[q]
            Din[target, t] += ldin[q]
    return moves, total, nfree


@njit(cache=True, nogil=True)
def _vertex_mover_pass(indptr, indices, data, lptr, lay, ldout, ldin, coef, comm, Dout, Din, size,
                       wbuf, flag, touched):
    """Kernighan-Lin style pass: repeatedly apply the best move of an unlocked
    node, even a losing one, lock it, and finally keep the best prefix.

    :return: gain of the kept prefix (0 if no prefix improves)
    """
    n = comm.shape[0]
    locked = np.zeros(n, np.bool_)
    hist_node = np.empty(n, np.int64)
    hist_from = np.empty(n, np.int64)
    cum = 0.0
    best_cum = 0.0
    best_len = 0
    steps = 0
    for _ in range(n):
        empty = -1
        for X in range(n):
            if size[X] == 0:
                empty = X
                break
        bg = -np.inf
        ba = -1
        bX = -1
        for a in range(n):
            if locked[a]:
                continue
            A = comm[a]
            for q in range(lptr[a], lptr[a + 1]):
                Dout[A, lay[q]] -= ldout[q]
                Din[A, lay[q]] -= ldin[q]
            nt = 0
            for q in range(indptr[a], indptr[a + 1]):
                b = indices[q]
                if b == a:
                    continue
                X = comm[b]
                if flag[X] == 0:
                    flag[X] = 1
                    wbuf[X] = 0.0
                    touched[nt] = X
                    nt += 1
                wbuf[X] += data[q]
            w_stay = wbuf[A] if flag[A] == 1 else 0.0
            g_stay = w_stay - _null(a, A, lptr, lay, ldout, ldin, coef, Dout, Din)
            for j in range(nt):
                X = touched[j]
                if X != A:
                    g = wbuf[X] - _null(a, X, lptr, lay, ldout, ldin, coef, Dout, Din) - g_stay
                    if g > bg:
                        bg = g
                        ba = a
                        bX = X
                flag[X] = 0
            if size[A] > 1 and empty >= 0 and -g_stay > bg:
                bg = -g_stay
                ba = a
                bX = empty
            for q in range(lptr[a], lptr[a + 1]):
                Dout[A, lay[q]] += ldout[q]
                Din[A, lay[q]] += ldin[q]
        if ba < 0:
            break
        A = comm[ba]
        for q in range(lptr[ba], lptr[ba + 1]):
            Dout[A, lay[q]] -= ldout[q]
            Din[A, lay[q]] -= ldin[q]
            Dout[bX, lay[q]] += ldout[q]
            Din[bX, lay[q]] += ldin[q]
        size[A] -= 1
        size[bX] += 1
        comm[ba] = bX
        locked[ba] = True
        hist_node[steps] = ba
        hist_from[steps] = A
        steps += 1
        cum += bg
        if cum > best_cum + _MOVE_TOL:
            best_cum = cum
            best_len = steps
    for k in range(steps - 1, best_len - 1, -1):
        a = hist_node[k]
        A = comm[a]
        B = hist_from[k]
        for q in range(lptr[a], lptr[a + 1]):
            Dout[A, lay[q]] -= ldout[q]
            Din[A, lay[q]] -= ldin[q]
            Dout[B, lay[q]] += ldout[q]
            Din[B, lay[q]] += ldin[q]
        size[A] -= 1
        size[B] += 1
        comm[a] = B
    return best_cum


@njit(cache=True, nogil=True)
def _dissolve(C, indptr, indices, data, lptr, lay, ldout, ldin, coef, comm, Dout, Din, size,
              wbuf, flag, touched):
    """Move the members of community ``C`` one at a time to their best other
    neighbouring community. Members without one stay in ``C``."""
    for a in range(comm.shape[0]):
        if comm[a] != C:
            continue
        nt = 0
        for q in range(indptr[a], indptr[a + 1]):
            b = indices[q]
            if b == a:
                continue
            X = comm[b]
            if flag[X] == 0:
                flag[X] = 1
                wbuf[X] = 0.0
                touched[nt] = X
                nt += 1
            wbuf[X] += data[q]
        for q in range(lptr[a], lptr[a + 1]):
            Dout[C, lay[q]] -= ldout[q]
            Din[C, lay[q]] -= ldin[q]
        bX = C
        bg = -np.inf
        for j in range(nt):
            X = touched[j]
            if X != C:
                g = wbuf[X] - _null(a, X, lptr, lay, ldout, ldin, coef, Dout, Din)
                if g > bg:
                    bg = g
                    bX = X
            flag[X] = 0
        for q in range(lptr[a], lptr[a + 1]):
            Dout[bX, lay[q]] += ldout[q]
            Din[bX, lay[q]] += ldin[q]
        size[C] -= 1
        size[bX] += 1
        comm[a] = bX


class _Level:
    """One (possibly aggregated) instance: symmetric weights and layer degrees."""

    def __init__(self, S: sp.csr_matrix, lptr, lay, ldout, ldin):
        S = S.tocsr()
        S.sum_duplicates()
        S.sort_indices()
        self.S = S
        self.lptr = np.ascontiguousarray(lptr, dtype=np.int64)
        self.lay = np.ascontiguousarray(lay, dtype=np.int64)
        self.ldout = np.ascontiguousarray(ldout, dtype=np.float64)
        self.ldin = np.ascontiguousarray(ldin, dtype=np.float64)

    @property
    def n(self) -> int:
        return self.S.shape[0]

    def aggregate(self, labels: np.ndarray, k: int) -> "_Level":
        n = self.n
        M = sp.csr_matrix((np.ones(n), (np.arange(n), labels)), shape=(n, k))
        S = (M.T @ self.S @ M).tocsr()
        owner = np.repeat(np.arange(n), np.diff(self.lptr))
        T = int(self.lay.max()) + 1 if len(self.lay) else 1
        keys, inv = np.unique(labels[owner] * T + self.lay, return_inverse=True)
        dout = np.bincount(inv, weights=self.ldout, minlength=len(keys))
        din = np.bincount(inv, weights=self.ldin, minlength=len(keys))
        rows = keys // T
        lptr = np.concatenate([[0], np.cumsum(np.bincount(rows, minlength=k))])
        return _Level(S, lptr, keys % T, dout, din)

    def objective(self, labels: np.ndarray, coef: np.ndarray) -> float:
        """``0.5 sum_ab S_ab delta - sum_t c_t sum_X Dout_X^t Din_X^t``."""
        c = self.S.tocoo()
        same = labels[c.row] == labels[c.col]
        edge = 0.5 * float(c.data[same].sum())
        owner = np.repeat(np.arange(self.n), np.diff(self.lptr))
        T = len(coef)
        keys, inv = np.unique(labels[owner] * T + self.lay, return_inverse=True)
        dout = np.bincount(inv, weights=self.ldout, minlength=len(keys))
        din = np.bincount(inv, weights=self.ldin, minlength=len(keys))
        return edge - float(np.sum(coef[keys % T] * dout * din))


def _local_moving(level: _Level, coef, labels, rng, weighted: bool, key=None):
    """Sweep until no node moves. With ``key``, communities never mix keys."""
    n = level.n
    T = len(coef)
    _, comm = np.unique(labels, return_inverse=True)
    comm = comm.astype(np.int64)
    size = np.bincount(comm, minlength=n).astype(np.int64)
    key = np.zeros(n, np.int64) if key is None else np.ascontiguousarray(key, dtype=np.int64)
    ckey = np.zeros(n, np.int64)
    ckey[comm] = key
    owner = np.repeat(np.arange(n), np.diff(level.lptr))
    Dout = np.zeros((n, T))
    Din = np.zeros((n, T))
    np.add.at(Dout, (comm[owner], level.lay), level.ldout)
    np.add.at(Din, (comm[owner], level.lay), level.ldin)
    free = np.zeros(n, np.int64)
    empty = np.flatnonzero(size == 0)[::-1]
    nfree = len(empty)
    free[:nfree] = empty
    wbuf = np.zeros(n)
    flag = np.zeros(n, np.int8)
    touched = np.zeros(n, np.int64)
    cand = np.zeros(n + 1, np.int64)
    cwt = np.zeros(n + 1)
    S = level.S
    indptr = S.indptr.astype(np.int64)
    indices = S.indices.astype(np.int64)
    gain = 0.0
    empty_uni = np.zeros(0)
    for _ in range(_MAX_SWEEPS):
        order = rng.permutation(n).astype(np.int64)
        uni = rng.random(n) if weighted else empty_uni
        moves, g, nfree = _sweep(indptr, indices, S.data, level.lptr, level.lay, level.ldout,
                                 level.ldin, coef, comm, Dout, Din, size, free, nfree, order, uni,
                                 weighted, wbuf, flag, touched, cand, cwt, key, ckey)
        gain += g
        if moves == 0:
            break
    return comm, gain


def _move_state(level: _Level, labels: np.ndarray, T: int):
    _, comm = np.unique(labels, return_inverse=True)
    comm = comm.astype(np.int64)
    n = level.n
    owner = np.repeat(np.arange(n), np.diff(level.lptr))
    Dout = np.zeros((n, T))
    Din = np.zeros((n, T))
    np.add.at(Dout, (comm[owner], level.lay), level.ldout)
    np.add.at(Din, (comm[owner], level.lay), level.ldin)
    size = np.bincount(comm, minlength=n).astype(np.int64)
    return comm, Dout, Din, size


def polish(level: _Level, coef: np.ndarray, labels: np.ndarray, rng, weighted: bool = False):
    """Escape local optima of node moves on a small instance.

    Alternates vertex-mover passes with two perturbations, each followed by
    local moving and kept only if the objective rises: dissolving a
    community into its neighbours, and extracting a state
    together with its coupled copies into a new community.

    :return: (labels, objective value)
    """
    n = level.n
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    T = len(coef)
    S = level.S
    indptr, indices = S.indptr.astype(np.int64), S.indices.astype(np.int64)
    wbuf, flag, touched = np.zeros(n), np.zeros(n, np.int8), np.zeros(n, np.int64)
    comm, Dout, Din, size = _move_state(level, labels, T)
    best = level.objective(comm, coef)
    while True:
        while _vertex_mover_pass(indptr, indices, S.data, level.lptr, level.lay, level.ldout, level.ldin,
                                 coef, comm, Dout, Din, size, wbuf, flag, touched) > _MOVE_TOL:
            pass
        best = level.objective(comm, coef)
        improved = False
        for C in np.unique(comm):
            if not np.any(comm == C):
                continue
            trial, tDout, tDin, tsize = _move_state(level, comm, T)
            C_now = trial[np.flatnonzero(comm == C)[0]]
            _dissolve(C_now, indptr, indices, S.data, level.lptr, level.lay, level.ldout, level.ldin,
                      coef, trial, tDout, tDin, tsize, wbuf, flag, touched)
            trial, _ = _local_moving(level, coef, trial, rng, weighted)
            q = level.objective(trial, coef)
            if q > best + _MOVE_TOL:
                comm, Dout, Din, size = _move_state(level, trial, T)
                best, improved = q, True
        if improved:
            continue
        # extraction: a state and its coupled copies in its community form a new one
        if level.n == len(level.lay):
            for a in range(n):
                nb = indices[indptr[a]:indptr[a + 1]]
                group = np.concatenate([[a], nb[(level.lay[nb] != level.lay[a]) & (comm[nb] == comm[a])]])
                if len(group) == np.count_nonzero(comm == comm[a]):
                    continue
                trial = comm.copy()
                trial[group] = n
                trial, _ = _local_moving(level, coef, trial, rng, weighted)
                q = level.objective(trial, coef)
                if q > best + _MOVE_TOL:
                    comm, Dout, Din, size = _move_state(level, trial, T)
                    best, improved = q, True
        if not improved:
            return comm, best


def louvain(level: _Level, coef: np.ndarray, cfg: OptimizerConfig, init: np.ndarray | None = None,
            refine: bool = True):
    """Multilevel local moving on a generic instance.

    A round alternates node moves and aggregation until a pass gains at
    most ``min_gain``. Before the first aggregation of a round, each
    community is split into single-layer sub-communities by local moving
    restricted to its own members in one layer; the sub-communities become
    the super-nodes, starting in their parent community. A one-layer part of
    a community can then leave it as a unit, which single-node moves cannot
    achieve under strong coupling.

    Rounds restart from the flat partition of the previous round and stop
    once a round no longer improves the objective. Every pass counts towards
    ``max_passes``.

    :return: (flat labels, objective value)
    """
    rng = np.random.default_rng(cfg.rng_seed)
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    weighted = cfg.move_policy is MovePolicy.WEIGHTED_RANDOM
    n0 = level.n
    T = len(coef)
    if init is None:
        labels = np.arange(n0)
    else:
        labels = np.unique(np.asarray(init, dtype=np.int64), return_inverse=True)[1]
    single_layer = np.all(np.diff(level.lptr) <= 1)
    state_layer = np.zeros(n0, np.int64)
    state_layer[np.diff(level.lptr) == 1] = level.lay
    best = level.objective(labels, coef)
    passes = 0
    first = True
    while passes < cfg.max_passes:
        mapping = np.arange(n0)
        cur, start = level, labels
        for npass in range(int(cfg.max_passes) - passes):
            comm, gain = _local_moving(cur, coef, start, rng, weighted)
            passes += 1
            _, comm = np.unique(comm, return_inverse=True)
            k = int(comm.max()) + 1 if len(comm) else 0
            if npass == 0 and refine and single_layer:
                sub, _ = _local_moving(cur, coef, np.arange(cur.n), rng, weighted,
                                       key=comm * T + state_layer)
                _, sub = np.unique(sub, return_inverse=True)
                n_sub = int(sub.max()) + 1 if len(sub) else 0
                parent = np.zeros(n_sub, np.int64)
                parent[sub] = comm
            if not (npass == 0 and refine and single_layer) or n_sub == cur.n:
                # no refinement, or refinement did not coarsen anything
                sub, n_sub, parent = comm, k, np.arange(k)
            # a non-singleton start may only gain after its first aggregation
            if n_sub == cur.n or k == 1 or (gain <= cfg.min_gain and npass > 0 and n_sub == k):
                mapping = comm[mapping]
                break
            mapping = sub[mapping]
            cur = cur.aggregate(sub, n_sub)
            start = parent
        else:
            _, mapping = np.unique(start[mapping], return_inverse=True)
        q = level.objective(mapping, coef)
        improved = q > best + cfg.min_gain
        if improved or (first and q >= best):
            labels, best = mapping, q
        first = False
        if not improved:
            break
    return labels, best


def _build_level(net: MultilayerNetwork, topo: InterlayerTopology, params: ModularityParams):
    T = net.num_layers
    beta = params.betas(T)
    if params.directed is False and net.directed:
        raise ValidationError("an undirected null model cannot be applied to a directed network")
    blocks = sp.block_diag([beta[t] * net.layers[t] for t in range(T)], format="csr")
    src, dst, ls, lt = topo.coupling_pairs(net)
    n = net.num_states
    if len(src):
        w = coupling_weights(params.omega, ls, lt, T)
        C = sp.csr_matrix((w, (src, dst)), shape=(n, n))
        W = (blocks + C).tocsr()
    else:
        W = blocks
    S = (W + W.T).tocsr()
    S.eliminate_zeros()
    dout = np.concatenate([net.out_degrees(t) for t in range(T)])
    din = np.concatenate([net.in_degrees(t) for t in range(T)])
    level = _Level(S, np.arange(n + 1), net.layer_of_state(), dout, din)
    return level, null_coefficients(net, params)


def maximize(net: MultilayerNetwork, topo: InterlayerTopology, params: ModularityParams,
             cfg: OptimizerConfig | None = None, init: Partition | None = None) -> tuple[Partition, float]:
    """Locally optimal partition of multilayer modularity.

    Starts from ``init`` (singletons by default), alternates node moves and
    aggregation until a pass gains at most ``cfg.min_gain``. Small instances
    are then polished by vertex-mover passes, alternating with the multilevel
    phase until neither improves.

    :return: (partition, Q) with Q recomputed on the flat partition
    """
    cfg = cfg or OptimizerConfig()
    topo.validate(net)
    level, coef = _build_level(net, topo, params)
    init_labels = None
    if init is not None:
        init.check_matches(net)
        init_labels = init.labels
    labels, _ = louvain(level, coef, cfg, init_labels)
    if level.n <= cfg.polish_max_states:
        rng = np.random.default_rng([cfg.rng_seed, 1])
        weighted = cfg.move_policy is MovePolicy.WEIGHTED_RANDOM
        q = level.objective(labels, coef)
        for _ in range(int(cfg.max_passes)):
            labels, q_pol = polish(level, coef, labels, rng, weighted)
            if q_pol <= q + cfg.min_gain:
                break
            labels, q = louvain(level, coef, cfg, labels)
    part = Partition(labels, net.layer_sizes).canonical()
    if cfg.postprocess_persistence and net.num_layers > 1 and topo.kind is not TopologyKind.MULTIPLEX:
        part = postprocess_persistence(net, topo, part, params)
    return part, multilayer_modularity(net, topo, part, params)


def postprocess_persistence(net: MultilayerNetwork, topo: InterlayerTopology, p: Partition,
                            params: ModularityParams) -> Partition:
    """Align labels of consecutive layers by maximum overlap.

    Layer t's communities are matched to the labels of layer t-1 (or of the
    parents) with the Hungarian method; unmatched communities get fresh
    labels. A relabelling is kept only if Q does not decrease. Relabelling
    within one layer leaves every intralayer term unchanged, so only the
    coupling term is compared.
    """
    if topo.kind is TopologyKind.MULTIPLEX:
        raise ValidationError("persistence relabelling needs a temporal or multilevel topology")
    p.check_matches(net)
    labels = p.labels.copy()
    off = net.offsets
    fresh = int(labels.max()) + 1 if len(labels) else 0
    current = interlayer_term(net, topo, p, params.omega)
    for t in range(1, net.num_layers):
        prev = labels[off[t - 1]:off[t]]
        if topo.kind is TopologyKind.MULTILEVEL:
            prev = prev[topo.parents[t - 1]]
        cur = labels[off[t]:off[t + 1]]
        cl, ci = np.unique(cur, return_inverse=True)
        pl, pi = np.unique(prev, return_inverse=True)
        overlap = sp.coo_matrix((np.ones(len(cur)), (ci, pi)), shape=(len(cl), len(pl))).toarray()
        rows, cols = linear_sum_assignment(overlap, maximize=True)
        new = np.full(len(cl), -1, np.int64)
        keep = overlap[rows, cols] > 0
        new[rows[keep]] = pl[cols[keep]]
        n_un = int(np.count_nonzero(new < 0))
        new[new < 0] = np.arange(fresh, fresh + n_un)
        trial = labels.copy()
        trial[off[t]:off[t + 1]] = new[ci]
        q = interlayer_term(net, topo, Partition(trial, net.layer_sizes), params.omega)
        if q >= current:
            labels, current = trial, q
            fresh += n_un
    return Partition(labels, net.layer_sizes)


__all__ = ["MovePolicy", "OptimizerConfig", "maximize", "postprocess_persistence", "louvain"]
