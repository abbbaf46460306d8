"""Fixed-point iteration between modularity maximization and planted-partition
parameter estimation, plus a multi-start driver."""
from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .estimator import (
    OMEGA_MAX,
    DegenerateEstimate,
    beta_weights,
    estimate_K,
    estimate_p_multilevel,
    estimate_p_multiplex,
    estimate_p_temporal,
    estimate_theta,
    gamma_from_theta,
    omega_multiplex_uniform,
    omega_temporal,
)
from .evalx import pairwise_nmi_matrix
from .netcore import InterlayerTopology, MultilayerNetwork, Partition, TopologyKind, ValidationError
from .optimizer import OptimizerConfig, maximize
from .params import ModularityParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IterConfig:
    """Settings of the fixed-point iteration.

    :param gamma0: starting resolution (scalar or per layer)
    :param omega0: starting coupling (scalar or per layer)
    :param tol: absolute tolerance on successive (gamma, omega)
    :param K_max: if the estimated K exceeds it, shrink gamma instead of updating
    :param fix_gamma: layer-dependent mode only; keep gamma_t = gamma0 and beta_t = 1
    :param trials_per_iter: optimizer restarts per iteration; the best one is used
    :param warm_start: also run one maximization started from the previous
        iteration's partition and keep it if its Q is at least as high
    :param optimizer: settings for each maximization; its seed roots all trial seeds
    """

    gamma0: object = 1.0
    omega0: object = 1.0
    max_iters: int = 30
    tol: float = 1e-3
    K_max: int | None = None
    gamma_shrink: float = 0.8
    fix_gamma: bool = False
    omega_max: float = OMEGA_MAX
    trials_per_iter: int = 1
    warm_start: bool = True
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError("tol must be positive")
        if not 0 < self.gamma_shrink < 1:
            raise ValidationError("gamma_shrink must lie in (0, 1)")
        if self.max_iters < 1 or self.trials_per_iter < 1:
            raise ValidationError("max_iters and trials_per_iter must be positive")
        if self.K_max is not None and self.K_max < 1:
            raise ValidationError("K_max must be positive")
        if not self.omega_max > 0:
            raise ValidationError("omega_max must be positive")


@dataclass
class IterStep:
    """Parameters used in one iteration and the estimates they produced."""

    iteration: int
    gamma: object
    omega: object
    beta: object
    Q: float
    K: int
    p: object = None
    theta_in: object = None
    theta_out: object = None
    action: str = "update"

    def to_json(self) -> dict:
        def conv(x):
            if isinstance(x, np.ndarray):
                return x.tolist()
            if isinstance(x, np.generic):
                return x.item()
            return x
        return {k: conv(v) for k, v in asdict(self).items()}


@dataclass
class IterResult:
    converged: bool
    gamma: object
    omega: object
    beta: object
    final_partition: Partition
    final_Q: float
    best_partition: Partition
    best_Q: float
    best_iteration: int
    trajectory: list
    message: str = ""

    @property
    def iterations(self) -> int:
        return len(self.trajectory)

    @property
    def partition(self) -> Partition:
        """The fixed-point partition if converged, else the best one seen."""
        return self.final_partition if self.converged else self.best_partition

    @property
    def omega_symmetric(self):
        """Coupling in the convention that counts each interlayer link in both
        directions (half the value used here)."""
        return np.asarray(self.omega) / 2 if np.ndim(self.omega) else self.omega / 2


def _trial_seed(root: int, trial: int) -> int:
    # the same seeds every iteration make each step a deterministic function of
    # (gamma, omega), so an exact fixed point can be reached
    return int(np.random.SeedSequence([int(root) & (2**63 - 1), trial]).generate_state(1, np.uint64)[0])


def _best_of(net, topo, params, cfg: IterConfig, prev: Partition | None = None):
    best = None
    for trial in range(cfg.trials_per_iter):
        ocfg = replace(cfg.optimizer, rng_seed=_trial_seed(cfg.optimizer.rng_seed, trial))
        part, q = maximize(net, topo, params, ocfg)
        if best is None or q > best[1]:
            best = (part, q)
    if cfg.warm_start and prev is not None:
        # ties go to the warm start so that a repeated partition can close the loop
        part, q = maximize(net, topo, params, cfg.optimizer, init=prev)
        if q >= best[1]:
            best = (part, q)
    return best


def _estimate_uniform(net, topo, part: Partition, omega_max: float):
    th = estimate_theta(net, part)
    K = estimate_K(part)
    T = net.num_layers
    if K < 2:
        raise DegenerateEstimate("the partition has a single community; coupling cannot be estimated")
    if th.theta_in <= th.theta_out:
        raise DegenerateEstimate("theta_in <= theta_out; the partition is not assortative")
    gamma = gamma_from_theta(th.theta_in, th.theta_out)
    if T < 2:
        return gamma, 0.0, None, K, th
    if topo.kind is TopologyKind.MULTIPLEX:
        p = estimate_p_multiplex(part, K)
        omega = omega_multiplex_uniform(th.theta_in, th.theta_out, p, K, T, omega_max)
    else:
        if topo.kind is TopologyKind.MULTILEVEL:
            p = estimate_p_multilevel(part, topo, K)
        else:
            p = estimate_p_temporal(part, K)
        omega = omega_temporal(th.theta_in, th.theta_out, p, K, omega_max)
    return gamma, omega, p, K, th


def _converged(a, b, tol) -> bool:
    return bool(np.all(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) <= tol))


def iterate(net: MultilayerNetwork, topo: InterlayerTopology, cfg: IterConfig | None = None) -> IterResult:
    """Alternate maximization and re-estimation of (gamma, omega).

    Temporal and multilevel networks use the chain coupling formula,
    multiplex networks the uniform all-pairs one.
    """
    cfg = cfg or IterConfig()
    topo.validate(net)
    gamma = float(cfg.gamma0)
    omega = float(cfg.omega0)
    if gamma < 0 or omega < 0:
        raise ValidationError("starting gamma and omega must be non-negative")
    traj = []
    best = None
    last = None
    converged = False
    message = ""
    for it in range(cfg.max_iters):
        params = ModularityParams(gamma=gamma, omega=omega)
        part, q = _best_of(net, topo, params, cfg, last[0] if last else None)
        last = (part, q)
        if best is None or q > best[1]:
            best = (part, q, it)
        try:
            g_new, w_new, p, K, th = _estimate_uniform(net, topo, part, cfg.omega_max)
        except DegenerateEstimate as exc:
            traj.append(IterStep(it, gamma, omega, 1.0, q, estimate_K(part), action="degenerate"))
            message = str(exc)
            log.info("iteration %d stopped: %s", it, exc)
            break
        step = IterStep(it, gamma, omega, 1.0, q, K, p, th.theta_in, th.theta_out)
        if cfg.K_max is not None and K > cfg.K_max:
            g_new, w_new = cfg.gamma_shrink * gamma, omega
            step.action = "shrink"
        traj.append(step)
        log.debug("iteration %d: gamma=%.6g omega=%.6g Q=%.6g K=%d", it, gamma, omega, q, K)
        done = step.action == "update" and _converged(g_new, gamma, cfg.tol) and _converged(w_new, omega, cfg.tol)
        gamma, omega = g_new, w_new
        if done:
            converged = True
            break
    if not converged and not message:
        message = f"no convergence within {cfg.max_iters} iterations"
    return IterResult(converged, gamma, omega, 1.0, last[0], last[1], best[0], best[1], best[2], traj, message)


def iterate_layer_dependent(net: MultilayerNetwork, topo: InterlayerTopology,
                            cfg: IterConfig | None = None) -> IterResult:
    """Per-layer variant: updates gamma_t, omega_t and layer weights beta_t.

    With ``fix_gamma`` only omega_t changes (gamma_t = gamma0, beta_t = 1).
    """
    cfg = cfg or IterConfig()
    if topo.kind is TopologyKind.MULTIPLEX:
        raise ValidationError("layer-dependent iteration is not available for multiplex networks")
    topo.validate(net)
    T = net.num_layers
    if T < 2:
        raise ValidationError("layer-dependent iteration needs at least two layers")
    gamma = np.broadcast_to(np.asarray(cfg.gamma0, dtype=float), (T,)).copy()
    omega = np.broadcast_to(np.asarray(cfg.omega0, dtype=float), (T,)).copy()
    omega[0] = 0.0
    beta = np.ones(T)
    traj = []
    best = None
    last = None
    converged = False
    message = ""
    for it in range(cfg.max_iters):
        params = ModularityParams(gamma=gamma.copy(), omega=omega.copy(), beta=beta.copy())
        part, q = _best_of(net, topo, params, cfg, last[0] if last else None)
        last = (part, q)
        if best is None or q > best[1]:
            best = (part, q, it)
        K = estimate_K(part)
        try:
            if K < 2:
                raise DegenerateEstimate("the partition has a single community; coupling cannot be estimated")
            th = estimate_theta(net, part, per_layer=True)
            Kt = estimate_K(part, per_layer=True)
            if topo.kind is TopologyKind.MULTILEVEL:
                p = estimate_p_multilevel(part, topo, K, per_layer=True)
            else:
                p = estimate_p_temporal(part, K, per_layer=True)
            gap = np.log(th.theta_in) - np.log(th.theta_out)
            if gap.mean() <= 0:
                raise DegenerateEstimate("mean log(theta_in / theta_out) is not positive")
            w_new = omega_temporal(th.theta_in, th.theta_out, p, Kt, cfg.omega_max)
            if cfg.fix_gamma:
                g_new, b_new = gamma.copy(), np.ones(T)
            else:
                g_new = np.asarray(gamma_from_theta(th.theta_in, th.theta_out), dtype=float)
                b_new = beta_weights(th.theta_in, th.theta_out)
        except DegenerateEstimate as exc:
            traj.append(IterStep(it, gamma.copy(), omega.copy(), beta.copy(), q, K, action="degenerate"))
            message = str(exc)
            log.info("iteration %d stopped: %s", it, exc)
            break
        step = IterStep(it, gamma.copy(), omega.copy(), beta.copy(), q, K, p, th.theta_in, th.theta_out)
        if cfg.K_max is not None and K > cfg.K_max and not cfg.fix_gamma:
            g_new, w_new, b_new = cfg.gamma_shrink * gamma, omega.copy(), beta.copy()
            step.action = "shrink"
        traj.append(step)
        done = (step.action == "update" and _converged(g_new, gamma, cfg.tol)
                and _converged(w_new, omega, cfg.tol))
        gamma, omega, beta = g_new, w_new, b_new
        if done:
            converged = True
            break
    if not converged and not message:
        message = f"no convergence within {cfg.max_iters} iterations"
    return IterResult(converged, gamma, omega, beta, last[0], last[1], best[0], best[1], best[2], traj, message)


@dataclass
class MultiRunResult:
    records: list
    nmi: np.ndarray
    results: list


def multi_run(net: MultilayerNetwork, topo: InterlayerTopology, cfg: IterConfig, n_runs: int, seed: int = 0,
              gamma_range=(0.0, 5.0), omega_range=(0.0, 1.0), layer_dependent: bool = False,
              workers: int = 1) -> MultiRunResult:
    """Run the iteration from ``n_runs`` random starting points.

    Starting values are drawn uniformly from the ranges with a generator
    seeded by ``seed``; each run gets an independent optimizer seed. Runs
    may execute on ``workers`` threads; results are ordered by run index.
    """
    if n_runs < 1:
        raise ValidationError("n_runs must be at least 1")
    rng = np.random.default_rng(seed)
    g0 = rng.uniform(*gamma_range, size=n_runs)
    w0 = rng.uniform(*omega_range, size=n_runs)
    seeds = np.random.SeedSequence(seed).generate_state(n_runs, np.uint64)
    fn = iterate_layer_dependent if layer_dependent else iterate

    def one(k):
        rc = replace(cfg, gamma0=float(g0[k]), omega0=float(w0[k]),
                     optimizer=replace(cfg.optimizer, rng_seed=int(seeds[k])))
        return fn(net, topo, rc)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(one, range(n_runs)))
    else:
        results = [one(k) for k in range(n_runs)]
    records = []
    for k, r in enumerate(results):
        last = r.trajectory[-1] if r.trajectory else None
        records.append({
            "run": k, "gamma0": float(g0[k]), "omega0": float(w0[k]),
            "gamma": float(np.mean(r.gamma)), "omega": float(np.mean(r.omega)),
            "converged": r.converged, "iterations": r.iterations, "best_Q": r.best_Q,
            "K": last.K if last else 0,
            "p": float(np.mean(last.p)) if last is not None and last.p is not None else float("nan"),
        })
    nmi = pairwise_nmi_matrix([r.partition for r in results])
    return MultiRunResult(records, nmi, results)


# -- serialization -----------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.9g" % x
    return str(x)


def write_records_csv(records: list, path) -> None:
    """One row per record, header from the keys of the first record."""
    if not records:
        raise ValidationError("nothing to write")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        keys = list(records[0])
        w.writerow(keys)
        for r in records:
            w.writerow([_fmt(r[k]) for k in keys])


def write_matrix_csv(M: np.ndarray, path, labels=None) -> None:
    M = np.atleast_2d(M)
    labels = [str(i) for i in range(M.shape[1])] if labels is None else [str(x) for x in labels]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row"] + labels)
        for i, row in enumerate(M):
            w.writerow([labels[i] if i < len(labels) else str(i)] + [_fmt(float(v)) for v in row])


def write_trajectory_jsonl(result: IterResult, path) -> None:
    with open(path, "w") as fh:
        for step in result.trajectory:
            fh.write(json.dumps(step.to_json()) + "\n")


def summary(result: IterResult) -> dict:
    def conv(x):
        return np.asarray(x).tolist() if np.ndim(x) else float(x)
    return {
        "converged": result.converged, "iterations": result.iterations, "message": result.message,
        "gamma": conv(result.gamma), "omega": conv(result.omega), "omega_symmetric": conv(result.omega_symmetric),
        "beta": conv(result.beta), "final_Q": result.final_Q, "best_Q": result.best_Q,
        "best_iteration": result.best_iteration,
        "K": result.trajectory[-1].K if result.trajectory else None,
    }


__all__ = [
    "IterConfig", "IterStep", "IterResult", "iterate", "iterate_layer_dependent", "MultiRunResult",
    "multi_run", "write_records_csv", "write_matrix_csv", "write_trajectory_jsonl", "summary",
]
