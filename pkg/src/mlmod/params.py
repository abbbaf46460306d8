"""Parameter containers shared by the quality, estimator and optimizer modules."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .netcore import ValidationError


def _per_layer(x, T: int, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 0:
        return np.full(T, float(a))
    if a.shape != (T,):
        raise ValidationError(f"{name} needs a scalar or {T} per-layer values, got shape {a.shape}")
    return a.copy()


@dataclass(frozen=True)
class ModularityParams:
    """Resolution, layer weights and interlayer coupling of multilayer modularity.

    ``gamma`` and ``beta`` are scalars or per-layer vectors. ``omega`` is a
    scalar, a per-layer vector whose entry t weights links into layer t
    (entry 0 is unused), or a T x T matrix of multiplex pair weights.
    ``directed=None`` follows the network.
    """

    gamma: object = 1.0
    omega: object = 0.0
    beta: object = 1.0
    directed: bool | None = None

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=np.float64)
        if np.any(~np.isfinite(g)) or np.any(g < 0):
            raise ValidationError("resolutions must be finite and non-negative")
        om = np.asarray(self.omega, dtype=np.float64)
        if np.any(~np.isfinite(om)) or np.any(om < 0):
            raise ValidationError("interlayer couplings must be finite and non-negative")
        if np.any(~np.isfinite(np.asarray(self.beta, dtype=np.float64))):
            raise ValidationError("layer weights must be finite")

    def gammas(self, T: int) -> np.ndarray:
        return _per_layer(self.gamma, T, "gamma")

    def betas(self, T: int) -> np.ndarray:
        return _per_layer(self.beta, T, "beta")


@dataclass(frozen=True)
class SBMParams:
    """Planted-partition model with label copying between layers.

    ``theta_in``/``theta_out``/``K`` are global scalars or per-layer vectors.
    ``p`` is a scalar, a per-layer vector (entry t is the copying probability
    into layer t; entry 0 unused) or a T x T matrix ``p[s, t]`` (multiplex).
    """

    theta_in: object
    theta_out: object
    p: object = 0.0
    K: object = 2
    flags: tuple = field(default=(), compare=False)

    def thetas(self, T: int) -> tuple[np.ndarray, np.ndarray]:
        return _per_layer(self.theta_in, T, "theta_in"), _per_layer(self.theta_out, T, "theta_out")

    def Ks(self, T: int) -> np.ndarray:
        return _per_layer(self.K, T, "K")

    @property
    def per_layer(self) -> bool:
        return any(np.ndim(x) > 0 for x in (self.theta_in, self.theta_out, self.p, self.K))
