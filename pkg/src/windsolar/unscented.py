"""Unscented transform with a single free centre weight ``w0``.

For ``q`` inputs the transform uses ``2q + 1`` sigma points: the mean,
and the mean plus/minus each column of the lower-triangular square root
of ``q / (1 - w0) * cov``. The centre carries weight ``w0`` and every
other point ``(1 - w0) / (2q)``; the same weights serve mean and
covariance.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, DimensionError, ParameterDomainError, PropagationError
from .power import pv_power, wind_power

DEFAULT_W0 = 1.0 / 3.0
JITTER = 1e-12


@dataclass(frozen=True)
class InputMoments:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise DimensionError(f"covariance must be {mean.size}x{mean.size}, got {cov.shape}")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12 * max(1.0, np.abs(cov).max())):
            raise ParameterDomainError("covariance matrix must be symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self):
        return self.mean.size

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(np.array(d["mean"], dtype=float), np.array(d["cov"], dtype=float))


@dataclass(frozen=True)
class SigmaSet:
    points: np.ndarray  # (2q+1, q); row 0 is the mean
    weights: np.ndarray  # (2q+1,)


@dataclass(frozen=True)
class OutputMoments:
    mean: np.ndarray
    cov: np.ndarray

    def to_dict(self):
        return {"mean": self.mean.tolist(), "cov": self.cov.tolist()}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def psd_cholesky(a, tol=None):
    """Lower-triangular ``L`` with ``L L^T = a`` for a PSD matrix.

    Unlike ``numpy.linalg.cholesky`` this accepts singular matrices: a
    pivot that is zero (within ``tol``) yields a zero column. Raises
    ``np.linalg.LinAlgError`` when ``a`` is not positive semidefinite.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    scale = max(float(np.abs(np.diag(a)).max(initial=0.0)), 1e-300)
    tol = 1e-14 * scale if tol is None else tol
    L = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - L[j, :j] @ L[j, :j]
        if d < -tol:
            raise np.linalg.LinAlgError(f"matrix is not PSD (pivot {j} = {d!r})")
        if d <= tol:
            resid = a[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]
            if np.any(np.abs(resid) > np.sqrt(tol * scale)):
                raise np.linalg.LinAlgError(f"matrix is not PSD (zero pivot {j} with coupling)")
            continue
        root = np.sqrt(d)
        L[j, j] = root
        L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / root
    return L


def sigma_points(moments, w0=DEFAULT_W0):
    """Sigma points and weights for ``moments`` (weights sum to one)."""
    if not (0.0 <= w0 < 1.0):
        raise ParameterDomainError(f"centre weight must lie in [0, 1), got {w0!r}")
    q = moments.dim
    scaled = (q / (1.0 - w0)) * moments.cov
    try:
        root = psd_cholesky(scaled)
    except np.linalg.LinAlgError:
        try:
            root = psd_cholesky(scaled + JITTER * np.eye(q))
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(f"covariance is not positive semidefinite: {exc}") from None
    mu = moments.mean
    pts = np.vstack([mu, mu + root.T, mu - root.T])
    weights = np.full(2 * q + 1, (1.0 - w0) / (2 * q))
    weights[0] = w0
    return SigmaSet(points=pts, weights=weights)


def propagate(moments, f, w0=DEFAULT_W0):
    """Output mean and covariance of ``y = f(x)``.

    ``f`` maps a length-q vector to a length-r vector (scalars are
    promoted). Mean is the weighted sum of ``f`` at the sigma points;
    covariance is the weighted sum of outer products of deviations.
    """
    sig = sigma_points(moments, w0)
    ys = []
    for k, x in enumerate(sig.points):
        try:
            y = np.atleast_1d(np.asarray(f(x), dtype=float))
        except Exception as exc:
            raise PropagationError(f"map failed at sigma point {k} = {x.tolist()}: {exc}") from exc
        if not np.all(np.isfinite(y)):
            raise PropagationError(f"map returned non-finite output at sigma point {k} = {x.tolist()}")
        ys.append(y)
    Y = np.vstack(ys)
    mean = sig.weights @ Y
    dev = Y - mean
    cov = (sig.weights[:, None] * dev).T @ dev
    cov = 0.5 * (cov + cov.T)
    return OutputMoments(mean=mean, cov=cov)


def power_map(turbine, pv):
    """(wind m/s, irradiance kW/m^2) -> (wind kW, PV kW)."""

    def f(x):
        return np.array([wind_power(x[0], turbine), pv_power(x[1], pv)])

    return f


def propagate_power(moments, turbine, pv, w0=DEFAULT_W0):
    """Unscented moments of wind and PV power from weather moments."""
    if moments.dim != 2:
        raise DimensionError("power propagation expects (wind speed, irradiance) inputs")
    return propagate(moments, power_map(turbine, pv), w0)
