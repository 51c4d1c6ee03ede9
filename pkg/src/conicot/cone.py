"""Cone-geometry similarity kernels and cone distances over the real line.

Two kernel families are supported: a truncated cosine (Wasserstein-Fisher-Rao
geometry) and a Gaussian (Gaussian-Hellinger geometry). CLI names: "cos", "exp".
"""

from __future__ import annotations

import dataclasses
import enum

import numpy as np

from .errors import NegativeArgument, NonFinite, SizeCapExceeded


class KernelFamily(enum.Enum):
    TruncatedCosine = "cos"
    Gaussian = "exp"


@dataclasses.dataclass(frozen=True)
class ConeKernel:
    """The similarity profile Omega together with the cone angle delta > 0."""

    family: KernelFamily
    delta: float

    def __post_init__(self):
        if not (self.delta > 0):
            raise NegativeArgument(f"delta must be positive, got {self.delta}")

    @property
    def lipschitz(self) -> float:
        """Lipschitz constant of Omega on [0, inf)."""
        if self.family is KernelFamily.TruncatedCosine:
            return 1.0
        # max |d/dz exp(-z^2)| = sqrt(2/e) at z = 1/sqrt(2)
        return float(np.sqrt(2.0 / np.e))


@dataclasses.dataclass(frozen=True)
class KernelConstants:
    """Polynomial bound coefficients: 1 - C z^2 <= Omega(z) <= 1 - C z^2 + C' z^4."""

    C: float
    C_prime: float


def make_kernel(name: str, delta: float) -> ConeKernel:
    """Build a kernel from its CLI name ("cos" or "exp")."""
    return ConeKernel(KernelFamily(name), delta)


def omega_eval(kernel: ConeKernel, z):
    """Evaluate Omega at z >= 0 (scalar or array)."""
    z = np.asarray(z, dtype=np.float64)
    if not np.isfinite(z).all():
        raise NonFinite("omega argument must be finite")
    if (z < 0).any():
        raise NegativeArgument("omega argument must be nonnegative")
    if kernel.family is KernelFamily.TruncatedCosine:
        # exact zero past the truncation point (cos(pi/2) rounds to ~6e-17,
        # which would defeat downstream vanishing-slice detection)
        out = np.where(z < np.pi / 2, np.cos(np.minimum(z, np.pi / 2)), 0.0)
    else:
        out = np.exp(-z * z)
    return out if out.ndim else float(out)


def omega_of_gap(kernel: ConeKernel, u, v):
    """Convenience: Omega(|u - v| / (2 delta)); bit-identical to omega_eval."""
    gap = np.abs(np.asarray(u, dtype=np.float64) - np.asarray(v, dtype=np.float64))
    return omega_eval(kernel, gap / (2.0 * kernel.delta))


def cone_distance_sq(kernel: ConeKernel, p, q) -> float:
    """Squared cone distance between cone points p = (x, r), q = (y, s) over the line."""
    x, r = p
    y, s = q
    if r < 0 or s < 0:
        raise NegativeArgument("radial coordinates must be nonnegative")
    om = omega_of_gap(kernel, x, y)
    d2 = 4.0 * kernel.delta**2 * (r * r + s * s - 2.0 * r * s * om)
    return float(max(d2, 0.0))


def kernel_constants(kernel: ConeKernel) -> KernelConstants:
    """Polynomial sandwich coefficients for the two kernel families."""
    if kernel.family is KernelFamily.TruncatedCosine:
        return KernelConstants(C=0.5, C_prime=1.0 / 24.0)
    return KernelConstants(C=1.0, C_prime=0.5)


def kernel_pd_check(kernel: ConeKernel, omega_X, omega_Y, cap: int = 400) -> float:
    """Smallest eigenvalue of the (nm x nm) similarity matrix between kernel entries.

    Builds K[(i,k),(i',k')] = Omega(|omega_X(i,i') - omega_Y(k,k')| / 2 delta)
    and eigensolves it. Diagnostic only: callers treat >= -1e-9 as positive
    definite. Dense, so the instance size n*m is capped.
    """
    wx = np.asarray(omega_X, dtype=np.float64)
    wy = np.asarray(omega_Y, dtype=np.float64)
    n, m = wx.shape[0], wy.shape[0]
    if n * m > cap:
        raise SizeCapExceeded(f"n*m = {n * m} exceeds cap {cap}")
    # K[(i,k),(i',k')]; pair index p = i*m + k
    gx = wx[:, None, :, None]  # i, k, i', k'
    gy = wy[None, :, None, :]
    K = omega_eval(kernel, np.abs(gx - gy) / (2.0 * kernel.delta))
    K = np.asarray(K).reshape(n * m, n * m)
    K = 0.5 * (K + K.T)
    return float(np.linalg.eigvalsh(K)[0])
