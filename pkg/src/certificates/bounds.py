"""Closed-form bounds on lambda* and explicit profiles.

Exports:
    - omega_alpha_constant: C(n) = 8 n^2 + 16 n, the biharmonic of (1 - r^2)^2
    - omega_alpha_bound: C(n) alpha (1 - alpha)^p
    - lower_bound: max{4n(n-2), 2n(n+2)} for p = 1
    - upper_bound: nu1 / c_p with c_p = (p+1)^(p+1) / p^p
    - singular_profile: omega = 1 - r^(4/(p+1)) and its parameter
"""

from __future__ import annotations

from src.common.config import ConfigError
from src.discretization.models import RadialField, RadialMesh


def omega_alpha_constant(n: int) -> float:
    return 8.0 * n * n + 16.0 * n


def omega_alpha_bound(n: int, alpha: float, p: float = 1.0) -> float:
    """Bound certified by the subsolution alpha (1 - r^2)^2; maximal at alpha = 1/(p+1)."""
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    return omega_alpha_constant(n) * alpha * (1.0 - alpha) ** p


def convexity_constant(p: float) -> float:
    """Best c_p with (1 - u)^(-p) >= c_p u on [0, 1); c_1 = 4."""
    return (p + 1.0) ** (p + 1.0) / p**p


def lower_bound(n: int, p: float = 1.0) -> float:
    """max{4n(n-2), 2n(n+2)} for p = 1.

    2n(n+2) dominates for n <= 6 and 4n(n-2) for n >= 7. For p != 1 only the
    omega_alpha bound at alpha = 1/(p+1) is available.
    """
    if int(n) != n or n < 1:
        raise ConfigError(f"Dimension n must be an integer >= 1, got {n}")
    if p == 1.0:
        return float(max(4 * n * (n - 2), 2 * n * (n + 2)))
    return omega_alpha_bound(n, 1.0 / (p + 1.0), p)


def upper_bound(nu1: float, p: float = 1.0) -> float:
    """nu1 / c_p; nu1 / 4 for p = 1."""
    return nu1 / convexity_constant(p)


def singular_profile(mesh: RadialMesh, n: int, p: float) -> tuple[RadialField, float]:
    """omega = 1 - r^k, k = 4/(p+1), solving Delta^2 omega = lambda_s (1 - omega)^(-p) for r > 0.

    lambda_s = k (2 - k)(k + n - 2)(k + n - 4). The profile is not clamped:
    omega'(1) = -k.

    Raises:
        ConfigError: If p <= 1 or lambda_s <= 0 for this n.
    """
    if not p > 1.0:
        raise ConfigError(f"The explicit singular profile needs p > 1, got {p}")
    k = 4.0 / (p + 1.0)
    lambda_s = k * (2.0 - k) * (k + n - 2.0) * (k + n - 4.0)
    if not lambda_s > 0:
        raise ConfigError(f"No positive singular parameter for n = {n}, p = {p} (lambda_s = {lambda_s})")
    return RadialField(1.0 - mesh.nodes**k), float(lambda_s)
