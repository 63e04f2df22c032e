"""Domain types, Oseen-Frank energy densities and small shared utilities.

Gradient convention: ``grad[..., i, j] = d n_i / d x_j``. Curl and divergence
are derived from that matrix, so the right-handed helix
``(cos tz, sin tz, 0)`` has ``n . curl n = -t``.

All density functions broadcast over leading axes: ``n`` has shape
``(..., 3)`` and ``grad`` has shape ``(..., 3, 3)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

UNIT_TOL = 1e-12
FILE_UNIT_TOL = 1e-8

# Levi-Civita symbol, eps[i, j, k]
LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0


@dataclass(frozen=True)
class ElasticConstants:
    """Frank elastic constants.

    ``k1`` splay, ``k2`` twist, ``k3`` bend, ``k4`` saddle-splay partner.
    """

    k1: float = 1.0
    k2: float = 1.0
    k3: float = 1.0
    k4: float = 0.0
    one_constant: bool = False

    def __post_init__(self):
        for name in ("k1", "k2", "k3", "k4"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if min(self.k1, self.k2, self.k3) <= 0:
            raise ValueError("k1, k2 and k3 must be positive")
        if self.one_constant and not (self.k1 == self.k2 == self.k3 and self.k4 == 0):
            raise ValueError("one-constant mode requires k1 = k2 = k3 and k4 = 0")

    @classmethod
    def single(cls, k: float = 1.0) -> "ElasticConstants":
        return cls(k, k, k, 0.0, one_constant=True)

    @classmethod
    def from_sequence(cls, values) -> "ElasticConstants":
        """Build from ``(k1, k2, k3[, k4])``; flags one-constant when it applies."""
        vals = [float(v) for v in values]
        if len(vals) == 3:
            vals.append(0.0)
        if len(vals) != 4:
            raise ValueError("expected three or four elastic constants")
        k1, k2, k3, k4 = vals
        return cls(k1, k2, k3, k4, one_constant=(k1 == k2 == k3 and k4 == 0))

    def as_dict(self) -> dict:
        return {"k1": self.k1, "k2": self.k2, "k3": self.k3, "k4": self.k4}


@dataclass(frozen=True)
class Chirality:
    """Nonnegative chirality ``t``; ``reflected`` records a negative input."""

    t: float
    reflected: bool = False

    def __post_init__(self):
        if not math.isfinite(self.t) or self.t < 0:
            raise ValueError("stored chirality must be finite and nonnegative")

    def __float__(self):
        return float(self.t)


def normalize_chirality(t_raw) -> Chirality:
    """Fold the sign of ``t`` into a reflection ``x -> -x``."""
    if isinstance(t_raw, Chirality):
        return t_raw
    t_raw = float(t_raw)
    if not math.isfinite(t_raw):
        raise ValueError(f"chirality must be finite, got {t_raw!r}")
    return Chirality(abs(t_raw), t_raw < 0)


def as_chirality(t) -> Chirality:
    return t if isinstance(t, Chirality) else normalize_chirality(t)


@dataclass(frozen=True)
class DomainSpec:
    """Cell ``(-l1, l1) x (-l2, l2) x (0, 1)``."""

    l1: float = 0.25
    l2: float = 0.25

    def __post_init__(self):
        if not (self.l1 > 0 and self.l2 > 0):
            raise ValueError("half-widths must be positive")

    @property
    def area(self) -> float:
        return 4.0 * self.l1 * self.l2


def normalize(n: np.ndarray) -> np.ndarray:
    """Project vectors onto the unit sphere along the last axis."""
    n = np.asarray(n, dtype=float)
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


def divergence(grad: np.ndarray) -> np.ndarray:
    return np.trace(grad, axis1=-2, axis2=-1)


def curl(grad: np.ndarray) -> np.ndarray:
    """``(curl n)_i = eps_ijk d_j n_k`` from ``grad[..., k, j]``."""
    return np.einsum("ijk,...kj->...i", LEVI_CIVITA, grad)


def saddle_splay_density(grad: np.ndarray) -> np.ndarray:
    """``tr(grad^2) - (div n)^2``."""
    return np.einsum("...ij,...ji->...", grad, grad) - divergence(grad) ** 2


def frank_density(n, grad, K: ElasticConstants, t) -> np.ndarray:
    """Full Oseen-Frank density with the saddle-splay term.

    ``K1 (div n)^2 + K2 (n.curl n + t)^2 + K3 |n x curl n|^2
    + (K2 + K4)(tr(grad^2) - (div n)^2)``.
    """
    t = float(as_chirality(t))
    n = np.asarray(n, dtype=float)
    grad = np.asarray(grad, dtype=float)
    div = divergence(grad)
    c = curl(grad)
    twist = np.einsum("...i,...i->...", n, c) + t
    bend = np.cross(n, c)
    return (
        K.k1 * div**2
        + K.k2 * twist**2
        + K.k3 * np.einsum("...i,...i->...", bend, bend)
        + (K.k2 + K.k4) * saddle_splay_density(grad)
    )


def one_constant_density(n, grad, t) -> np.ndarray:
    """``|grad|^2 + 2t n.curl n + t^2`` (unit elastic constant)."""
    t = float(as_chirality(t))
    n = np.asarray(n, dtype=float)
    grad = np.asarray(grad, dtype=float)
    c = curl(grad)
    return (
        np.einsum("...ij,...ij->...", grad, grad)
        + 2.0 * t * np.einsum("...i,...i->...", n, c)
        + t * t
    )


def density_partials(n, grad, K: ElasticConstants, t):
    """Value and partial derivatives of the density in ``n`` and ``grad``.

    Uses the one-constant form when ``K.one_constant`` (scaled by ``K.k1``),
    otherwise :func:`frank_density`. Valid for non-unit ``n`` too, so the
    derivatives are exact for whatever the formula evaluates.
    """
    t = float(as_chirality(t))
    c = curl(grad)
    if K.one_constant:
        k = K.k1
        value = k * (
            np.einsum("...ij,...ij->...", grad, grad)
            + 2.0 * t * np.einsum("...i,...i->...", n, c)
            + t * t
        )
        dn = (2.0 * k * t) * c
        dc = (2.0 * k * t) * n
        dgrad = (2.0 * k) * grad
    else:
        div = divergence(grad)
        twist = np.einsum("...i,...i->...", n, c) + t
        m = np.cross(n, c)
        value = (
            K.k1 * div**2
            + K.k2 * twist**2
            + K.k3 * np.einsum("...i,...i->...", m, m)
            + (K.k2 + K.k4) * saddle_splay_density(grad)
        )
        dn = 2.0 * K.k2 * twist[..., None] * c + 2.0 * K.k3 * np.cross(c, m)
        dc = 2.0 * K.k2 * twist[..., None] * n + 2.0 * K.k3 * np.cross(m, n)
        eye = np.eye(3)
        dgrad = (2.0 * (K.k1 - K.k2 - K.k4)) * div[..., None, None] * eye
        dgrad = dgrad + 2.0 * (K.k2 + K.k4) * np.swapaxes(grad, -1, -2)
    # d curl_i / d grad_kj = eps_ijk
    dgrad = dgrad + np.einsum("ijk,...i->...kj", LEVI_CIVITA, dc)
    return value, dn, dgrad


def _half_angle_ratio(x):
    # (1 - cos x) / x^2 = sinc(x / 2)^2 / 2, regular at x = 0
    return 0.5 * np.sinc(np.asarray(x) / (2.0 * np.pi)) ** 2


def angle_inequality_constant() -> float:
    """Infimum of ``(1 - cos x) / x^2`` over ``[-pi, pi]``.

    The ratio is even, so only ``[0, pi]`` is searched; the removable
    singularity at 0 takes the limiting value 1/2.
    """
    res = minimize_scalar(_half_angle_ratio, bounds=(0.0, math.pi), method="bounded",
                          options={"xatol": 1e-12})
    candidates = [float(res.fun), float(_half_angle_ratio(0.0)), float(_half_angle_ratio(math.pi))]
    return min(candidates)


def euler_angles(n: np.ndarray):
    """``(theta, phi)`` with ``n = (cos phi cos theta, sin phi cos theta, sin theta)``."""
    n = np.asarray(n, dtype=float)
    theta = np.arcsin(np.clip(n[..., 2], -1.0, 1.0))
    phi = np.arctan2(n[..., 1], n[..., 0])
    return theta, phi


def director_from_angles(theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ct = np.cos(theta)
    return np.stack([np.cos(phi) * ct, np.sin(phi) * ct, np.sin(theta)], axis=-1)
