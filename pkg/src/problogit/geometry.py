"""Classification-error geometry on the sphere and the calibrated metric.

Three groups of tools live here:

* angle/disagreement geometry: the probability that two linear classifiers
  disagree at a standard Gaussian point equals their angle over pi, and the
  exact probability of observing a flipped probit label;
* the weighted norm mixing length and direction errors, with the induced
  distance ``d_star`` to a calibrated target ``tau_star * beta_star``;
* an orthonormal frame completing a base direction, giving coordinates on
  the sphere's tangent space (length ``p - 1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from .validation import as_nonzero_vector, as_unit_vector, check_positive

__all__ = [
    "angle_disagreement",
    "wrong_label_prob",
    "disagreement_moment",
    "StarGeometry",
    "HFrame",
    "h_coordinates",
]


def angle_disagreement(a, b) -> float:
    """P[(a'x)(x'b) <= 0] for x ~ N(0, I): arccos of the cosine similarity, over pi.

    The cosine is clipped to [-1, 1] before arccos, since dot products of
    unit vectors can spill over by ~1e-16.
    """
    a = as_nonzero_vector(a, "a")
    b = as_nonzero_vector(b, "b")
    if a.shape != b.shape:
        raise ValueError("a and b must have the same dimension")
    c = float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
    c = min(1.0, max(-1.0, c))
    return math.acos(c) / math.pi


def wrong_label_prob(sigma: float) -> float:
    """Exact probability that a probit label disagrees with the noiseless sign.

    Equals ``arccos(1/sqrt(1+sigma^2)) / pi``, evaluated as
    ``arctan(sigma)/pi`` (the same angle, 1 ulp sharper: it is exactly 0.25
    at ``sigma = 1``).  Satisfies
    ``sigma/(pi*(1+sigma^2)) <= value <= sigma/pi``.
    """
    sigma = float(sigma)
    if sigma < 0 or not np.isfinite(sigma):
        raise ValueError(f"sigma must be a nonnegative finite number, got {sigma!r}")
    return math.atan(sigma) / math.pi


def disagreement_moment(m: int, cosine: float) -> float:
    """``E[|x'a|^m ; (a'x)(x'b) <= 0]`` for unit vectors with ``a'b = cosine``.

    Equals ``2**(1+m/2) * Gamma(1+m/2) * integral_0^arccos(cosine)
    sin(t)**m dt / (2*pi)``.  For ``m = 1`` this reduces to
    ``|a - b|^2 / sqrt(8*pi)``.
    """
    if m < 0 or int(m) != m:
        raise ValueError("m must be a nonnegative integer")
    cosine = min(1.0, max(-1.0, float(cosine)))
    theta = math.acos(cosine)
    integral, _ = quad(lambda t: math.sin(t) ** m, 0.0, theta, limit=200)
    return 2.0 ** (1.0 + m / 2.0) * float(gamma_fn(1.0 + m / 2.0)) * integral / (2.0 * math.pi)


@dataclass(frozen=True)
class StarGeometry:
    """Weighted geometry calibrated by the target length ``tau_star``.

    The norm on (length, direction) pairs is
    ``sqrt(t^2 / tau_star^3 + tau_star * |v|^2)``: a large target length
    shifts weight onto direction errors, which remain estimable when the
    length itself does not.
    """

    tau_star: float

    def __post_init__(self):
        check_positive(self.tau_star, "tau_star")

    def star_norm(self, t: float, v) -> float:
        """The weighted Euclidean norm of the pair ``(t, v)``."""
        v = np.asarray(v, dtype=np.float64)
        ts = self.tau_star
        return math.sqrt(t * t / ts**3 + ts * float(np.dot(v, v)))

    def distance(self, gamma_a, gamma_b) -> float:
        """Weighted distance between two nonzero vectors (length and direction)."""
        ga = as_nonzero_vector(gamma_a, "gamma_a")
        gb = as_nonzero_vector(gamma_b, "gamma_b")
        na = float(np.linalg.norm(ga))
        nb = float(np.linalg.norm(gb))
        return self.star_norm(na - nb, ga / na - gb / nb)

    def d_star(self, beta_star, gamma) -> float:
        """Distance of ``gamma`` to the target ``tau_star * beta_star``.

        Not defined at ``gamma = 0`` (raises); zero exactly at the target.
        """
        beta_star = as_unit_vector(beta_star, "beta_star")
        gamma = as_nonzero_vector(gamma, "gamma")
        n = float(np.linalg.norm(gamma))
        return self.star_norm(n - self.tau_star, gamma / n - beta_star)


class HFrame:
    """Orthonormal completion of a base direction.

    ``completion`` is a ``p x (p-1)`` matrix ``V`` with orthonormal columns,
    each orthogonal to ``base``, built deterministically from a Householder
    reflection mapping a signed first coordinate vector onto ``base``.  Any
    unit vector ``beta`` decomposes as

        beta = sign(beta'base) * sqrt(1 - |h|^2) * base + V h,   h = V'beta.
    """

    def __init__(self, base, completion):
        self.base = as_unit_vector(base, "base")
        completion = np.asarray(completion, dtype=np.float64)
        p = self.base.shape[0]
        if completion.shape != (p, p - 1):
            raise ValueError(f"completion must have shape {(p, p - 1)}, got {completion.shape}")
        if not np.allclose(completion.T @ completion, np.eye(p - 1), atol=1e-10):
            raise ValueError("completion columns must be orthonormal")
        if not np.allclose(completion.T @ self.base, 0.0, atol=1e-10):
            raise ValueError("completion columns must be orthogonal to base")
        self.completion = completion

    @classmethod
    def from_direction(cls, base) -> "HFrame":
        base = as_unit_vector(base, "base")
        p = base.shape[0]
        alpha = -1.0 if base[0] >= 0.0 else 1.0  # sign opposing base[0]: no cancellation
        u = alpha * np.eye(p)[:, 0] - base
        H = np.eye(p) - 2.0 * np.outer(u, u) / float(np.dot(u, u))
        # H maps alpha*e1 to base, so columns 2..p are orthonormal and _|_ base
        return cls(base, H[:, 1:])

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    def coordinates(self, beta) -> np.ndarray:
        """Tangent coordinates ``h = V'beta`` (length ``p - 1``)."""
        beta = as_unit_vector(beta, "beta")
        return self.completion.T @ beta

    def embed(self, h, sign: float = 1.0) -> np.ndarray:
        """Rebuild the unit vector with coordinates ``h`` on the given hemisphere."""
        h = np.asarray(h, dtype=np.float64)
        hn2 = float(np.dot(h, h))
        if hn2 > 1.0 + 1e-12:
            raise ValueError("coordinates must have norm at most 1")
        return sign * math.sqrt(max(0.0, 1.0 - hn2)) * self.base + self.completion @ h


def h_coordinates(frame: HFrame, beta) -> np.ndarray:
    """Tangent coordinates of ``beta`` in ``frame`` (see ``HFrame``)."""
    return frame.coordinates(beta)
