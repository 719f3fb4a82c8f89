"""Linear separability decisions with verifiable certificates.

A dataset is linearly separable when some ``gamma`` gives every sample a
positive margin ``y_i x_i' gamma > 0``, equivalently when the convex
hull of the signed, row-normalized points ``z_i = y_i x_i / |y_i x_i|``
excludes the origin.  The decision runs Wolfe's minimum-norm-point
iteration over that hull (major cycles add the most violating vertex,
minor cycles solve the corral's affine subproblem exactly and prune
negative weights) and returns one of two certificates, each re-verifiable
against the raw data:

* separable: a vector with margin >= 1 on every raw sample;
* not separable: simplex weights whose hull point has norm <= tol.

Also provides the exact probability that ``n`` points with independent
uniform random signs in dimension ``p`` are separable:
``2**(1-n) * sum_{k<p} C(n-1, k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import as_labels, as_matrix

__all__ = [
    "SeparabilityVerdict",
    "SeparabilityUndecided",
    "is_separable",
    "cover_probability",
]


class SeparabilityUndecided(RuntimeError):
    """Iteration cap reached with neither certificate; carries best witness norm."""

    def __init__(self, message: str, best_witness_norm: float):
        super().__init__(message)
        self.best_witness_norm = best_witness_norm


@dataclass
class SeparabilityVerdict:
    """Decision plus exactly one verifying certificate.

    ``separator`` (margin >= 1 on all raw points) is present iff
    ``separable``; ``witness`` (simplex weights over the rows whose hull
    point has norm <= tol) is present iff not.
    """

    separable: bool
    tol: float
    separator: np.ndarray | None = None
    witness: np.ndarray | None = None
    witness_norm: float | None = None
    iterations: int = 0

    def __post_init__(self):
        if self.separable == (self.separator is None):
            raise ValueError("separable verdicts carry a separator, others a witness")
        if (not self.separable) and self.witness is None:
            raise ValueError("non-separable verdicts carry a witness")


def _margin_one_separator(w: np.ndarray, raw_min_margin: float) -> np.ndarray:
    # scale so the smallest raw margin lands a hair above 1
    return w * ((1.0 + 1e-9) / raw_min_margin)


def _affine_min_weights(B: np.ndarray) -> np.ndarray:
    """Weights of the min-norm point in the affine hull of the rows of ``B``.

    Solves the bordered KKT system of ``min |B'lam|^2 s.t. sum(lam) = 1``;
    falls back to least squares when the corral is affinely degenerate.
    """
    k = B.shape[0]
    if k == 1:
        return np.ones(1)
    G = B @ B.T
    A = np.empty((k + 1, k + 1))
    A[:k, :k] = G
    A[:k, k] = 1.0
    A[k, :k] = 1.0
    A[k, k] = 0.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(A, rhs, rcond=None)[0]
    return sol[:k]


def is_separable(
    X, y, tol: float = 1e-9, max_iter: int = 10_000, hint=None
) -> SeparabilityVerdict:
    """Decide separability of ``(X, y)`` with a verifying certificate.

    ``tol`` is absolute on the hull-point norm after row normalization.
    ``hint`` (optional) is a candidate separating vector tried first: if
    the hint already gives every raw point a positive margin, the rescaled
    hint is returned immediately (the certificate is still verified
    against the raw data).  Zero rows ``y_i x_i`` (probability-zero
    degeneracies) are rejected.  ``max_iter`` caps major cycles; Wolfe's
    method normally finishes in a few dozen.
    """
    X = as_matrix(X)
    y = as_labels(y, X.shape[0])
    if tol <= 0:
        raise ValueError("tol must be positive")

    raw = y[:, None] * X
    norms = np.linalg.norm(raw, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("dataset contains a zero row; separability is degenerate")
    Z = raw / norms[:, None]
    n = Z.shape[0]

    def separable_verdict(w: np.ndarray, iteration: int) -> SeparabilityVerdict | None:
        raw_min = float(np.einsum("ij,j->i", raw, w).min())
        if raw_min <= 0.0:
            return None
        return SeparabilityVerdict(
            separable=True,
            tol=tol,
            separator=_margin_one_separator(w, raw_min),
            iterations=iteration,
        )

    if hint is not None:
        verdict = separable_verdict(np.asarray(hint, dtype=np.float64), 0)
        if verdict is not None:
            return verdict

    def witness_verdict(
        corral: list[int], lam: np.ndarray, iteration: int
    ) -> SeparabilityVerdict:
        full = np.zeros(n)
        full[corral] = np.maximum(lam, 0.0)
        full /= full.sum()
        return SeparabilityVerdict(
            separable=False,
            tol=tol,
            witness=full,
            witness_norm=float(np.linalg.norm(np.einsum("i,ij->j", full, Z))),
            iterations=iteration,
        )

    # Wolfe's minimum-norm-point algorithm over conv{z_i}
    start = int(np.argmin(np.einsum("ij,ij->i", Z, Z)))
    corral = [start]
    lam = np.ones(1)
    w = Z[start].copy()
    best_norm = float(np.linalg.norm(w))

    for iteration in range(1, max_iter + 1):
        wn2 = float(np.dot(w, w))
        best_norm = min(best_norm, math.sqrt(wn2))
        if wn2 <= tol * tol:
            return witness_verdict(corral, lam, iteration)
        margins = np.einsum("ij,j->i", Z, w)
        m = float(margins.min())
        if m > 0.0:
            verdict = separable_verdict(w, iteration)
            if verdict is not None:
                return verdict
        s = int(np.argmin(margins))
        if m >= wn2 - 1e-12 * wn2 - 1e-30 or s in corral:
            break  # w is the minimum-norm point to working precision
        corral.append(s)
        lam = np.append(lam, 0.0)
        # minor cycles: move to the affine minimizer, pruning negatives
        while True:
            target = _affine_min_weights(Z[corral])
            if target.min() > 1e-14:
                lam = target
                break
            diff = target - lam
            shrink = diff < 0.0
            theta = min(1.0, float(np.min(lam[shrink] / -diff[shrink])))
            lam = lam + theta * diff
            keep = lam > 1e-14
            if not np.any(keep):
                keep[int(np.argmax(lam))] = True
            corral = [c for c, k in zip(corral, keep) if k]
            lam = lam[keep]
            lam /= lam.sum()
            if len(corral) == 1:
                break
        w = np.einsum("i,ij->j", lam, Z[corral])

    # stationary (or out of major cycles): classify by the final hull point
    wn = float(np.linalg.norm(w))
    if wn <= tol:
        return witness_verdict(corral, lam, max_iter)
    if float(np.einsum("ij,j->i", Z, w).min()) > 0.0:
        verdict = separable_verdict(w, max_iter)
        if verdict is not None:
            return verdict
    raise SeparabilityUndecided(
        f"no certificate after {max_iter} major cycles "
        f"(best witness norm {best_norm:.3e})",
        best_witness_norm=best_norm,
    )


def cover_probability(n: int, p: int) -> float:
    """Probability that ``n`` sign-symmetric random points in R^p are separable.

    Exactly ``2**(1-n) * sum_{k=0}^{p-1} C(n-1, k)``: equals 1 for
    ``p >= n``, 1/2 at ``n = 2p``, and ``2**(1-n)`` at ``p = 1``.  Uses
    exact integer arithmetic for moderate ``n`` and log-space summation
    beyond, so values stay in [0, 1] for any argument size.
    """
    if n < 1 or p < 1:
        raise ValueError("n and p must be positive integers")
    if p >= n:
        return 1.0
    if n <= 1000:
        total = sum(math.comb(n - 1, k) for k in range(p))
        return total / 2 ** (n - 1)
    # log-space: logsumexp of log C(n-1, k) - (n-1) log 2
    logs = [
        math.lgamma(n) - math.lgamma(k + 1) - math.lgamma(n - k) for k in range(p)
    ]
    top = max(logs)
    acc = sum(math.exp(v - top) for v in logs)
    return math.exp(top + math.log(acc) - (n - 1) * math.log(2.0))
