"""
Dense linear-algebra kernels shared by the fitters.

All routines are pure functions of their arguments. Pseudo-inverses use an
SVD with a relative singular-value cutoff, since the Gram matrices built from
RBF features (bias column, derivative features, duplicated centers) are
frequently rank deficient.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

logger = logging.getLogger(__name__)

#: default relative cutoff applied to ``s / s.max()``
DEFAULT_RCOND = 1e-12


def _as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return a


def _as_vector(v, name="vector"):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        v = v.reshape(-1)
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return v


def pseudo_inverse(a, rcond=DEFAULT_RCOND):
    """
    Moore-Penrose pseudo-inverse via SVD.

    Parameters
    ----------
    a : (p, q) array_like
        Finite matrix.
    rcond : float
        Singular values ``s <= rcond * max(s)`` are treated as zero.

    Returns
    -------
    (q, p) ndarray
    """
    if not rcond > 0:
        raise InvalidInputError("rcond must be positive")
    a = _as_matrix(a, "a")
    return np.linalg.pinv(a, rcond=rcond)


def weighted_least_squares(design, rhs, row_weights, rcond=DEFAULT_RCOND):
    """
    Minimize ``sum_i w_i * (rhs_i - (design @ W)_i)**2``.

    The solution is ``(A^T D A)^+ A^T D b`` with ``D = diag(w)``, which is the
    minimum-norm minimizer when the weighted Gram matrix is singular. Rows with
    zero weight are dropped before the Gram matrix is formed, so they cannot
    perturb the result. One residual-correction pass is applied.
    """
    a = _as_matrix(design, "design")
    b = _as_vector(rhs, "rhs")
    w = _as_vector(row_weights, "row_weights")
    if not (a.shape[0] == b.shape[0] == w.shape[0]):
        raise InvalidInputError(
            f"row counts differ: design {a.shape[0]}, rhs {b.shape[0]}, weights {w.shape[0]}"
        )
    if np.any(w < 0):
        raise InvalidInputError("row weights must be nonnegative")

    keep = w > 0
    if not np.all(keep):
        a, b, w = a[keep], b[keep], w[keep]
    if a.shape[0] == 0:
        return np.zeros(np.asarray(design).shape[1])

    aw = a.T * w
    gram = aw @ a
    gram_pinv = pseudo_inverse(gram, rcond)
    moment = aw @ b
    sol = gram_pinv @ moment
    # residual correction on the normal equations
    sol = sol + gram_pinv @ (moment - gram @ sol)
    return sol


@dataclass(frozen=True)
class KKTResult:
    """Solution of an equality-constrained quadratic program.

    ``rank_deficient`` is set when the constraint rows or the reduced Hessian
    were singular and a pseudo-inverse had to stand in for an inverse.
    """

    weights: np.ndarray
    multipliers: np.ndarray
    rank_deficient: bool = False


def solve_kkt(gram, rhs, constraint_rows, constraint_rhs, rcond=DEFAULT_RCOND):
    """
    Stationary point of ``0.5 W^T G W - rhs^T W`` subject to ``A W = c``.

    The returned multipliers satisfy ``G W + A^T lam = rhs``. For a least
    squares objective ``||y - Phi W||^2`` pass ``G = Phi^T Phi`` and
    ``rhs = Phi^T y``.

    The saddle system is solved by null-space elimination: a particular
    solution ``A^+ c`` plus a correction restricted to ``null(A)``. This keeps
    the constraint residual at rounding level even when ``G`` is badly
    conditioned.

    Parameters
    ----------
    gram : (q, q) array_like
        Symmetric positive semidefinite Hessian.
    rhs : (q,) array_like
    constraint_rows : (r, q) array_like
    constraint_rhs : (r,) array_like

    Returns
    -------
    KKTResult
    """
    g = _as_matrix(gram, "gram")
    h = _as_vector(rhs, "rhs")
    a = _as_matrix(constraint_rows, "constraint_rows")
    c = _as_vector(constraint_rhs, "constraint_rhs")
    q = g.shape[1]
    if g.shape[0] != q or h.shape[0] != q:
        raise InvalidInputError("gram must be square and match rhs length")
    if a.shape[1] != q:
        raise InvalidInputError(f"constraint_rows must have {q} columns, got {a.shape[1]}")
    if a.shape[0] != c.shape[0]:
        raise InvalidInputError("constraint_rows and constraint_rhs disagree in length")

    u, s, vt = np.linalg.svd(a, full_matrices=True)
    tol = rcond * s.max() if s.size and s.max() > 0 else 0.0
    rank = int(np.sum(s > tol))
    flagged = rank < a.shape[0]

    a_pinv = vt[:rank].T @ ((u[:, :rank].T) / s[:rank, None])
    w_part = a_pinv @ c
    z = vt[rank:].T  # orthonormal basis of null(A)

    if z.shape[1] > 0:
        reduced = z.T @ g @ z
        red_rhs = z.T @ (h - g @ w_part)
        try:
            cond = np.linalg.cond(reduced)
        except np.linalg.LinAlgError:
            cond = np.inf
        if np.isfinite(cond) and cond < 1.0 / rcond:
            step = np.linalg.solve(reduced, red_rhs)
        else:
            flagged = True
            step = pseudo_inverse(reduced, rcond) @ red_rhs
        w = w_part + z @ step
    else:
        w = w_part

    # one residual-correction pass on the constraint rows
    w = w + a_pinv @ (c - a @ w)
    lam = a_pinv.T @ (h - g @ w)
    if flagged:
        logger.warning("solve_kkt: rank-deficient saddle system, pseudo-inverse used")
    return KKTResult(weights=w, multipliers=lam, rank_deficient=flagged)
