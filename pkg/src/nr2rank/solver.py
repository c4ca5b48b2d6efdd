"""Personalized PageRank as a linear system: (I - lam W') p = (1 - lam) r.

One sparse LU factorization of (I - lam W') serves any number of right-hand
sides. Power iteration is kept as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import ParameterError, SolverError, ValidationError
from .graph import TransitionMatrix

SUM_TOL = 1e-9


def check_damping(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam < 1.0:
        raise ParameterError(f"damping factor must lie in [0, 1), got {lam}")
    return lam


def system_matrix(w: TransitionMatrix, lam: float) -> sp.csc_matrix:
    n = w.n
    return (sp.identity(n, format="csc") - lam * w.matrix.T.tocsc()).tocsc()


@dataclass(frozen=True, eq=False)
class Factorization:
    """LU factors of (I - lam W') with row/column permutations (SuperLU)."""

    lam: float
    n: int
    lu: object

    def reconstruct(self) -> np.ndarray:
        """Dense (I - lam W') rebuilt from the factors; for small-n checks only."""
        lu = self.lu
        prod = (lu.L @ lu.U).toarray()
        # Pr A Pc = L U  <=>  A[i, j] == (L U)[perm_r[i], perm_c[j]]
        return prod[np.ix_(lu.perm_r, lu.perm_c)]


def factorize(w: TransitionMatrix, lam: float) -> Factorization:
    lam = check_damping(lam)
    a = system_matrix(w, lam)
    try:
        # minimum degree on A'+A keeps fill low for the (near) symmetric pattern;
        # diag_pivot_thresh=1.0 is classic partial pivoting
        lu = splu(a, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=1.0)
    except RuntimeError as exc:
        raise SolverError(f"factorization failed: {exc}") from exc
    return Factorization(lam, w.n, lu)


def _check_prior(r, n: int, *, nonnegative: bool) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (n,):
        raise ValidationError(f"preference vector has shape {r.shape}, expected ({n},)")
    if not np.all(np.isfinite(r)):
        raise ValidationError("preference vector has non-finite entries")
    if nonnegative and r.min(initial=0.0) < 0:
        raise ValidationError("preference vector must be nonnegative")
    if abs(r.sum() - 1.0) > SUM_TOL:
        raise ValidationError(f"preference vector must sum to 1, sums to {r.sum()!r}")
    return r


def solve(f: Factorization, r) -> np.ndarray:
    """Score vector p for prior ``r`` (signed entries allowed, sum must be 1)."""
    r = _check_prior(r, f.n, nonnegative=False)
    p = f.lu.solve((1.0 - f.lam) * r)
    if not np.all(np.isfinite(p)):
        raise SolverError("solve produced non-finite scores")
    return p


@dataclass(frozen=True)
class PowerIterationResult:
    values: np.ndarray
    iterations: int
    converged: bool
    residual: float


def power_iteration(w: TransitionMatrix, r, lam: float, tol: float = 1e-10, max_iter: int = 10_000) -> PowerIterationResult:
    """Iterate p <- (1 - lam) r + lam W' p from p = r.

    Stops once the L1 change drops to ``tol``. Running out of iterations is
    reported through ``converged=False`` with the last iterate attached.
    """
    lam = check_damping(lam)
    r = _check_prior(r, w.n, nonnegative=True)
    wt = w.matrix.T.tocsr()
    teleport = (1.0 - lam) * r
    p = r.copy()
    delta = np.inf
    for it in range(1, max_iter + 1):
        nxt = teleport + lam * (wt @ p)
        delta = float(np.abs(nxt - p).sum())
        p = nxt
        if delta <= tol:
            return PowerIterationResult(p, it, True, delta)
    return PowerIterationResult(p, max_iter, False, delta)
