"""Dense complex linear algebra kernel.

Every identity check in the package reduces to shifted Hermitian solves,
eigendecompositions and singular values of small dense matrices.  This
module wraps LAPACK (through numpy/scipy) behind a contract that rejects
shifts too close to the spectrum and refines every solve once.
"""
from dataclasses import dataclass
import logging

import numpy as np
import scipy.linalg as sla

from .errors import NearSingularShift, NotHermitian

log = logging.getLogger(__name__)

#: relative default for the resolvent-set acceptance threshold
TAU_SINGULAR = 1e-10
#: relative residual that every accepted solve must reach
SOLVE_RTOL = 1e-10
HERMITIAN_RTOL = 1e-12
_MAX_REFINE = 3


def as_matrix(M, name="M"):
    """Validate and return `M` as a 2-D finite float/complex array."""
    A = np.asarray(M)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must have positive dimensions, got {A.shape}")
    if not np.issubdtype(A.dtype, np.complexfloating):
        A = A.astype(np.float64, copy=False)
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def hermitian_defect(H):
    """Return ||H - H*||_F / ||H||_F (0 for the zero matrix)."""
    nrm = np.linalg.norm(H)
    if nrm == 0.0:
        return 0.0
    return float(np.linalg.norm(H - H.conj().T) / nrm)


def is_hermitian(H, rtol=HERMITIAN_RTOL):
    return H.shape[0] == H.shape[1] and hermitian_defect(H) <= rtol


def spectral_norm(M):
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(sla.svdvals(M, check_finite=False)[0])


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition H = U diag(t) U* with ascending real t."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T

    def reconstruction_residual(self, H):
        nrm = np.linalg.norm(H)
        diff = np.linalg.norm(self.reconstruct() - H)
        return float(diff / nrm) if nrm > 0 else float(diff)

    def unitarity_residual(self):
        U = self.eigenvectors
        return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[1])))


def heig(H):
    """Eigendecomposition of a Hermitian matrix.

    Raises
    ------
    NotHermitian
        If ``||H - H*||_F > 1e-12 ||H||_F``.
    """
    H = as_matrix(H, "H")
    if H.shape[0] != H.shape[1]:
        raise NotHermitian(f"matrix is not square: {H.shape}")
    defect = hermitian_defect(H)
    if defect > HERMITIAN_RTOL:
        raise NotHermitian(f"relative Hermitian defect {defect:.3e}")
    t, U = np.linalg.eigh(H)
    return HermitianEigen(t, U)


def svd_values(M):
    """Singular values of `M` in descending order."""
    M = as_matrix(M, "M")
    return sla.svdvals(M, check_finite=False)


def schatten_norm(sigma, p):
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0:
        return 0.0
    return float(np.sum(sigma ** p) ** (1.0 / p))


def numerical_rank(sigma, rtol):
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > rtol * sigma[0]))


class ShiftedSolver:
    """Solves ``(H - z I) X = B`` for many shifts `z` of one square matrix.

    For Hermitian `H` the shifted matrix is normal, so its smallest singular
    value is the distance from `z` to the spectrum; the eigenvalues are
    computed once and reused for every shift check.

    Parameters
    ----------
    H : array_like
        Square matrix.
    tau : float, optional
        Absolute acceptance threshold for the smallest singular value of
        ``H - z I``.  Defaults to ``1e-10 * ||H||_2``.
    name : str
        Operator label carried by :class:`NearSingularShift`.
    """

    def __init__(self, H, tau=None, name="H"):
        H = as_matrix(H, name)
        if H.shape[0] != H.shape[1]:
            raise ValueError(f"{name} must be square, got {H.shape}")
        self.H = H
        self.name = name
        self.hermitian = is_hermitian(H)
        if self.hermitian:
            self._spectrum = np.linalg.eigvalsh(H)
            self.norm = float(np.max(np.abs(self._spectrum)))
        else:
            self._spectrum = None
            self.norm = spectral_norm(H)
        self.tau = TAU_SINGULAR * self.norm if tau is None else float(tau)

    @property
    def spectrum(self):
        return self._spectrum

    def sigma_min(self, shift):
        if self.hermitian:
            return float(np.min(np.abs(self._spectrum - shift)))
        n = self.H.shape[0]
        return float(sla.svdvals(self.H - shift * np.eye(n), check_finite=False)[-1])

    def check(self, shift):
        """Raise :class:`NearSingularShift` unless `shift` is accepted."""
        s = self.sigma_min(shift)
        if not s > self.tau:
            raise NearSingularShift(shift, s, self.tau, self.name)
        return s

    def accepts(self, shift):
        return self.sigma_min(shift) > self.tau

    def solve(self, shift, rhs):
        self.check(shift)
        shift = complex(shift)
        rhs_arr = np.asarray(rhs)
        vector = rhs_arr.ndim == 1
        B = rhs_arr.reshape(-1, 1) if vector else rhs_arr
        if B.shape[0] != self.H.shape[0]:
            raise ValueError(f"rhs has {B.shape[0]} rows, {self.name} has {self.H.shape[0]}")
        n = self.H.shape[0]
        if shift.imag == 0.0 and not np.iscomplexobj(self.H) and not np.iscomplexobj(B):
            A = self.H - shift.real * np.eye(n)
        else:
            A = self.H - shift * np.eye(n)
        lu = sla.lu_factor(A, check_finite=False)
        X = sla.lu_solve(lu, B, check_finite=False)
        bnorm = np.linalg.norm(B)
        # one refinement step always, more only if the residual target is missed
        X = X + sla.lu_solve(lu, B - A @ X, check_finite=False)
        res = np.linalg.norm(B - A @ X)
        extra = 0
        while res > SOLVE_RTOL * bnorm and extra < _MAX_REFINE:
            X = X + sla.lu_solve(lu, B - A @ X, check_finite=False)
            res = np.linalg.norm(B - A @ X)
            extra += 1
        if res > SOLVE_RTOL * bnorm:
            raise NearSingularShift(shift, self.sigma_min(shift), self.tau, self.name)
        return X.ravel() if vector else X

    def inverse(self, shift):
        n = self.H.shape[0]
        dtype = complex if complex(shift).imag != 0 or np.iscomplexobj(self.H) else float
        return self.solve(shift, np.eye(n, dtype=dtype))


def solve(H, shift, rhs, tau=None):
    """Solve ``(H - shift I) X = rhs`` with one step of iterative refinement.

    Raises
    ------
    NearSingularShift
        If the smallest singular value of ``H - shift I`` does not exceed
        `tau` (default ``1e-10 ||H||_2``).
    """
    return ShiftedSolver(H, tau=tau).solve(shift, rhs)
