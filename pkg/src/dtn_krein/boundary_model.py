"""Discrete boundary triples, gamma fields and Q-functions.

A :class:`PartitionedHermitian` is a Hermitian matrix ``H`` whose index set
is split into interior nodes ``I``, boundary nodes ``B`` and (optionally)
exterior nodes ``E``.  The Hilbert space is the interior-node space; the
boundary values ``u_B`` and conormal traces ``(Hu)_B`` play the role of the
two trace maps, which makes the discrete Green identity exact.

Conventions used throughout::

    A_D      = H_II
    A_N      = H_II - H_IB H_BB^{-1} H_BI
    Gamma(l) = -(H_II - l)^{-1} H_IB
    Q(l)     = -(H_BB - H_BI (H_II - l)^{-1} H_IB)

With these, ``Q(l) - Q(m)^* = (l - conj(m)) Gamma(m)^* Gamma(l)`` holds
exactly in exact arithmetic.
"""
from dataclasses import dataclass, field
from functools import cached_property
import hashlib

import numpy as np

from .errors import (
    FluxMismatch,
    LayoutError,
    NearSingularShift,
    NotHermitian,
    SingularBoundaryBlock,
)
from .numerics import (
    HERMITIAN_RTOL,
    TAU_SINGULAR,
    ShiftedSolver,
    as_matrix,
    hermitian_defect,
    heig,
    spectral_norm,
    svd_values,
)

#: relative rank cutoff for controllability (simplicity) tests
RANK_RTOL = 1e-8
FLUX_RTOL = 1e-10

SIDES = ("whole", "in", "out")

DEFAULT_TEST_POINTS = (
    1j, 1 + 1j, -2 + 0.5j, 3 + 2j, -1 - 1j,
    0.5 - 0.25j, 10j, -5 + 0.1j, 2 - 3j, 0.25 + 4j,
)


def _index_array(idx):
    a = np.asarray(idx, dtype=np.int64).ravel()
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Partition:
    """Interior / boundary / optional exterior split of the node indices."""

    interior: np.ndarray
    boundary: np.ndarray
    exterior: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "interior", _index_array(self.interior))
        object.__setattr__(self, "boundary", _index_array(self.boundary))
        if self.exterior is not None:
            ext = _index_array(self.exterior)
            object.__setattr__(self, "exterior", ext if ext.size else None)

    @property
    def has_exterior(self):
        return self.exterior is not None

    def validate(self, n):
        if self.interior.size == 0 or self.boundary.size == 0:
            raise LayoutError("interior and boundary index sets must be nonempty")
        parts = [self.interior, self.boundary]
        if self.exterior is not None:
            parts.append(self.exterior)
        allidx = np.concatenate(parts)
        if np.unique(allidx).size != allidx.size:
            raise LayoutError("partition index sets must be pairwise disjoint")
        if allidx.size != n or allidx.min() < 0 or allidx.max() >= n:
            raise LayoutError(f"partition must cover exactly the indices 0..{n - 1}")

    def key(self):
        parts = [self.interior.tobytes(), b"|", self.boundary.tobytes()]
        if self.exterior is not None:
            parts += [b"|", self.exterior.tobytes()]
        return b"".join(parts)


class PartitionedHermitian:
    """Hermitian matrix with an interior/boundary(/exterior) partition.

    Parameters
    ----------
    H : array_like
        Hermitian ``n x n`` matrix.
    partition : Partition
    boundary_split : tuple of array_like, optional
        ``(H_BB_in, H_BB_out)``, Hermitian, summing to ``H_BB``; the share
        of the boundary block owned by each side of an interface.
    tol_singular : float
        Relative resolvent-set threshold; shifts are accepted when the
        smallest singular value of the shifted block exceeds
        ``tol_singular * ||H||_2``.
    name : str, optional
        Free-form label used in reports.
    """

    def __init__(self, H, partition, boundary_split=None, tol_singular=TAU_SINGULAR, name=None):
        H = as_matrix(H, "H")
        if H.shape[0] != H.shape[1]:
            raise ValueError(f"H must be square, got {H.shape}")
        if hermitian_defect(H) > HERMITIAN_RTOL:
            raise NotHermitian(f"H is not Hermitian (relative defect {hermitian_defect(H):.3e})")
        partition.validate(H.shape[0])
        H = H.copy()
        H.setflags(write=False)
        self.H = H
        self.partition = partition
        self.tol_singular = float(tol_singular)
        self.name = name

        ext = partition.exterior
        if ext is not None:
            I, E = partition.interior, ext
            if np.any(H[np.ix_(I, E)] != 0):
                raise LayoutError("H_IE must vanish: the interface has to separate I from E")

        if boundary_split is not None:
            b_in = as_matrix(boundary_split[0], "H_BB_in")
            b_out = as_matrix(boundary_split[1], "H_BB_out")
            nb = partition.boundary.size
            if b_in.shape != (nb, nb) or b_out.shape != (nb, nb):
                raise LayoutError("boundary split blocks must be |B| x |B|")
            for blk in (b_in, b_out):
                if hermitian_defect(blk) > HERMITIAN_RTOL:
                    raise NotHermitian("boundary split blocks must be Hermitian")
            scale = max(1.0, np.linalg.norm(self.H_BB))
            if np.linalg.norm(b_in + b_out - self.H_BB) > 1e-14 * scale:
                raise LayoutError("boundary split blocks must sum to H_BB")
            b_in = b_in.copy()
            b_out = b_out.copy()
            b_in.setflags(write=False)
            b_out.setflags(write=False)
            boundary_split = (b_in, b_out)
        self.boundary_split = boundary_split

    def __repr__(self):
        e = 0 if self.partition.exterior is None else self.partition.exterior.size
        return (f"PartitionedHermitian(n={self.n}, |I|={self.n_interior}, "
                f"|B|={self.n_boundary}, |E|={e}, name={self.name!r})")

    # sizes -----------------------------------------------------------------
    @property
    def n(self):
        return self.H.shape[0]

    @property
    def n_interior(self):
        return self.partition.interior.size

    @property
    def n_boundary(self):
        return self.partition.boundary.size

    @property
    def n_exterior(self):
        ext = self.partition.exterior
        return 0 if ext is None else ext.size

    # blocks ----------------------------------------------------------------
    def block(self, rows, cols):
        p = self.partition
        lookup = {"I": p.interior, "B": p.boundary, "E": p.exterior}
        r, c = lookup[rows], lookup[cols]
        if r is None or c is None:
            raise KeyError(f"model has no exterior partition ({rows}{cols})")
        return self.H[np.ix_(r, c)]

    @cached_property
    def H_II(self):
        return self.block("I", "I")

    @cached_property
    def H_IB(self):
        return self.block("I", "B")

    @cached_property
    def H_BI(self):
        return self.block("B", "I")

    @cached_property
    def H_BB(self):
        return self.block("B", "B")

    @cached_property
    def H_EE(self):
        return self.block("E", "E")

    @cached_property
    def H_EB(self):
        return self.block("E", "B")

    @cached_property
    def H_BE(self):
        return self.block("B", "E")

    # scales and solvers ----------------------------------------------------
    @cached_property
    def norm(self):
        return spectral_norm(self.H)

    @property
    def tau(self):
        """Absolute singular-value threshold for accepting shifts."""
        return self.tol_singular * self.norm

    @cached_property
    def dirichlet_solver(self):
        return ShiftedSolver(self.H_II, tau=self.tau, name="A_D")

    @cached_property
    def exterior_solver(self):
        return ShiftedSolver(self.H_EE, tau=self.tau, name="A_ext")

    @cached_property
    def boundary_solver(self):
        return ShiftedSolver(self.H_BB, tau=self.tau, name="H_BB")

    @cached_property
    def neumann_solver(self):
        return ShiftedSolver(neumann_op(self), tau=self.tau, name="A_N")

    @cached_property
    def model_hash(self):
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.H, dtype=np.complex128).tobytes())
        h.update(self.partition.key())
        return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# small hand-checkable models and random models


def toy_model():
    """2x2 model ``[[2, -1], [-1, 1]]`` with I = {0}, B = {1}."""
    H = np.array([[2.0, -1.0], [-1.0, 1.0]])
    return PartitionedHermitian(H, Partition([0], [1]), name="toy")


def path3_model(coupled=True):
    """Three-node path Laplacian ``tridiag(-1, 2, -1)``.

    With ``coupled=True`` the middle node is an interface between I = {0}
    and E = {2}, and H_BB = 2 is split evenly between the sides.  Otherwise
    nodes 0 and 2 are both interior (I = {0, 2}, B = {1}).
    """
    H = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
    if coupled:
        part = Partition([0], [1], [2])
        split = (np.array([[1.0]]), np.array([[1.0]]))
        return PartitionedHermitian(H, part, boundary_split=split, name="path3")
    return PartitionedHermitian(H, Partition([0, 2], [1]), name="path3-bounded")


def random_hermitian(rng, n, complex_entries=True):
    """Random Hermitian matrix with entries of unit scale drawn from `rng`."""
    X = rng.uniform(n * n, -1.0, 1.0).reshape(n, n)
    if complex_entries:
        X = X + 1j * rng.uniform(n * n, -1.0, 1.0).reshape(n, n)
    return (X + X.conj().T) / 2


def random_model(rng, n_interior, n_boundary, complex_entries=True, boundary_rank=None,
                 decoupled_interior=0):
    """Random model with interior nodes first, boundary nodes last.

    Parameters
    ----------
    rng : SplitMix64
    boundary_rank : int, optional
        Force ``rank(H_IB) = boundary_rank`` (rank-deficient coupling).
    decoupled_interior : int
        Number of trailing interior nodes with no coupling to the boundary
        and to the remaining interior (an unreachable invariant subspace).
    """
    n = n_interior + n_boundary
    H = random_hermitian(rng, n, complex_entries)
    I = np.arange(n_interior)
    B = np.arange(n_interior, n)
    if boundary_rank is not None:
        if boundary_rank >= min(n_interior, n_boundary):
            raise ValueError("boundary_rank must be below min(|I|, |B|)")
        L = rng.uniform(n_interior * boundary_rank, -1, 1).reshape(n_interior, boundary_rank)
        R = rng.uniform(boundary_rank * n_boundary, -1, 1).reshape(boundary_rank, n_boundary)
        C = L @ R
        H[np.ix_(I, B)] = C
        H[np.ix_(B, I)] = C.conj().T
    if decoupled_interior:
        d = np.arange(n_interior - decoupled_interior, n_interior)
        rest = np.setdiff1d(np.arange(n), d)
        H[np.ix_(d, rest)] = 0.0
        H[np.ix_(rest, d)] = 0.0
    return PartitionedHermitian(H, Partition(I, B), name="random")


# ---------------------------------------------------------------------------
# realizations


def dirichlet_op(model):
    """Dirichlet realization ``A_D = H_II``."""
    return np.array(model.H_II)


def neumann_op(model):
    """Neumann realization: eliminate u_B from the condition (Hu)_B = 0.

    Raises
    ------
    SingularBoundaryBlock
        If H_BB is not invertible.
    """
    try:
        X = model.boundary_solver.solve(0.0, model.H_BI)
    except NearSingularShift as exc:
        raise SingularBoundaryBlock(
            f"H_BB is singular (sigma_min={exc.sigma_min:.3e}); "
            "the discrete Neumann condition cannot be eliminated") from exc
    A = model.H_II - model.H_IB @ X
    return (A + A.conj().T) / 2


# ---------------------------------------------------------------------------
# gamma field


def gamma_at(model, lam):
    """Discrete Dirichlet solution operator ``-(H_II - lam)^{-1} H_IB``.

    Column j is the interior part of the solution of ``((H - lam)u)_I = 0``
    with boundary value ``u_B = e_j``.
    """
    return -model.dirichlet_solver.solve(lam, model.H_IB)


def gamma_update(model, lam, lam0, gamma_anchor):
    """Transport a gamma field from `lam0` to `lam`.

    Returns ``(I + (lam - lam0)(H_II - lam)^{-1}) gamma_anchor``.
    """
    model.dirichlet_solver.check(lam0)
    gamma_anchor = np.asarray(gamma_anchor)
    if lam == lam0:
        return np.array(gamma_anchor)
    return gamma_anchor + (lam - lam0) * model.dirichlet_solver.solve(lam, gamma_anchor)


@dataclass(frozen=True)
class GammaField:
    """Gamma field anchored at `anchor` with ``anchor_matrix = gamma_at(model, anchor)``."""

    model: PartitionedHermitian
    anchor: complex
    anchor_matrix: np.ndarray = field(repr=False)

    @classmethod
    def at(cls, model, anchor):
        return cls(model, complex(anchor), gamma_at(model, anchor))

    def __call__(self, lam):
        return gamma_update(self.model, lam, self.anchor, self.anchor_matrix)

    def eigensolution_residual(self, lam):
        G = self(lam)
        m = self.model
        R = (m.H_II - lam * np.eye(m.n_interior)) @ G + m.H_IB
        return float(np.linalg.norm(R) / max(1.0, np.linalg.norm(m.H_IB)))


def gamma_adjoint_flux(model, lam, f):
    """``Gamma(conj(lam))^* g`` for ``g = (H_II - lam) f``, computed two ways.

    The adjoint-matrix route applies ``Gamma(conj(lam))^*`` to `g`; the flux
    route returns the negated conormal trace ``-H_BI f`` of the zero-boundary
    extension of `f`.

    Raises
    ------
    FluxMismatch
        If the two routes disagree beyond ``1e-10`` (relative).
    """
    f = np.asarray(f).ravel()
    g = model.H_II @ f - lam * f
    G_bar = gamma_at(model, np.conj(lam))
    via_adjoint = G_bar.conj().T @ g
    via_flux = -(model.H_BI @ f)
    scale = max(1.0, np.linalg.norm(via_flux))
    if np.linalg.norm(via_adjoint - via_flux) > FLUX_RTOL * scale:
        raise FluxMismatch(
            f"adjoint and flux routes differ by {np.linalg.norm(via_adjoint - via_flux):.3e}")
    return via_flux


# ---------------------------------------------------------------------------
# Q-function


def q_at(model, lam, side="whole"):
    """Dirichlet-to-Neumann matrix ``Q(lam)`` (negated-flux convention).

    Parameters
    ----------
    side : {'whole', 'in', 'out'}
        ``'whole'`` uses all of H_BB and the interior coupling.  ``'in'`` and
        ``'out'`` use the corresponding part of the boundary split together
        with the interior (resp. exterior) coupling only.
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    if side == "whole":
        Gam = gamma_at(model, lam)
        return -(model.H_BB + model.H_BI @ Gam)
    if model.boundary_split is None:
        raise ValueError(f"side={side!r} needs a model with a boundary split")
    b_in, b_out = model.boundary_split
    if side == "in":
        return -(b_in + model.H_BI @ gamma_at(model, lam))
    if model.partition.exterior is None:
        return -np.array(b_out, dtype=complex)
    G_ext = -model.exterior_solver.solve(lam, model.H_EB)
    return -(b_out + model.H_BE @ G_ext)


class QFunction:
    """Callable ``lam -> Q(lam)`` bound to a model and a side selector."""

    def __init__(self, model, side="whole"):
        if side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")
        self.model = model
        self.side = side

    def __call__(self, lam):
        return q_at(self.model, lam, self.side)

    def symmetry_residual(self, lam):
        Q = self(lam)
        Qb = self(np.conj(lam))
        return float(np.linalg.norm(Qb - Q.conj().T) / max(1.0, np.linalg.norm(Q)))


def q_identity_residual(model, lam, mu):
    """Relative residual of ``Q(lam) - Q(mu)^* = (lam - conj(mu)) Gamma(mu)^* Gamma(lam)``."""
    Ql = q_at(model, lam)
    Qm = q_at(model, mu)
    Gl = gamma_at(model, lam)
    Gm = gamma_at(model, mu)
    lhs = Ql - Qm.conj().T
    rhs = (lam - np.conj(mu)) * (Gm.conj().T @ Gl)
    return float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(Ql)))


def q_derivative(model, lam):
    """``dQ/dlam = Gamma(conj(lam))^* Gamma(lam)``."""
    G = gamma_at(model, lam)
    G_bar = G if np.imag(lam) == 0 else gamma_at(model, np.conj(lam))
    return G_bar.conj().T @ G


def q_representation(model, lam, lam0):
    """Evaluate Q(lam) from data anchored at `lam0` only.

    ``Re Q(lam0) + G0^* ((lam - Re lam0) G0 + (lam - lam0)(lam - conj lam0)(H_II - lam)^{-1} G0)``
    with ``G0 = Gamma(lam0)``.
    """
    G0 = gamma_at(model, lam0)
    Q0 = q_at(model, lam0)
    re_q0 = (Q0 + Q0.conj().T) / 2
    inner = (lam - np.real(lam0)) * G0
    inner = inner + (lam - lam0) * (lam - np.conj(lam0)) * model.dirichlet_solver.solve(lam, G0)
    return re_q0 + G0.conj().T @ inner


def q_representation_residual(model, lam, lam0):
    Q = q_at(model, lam)
    R = q_representation(model, lam, lam0)
    return float(np.linalg.norm(Q - R) / max(1.0, np.linalg.norm(Q)))


def q_tilde(model, lam, lam0):
    """``Q(lam) - Re Q(lam0)``, the bounded Nevanlinna part of Q."""
    Q0 = q_at(model, lam0)
    return q_at(model, lam) - (Q0 + Q0.conj().T) / 2


# ---------------------------------------------------------------------------
# integral (Stieltjes) representation


@dataclass(frozen=True)
class StieltjesData:
    """Discrete measure representation of ``Q~(lam) = Q(lam) - Re Q(lam0)``.

    ``Q~(lam) = alpha + lam*beta + sum_j (1/(t_j - lam) - t_j/(1 + t_j^2)) W_j``
    with ``W_j = H_BI P_j H_IB`` for the spectral projections ``P_j`` of
    ``H_II`` and ``beta = 0``.
    """

    anchor: complex
    poles: np.ndarray
    weights: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    test_points: tuple = ()
    residuals: tuple = ()

    @property
    def max_residual(self):
        return max(self.residuals) if self.residuals else 0.0

    def evaluate(self, lam):
        t = self.poles
        c = 1.0 / (t - lam) - t / (1.0 + t * t)
        return self.alpha + lam * self.beta + np.tensordot(c, self.weights, axes=1)

    def residual(self, model, lam):
        target = q_tilde(model, lam, self.anchor)
        return float(np.linalg.norm(self.evaluate(lam) - target)
                     / max(1.0, np.linalg.norm(target)))

    def min_weight_eigenvalue(self):
        if self.weights.shape[0] == 0:
            return 0.0
        return float(min(np.linalg.eigvalsh(W)[0] for W in self.weights))


def stieltjes(model, lam0, test_points=DEFAULT_TEST_POINTS):
    """Stieltjes data of Q~ anchored at the nonreal point `lam0`.

    The reconstruction is checked against :func:`q_tilde` at every accepted
    point of `test_points`; the residuals are stored on the result.
    """
    if np.imag(lam0) == 0:
        raise ValueError("anchor must be nonreal")
    model.dirichlet_solver.check(lam0)
    eig = heig(model.H_II)
    t = eig.eigenvalues
    C = model.H_BI @ eig.eigenvectors            # column j is H_BI u_j
    W = np.einsum("bj,cj->jbc", C, C.conj())     # W_j = c_j c_j^*
    re0 = np.real(lam0)
    coef = (re0 - t) / np.abs(t - lam0) ** 2 + t / (1.0 + t * t)
    alpha = np.tensordot(coef, W, axes=1)
    alpha = (alpha + alpha.conj().T) / 2
    nb = model.n_boundary
    beta = np.zeros((nb, nb))
    data = StieltjesData(complex(lam0), t, W, alpha, beta)
    pts, res = [], []
    for lam in test_points:
        if not model.dirichlet_solver.accepts(lam):
            continue
        pts.append(complex(lam))
        res.append(data.residual(model, lam))
    return StieltjesData(complex(lam0), t, W, alpha, beta, tuple(pts), tuple(res))


# ---------------------------------------------------------------------------
# Nevanlinna structure and characterization


@dataclass
class NevanlinnaReport:
    samples: list
    positivity_tol: float = 1e-12
    symmetry_tol: float = 1e-12

    @property
    def passed(self):
        return all(s["passed"] for s in self.samples)

    @property
    def worst_positivity(self):
        return min(s["min_eig_im"] for s in self.samples) if self.samples else 0.0

    @property
    def worst_symmetry(self):
        return max(s["symmetry_residual"] for s in self.samples) if self.samples else 0.0


def im_part(Q):
    return (Q - Q.conj().T) / 2j


def re_part(Q):
    return (Q + Q.conj().T) / 2


def nevanlinna_check(model, samples, positivity_tol=1e-12, symmetry_tol=1e-12, side="whole"):
    """Check ``Im Q(lam)/Im lam >= 0`` and ``Q(conj lam) = Q(lam)^*`` at `samples`."""
    out = []
    for lam in samples:
        lam = complex(lam)
        if lam.imag == 0:
            raise ValueError("Nevanlinna samples must be nonreal")
        Q = q_at(model, lam, side)
        Qb = q_at(model, lam.conjugate(), side)
        min_eig = float(np.linalg.eigvalsh(im_part(Q) / lam.imag)[0])
        sym = float(np.linalg.norm(Qb - Q.conj().T) / max(1.0, np.linalg.norm(Q)))
        out.append({
            "lambda": lam,
            "min_eig_im": min_eig,
            "symmetry_residual": sym,
            "passed": min_eig >= -positivity_tol and sym <= symmetry_tol,
        })
    return NevanlinnaReport(out, positivity_tol, symmetry_tol)


def simplicity_rank(model, rtol=RANK_RTOL):
    """Dimension of the block Krylov space spanned by ``H_II^k H_IB``.

    Built by block Arnoldi with full reorthogonalization; a new direction is
    kept when its singular value exceeds ``rtol`` times the scale of the
    block it came from.  The result equals ``|I|`` iff the discrete minimal
    operator is simple.
    """
    A = model.H_II
    B = model.H_IB
    n = A.shape[0]
    sb = svd_values(B)
    if sb[0] == 0.0:
        return 0
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    V = U[:, s > rtol * s[0]]
    basis = V
    scale = max(spectral_norm(A), 1e-300)
    for _ in range(n):
        if basis.shape[1] >= n or V.shape[1] == 0:
            break
        W = A @ V
        for _ in range(2):
            W = W - basis @ (basis.conj().T @ W)
        U, s, _ = np.linalg.svd(W, full_matrices=False)
        keep = s > rtol * scale
        V = U[:, keep]
        if V.shape[1]:
            basis = np.hstack([basis, V])
    return int(min(basis.shape[1], n))


def characterization_report(model, lam0, eta_list, alpha_points=DEFAULT_TEST_POINTS, beta_point=1j):
    """Report the (alpha), (beta), (gamma) characterization quantities.

    (alpha) Stieltjes reconstruction residuals of ``Q - Re Q(lam0)``;
    (beta) smallest singular value of ``Im Q~(beta_point)``;
    (gamma) the sequences ``||Q~(i eta)|| / eta`` and
    ``eta * min eig Im Q~(i eta)``, reported without any assertion.
    """
    eta_list = [float(e) for e in eta_list]
    if any(e <= 0 for e in eta_list) or sorted(eta_list) != eta_list:
        raise ValueError("eta_list must be positive and ascending")
    sd = stieltjes(model, lam0, test_points=alpha_points)
    Qt = q_tilde(model, beta_point, lam0)
    beta_sv = float(svd_values(im_part(Qt))[-1])
    growth, im_growth = [], []
    for eta in eta_list:
        Qe = q_tilde(model, 1j * eta, lam0)
        growth.append(float(np.linalg.norm(Qe, 2) / eta))
        im_growth.append(float(eta * np.linalg.eigvalsh(im_part(Qe))[0]))
    rank = simplicity_rank(model)
    return {
        "anchor": complex(lam0),
        "alpha": {
            "points": list(sd.test_points),
            "residuals": list(sd.residuals),
            "max_residual": sd.max_residual,
        },
        "beta": {"lambda": complex(beta_point), "min_singular_value": beta_sv},
        "gamma": {
            "eta": eta_list,
            "norm_over_eta": growth,
            "eta_times_min_im": im_growth,
        },
        "simplicity": {"rank": rank, "n_interior": model.n_interior,
                       "simple": rank == model.n_interior},
    }
