"""Transmission coupling across an interface ring.

The decoupled operator ``A = diag(H_II, H_EE)`` imposes homogeneous
Dirichlet data on the interface from both sides.  The transmission
operator ``A~`` is obtained by eliminating the interface unknowns from
``(Hu)_B = 0``, i.e. by requiring the summed conormal fluxes of both sides
to vanish.  Both act on the same space of interior-plus-exterior nodes, and
their resolvents differ by the rank ``<= |B|`` Krein term built from the
stacked two-sided gamma field and the coupled Q-function.
"""
import numpy as np

from .boundary_model import q_at
from .errors import NearSingularShift, NoExteriorPartition, SingularBoundaryBlock
from .krein_verify import (
    DEFAULT_P_LIST,
    KreinReport,
    _q_inverse_solver,
    spectral_summary,
)
from .numerics import ShiftedSolver


def _require_exterior(model):
    if model.partition.exterior is None:
        raise NoExteriorPartition("model has no exterior partition")


def _interface_coupling(model):
    """``[H_IB; H_EB]``, the coupling of I u E to the interface."""
    return np.vstack([model.H_IB, model.H_EB])


def orthogonal_sum_op(model):
    """``diag(H_II, H_EE)`` on the interior-then-exterior node space."""
    _require_exterior(model)
    nI, nE = model.n_interior, model.n_exterior
    dtype = np.result_type(model.H_II, model.H_EE)
    A = np.zeros((nI + nE, nI + nE), dtype=dtype)
    A[:nI, :nI] = model.H_II
    A[nI:, nI:] = model.H_EE
    return A


def transmission_op(model):
    """Interface-eliminated operator ``A - C H_BB^{-1} C^*`` with ``C = [H_IB; H_EB]``.

    Raises
    ------
    SingularBoundaryBlock
    """
    A = orthogonal_sum_op(model)
    C = _interface_coupling(model)
    try:
        X = model.boundary_solver.solve(0.0, C.conj().T)
    except NearSingularShift as exc:
        raise SingularBoundaryBlock(
            f"H_BB is singular (sigma_min={exc.sigma_min:.3e})") from exc
    At = A - C @ X
    return (At + At.conj().T) / 2


class CoupledOperators:
    """Cached solvers for ``A`` and ``A~`` of one coupled model."""

    def __init__(self, model):
        _require_exterior(model)
        self.model = model
        self.sum_solver = ShiftedSolver(orthogonal_sum_op(model), tau=model.tau, name="A")
        self.transmission_solver = ShiftedSolver(transmission_op(model), tau=model.tau,
                                                 name="A_transmission")

    def check(self, lam):
        # name the failing side explicitly
        self.model.dirichlet_solver.check(lam)
        self.model.exterior_solver.check(lam)


_cache_attr = "_coupled_operators"


def coupled_operators(model):
    ops = model.__dict__.get(_cache_attr)
    if ops is None:
        ops = CoupledOperators(model)
        model.__dict__[_cache_attr] = ops
    return ops


def coupled_gamma(model, lam):
    """Stacked two-sided Dirichlet solution map ``[-(H_II-l)^{-1}H_IB; -(H_EE-l)^{-1}H_EB]``."""
    _require_exterior(model)
    G_in = -model.dirichlet_solver.solve(lam, model.H_IB)
    G_out = -model.exterior_solver.solve(lam, model.H_EB)
    return np.vstack([G_in, G_out])


def coupled_q(model, lam):
    """Coupled Q-function ``-(H_BB - H_BI R_I H_IB - H_BE R_E H_EB)``.

    Maps a common interface value to the (negated) sum of the conormal
    fluxes into both sides.
    """
    _require_exterior(model)
    G = coupled_gamma(model, lam)
    C = _interface_coupling(model)
    return -(model.H_BB + C.conj().T @ G)


def steklov_additivity_residual(model, lam):
    """``||coupled_q - (Q_in + Q_out)||_F / max(1, ||coupled_q||_F)``."""
    if model.boundary_split is None:
        raise ValueError("additivity needs a model with a boundary split")
    Q = coupled_q(model, lam)
    parts = q_at(model, lam, "in") + q_at(model, lam, "out")
    return float(np.linalg.norm(Q - parts) / max(1.0, np.linalg.norm(Q)))


def coupled_q_derivative(model, lam):
    G = coupled_gamma(model, lam)
    G_bar = G if np.imag(lam) == 0 else coupled_gamma(model, np.conj(lam))
    return G_bar.conj().T @ G


def coupled_q_identity_residual(model, lam, mu):
    Ql, Qm = coupled_q(model, lam), coupled_q(model, mu)
    Gl, Gm = coupled_gamma(model, lam), coupled_gamma(model, mu)
    diff = Ql - Qm.conj().T - (lam - np.conj(mu)) * (Gm.conj().T @ Gl)
    return float(np.linalg.norm(diff) / max(1.0, np.linalg.norm(Ql)))


def coupled_resolvent_difference(model, lam):
    """``(A - lam)^{-1} - (A~ - lam)^{-1}`` on I u E."""
    ops = coupled_operators(model)
    ops.check(lam)
    return ops.sum_solver.inverse(lam) - ops.transmission_solver.inverse(lam)


def coupled_krein_rhs(model, lam):
    G = coupled_gamma(model, lam)
    G_bar = G if np.imag(lam) == 0 else coupled_gamma(model, np.conj(lam))
    Q = coupled_q(model, lam)
    X = _q_inverse_solver(Q, model, lam).solve(0.0, G_bar.conj().T)
    return G @ X


def coupled_krein_residual(model, lam):
    lhs = coupled_resolvent_difference(model, lam)
    rhs = coupled_krein_rhs(model, lam)
    return float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(lhs)))


def coupled_trace_formula(model, lam):
    """``tr[(A-l)^{-1} - (A~-l)^{-1}]`` against ``tr[Q(l)^{-1} G(conj l)^* G(l)]``."""
    lhs = complex(np.trace(coupled_resolvent_difference(model, lam)))
    Q = coupled_q(model, lam)
    dQ = coupled_q_derivative(model, lam)
    rhs = complex(np.trace(_q_inverse_solver(Q, model, lam).solve(0.0, dQ)))
    return lhs, rhs, float(abs(lhs - rhs) / max(1.0, abs(lhs)))


def flux_jump_residual(model, lam, h):
    """Transmission condition for ``k = (A~ - lam)^{-1} h``.

    Reconstructs the interface value ``u_B = -H_BB^{-1}(H_BI k_I + H_BE k_E)``
    and returns ``(flux_jump, equation_residual)``: the norm of
    ``(Hu)_B`` and of ``((H - lam)u)_{I u E} - h``, both relative to
    ``max(1, ||h||)``.
    """
    ops = coupled_operators(model)
    h = np.asarray(h).ravel()
    k = ops.transmission_solver.solve(lam, h)
    nI = model.n_interior
    kI, kE = k[:nI], k[nI:]
    uB = -model.boundary_solver.solve(0.0, model.H_BI @ kI + model.H_BE @ kE)
    jump = model.H_BI @ kI + model.H_BB @ uB + model.H_BE @ kE
    eq_I = model.H_II @ kI + model.H_IB @ uB - lam * kI - h[:nI]
    eq_E = model.H_EE @ kE + model.H_EB @ uB - lam * kE - h[nI:]
    scale = max(1.0, np.linalg.norm(h))
    return (float(np.linalg.norm(jump) / scale),
            float(np.sqrt(np.linalg.norm(eq_I) ** 2 + np.linalg.norm(eq_E) ** 2) / scale))


def coupled_report(model, lam, p_list=DEFAULT_P_LIST):
    lam = complex(lam)
    diff = coupled_resolvent_difference(model, lam)
    rhs = coupled_krein_rhs(model, lam)
    res = float(np.linalg.norm(diff - rhs) / max(1.0, np.linalg.norm(diff)))
    lhs_t, rhs_t, gap = coupled_trace_formula(model, lam)
    sv, rank, norms = spectral_summary(diff, p_list)
    return KreinReport(model.model_hash, lam, res, lhs_t, rhs_t, gap, sv, rank,
                       model.n_boundary, norms, site="coupled")


def bracketing_report(model, count=10):
    """Lowest eigenvalues of ``A`` and ``A~`` side by side."""
    ops = coupled_operators(model)
    a = ops.sum_solver.spectrum
    at = ops.transmission_solver.spectrum
    return {
        "sum_lowest": [float(x) for x in a[:count]],
        "transmission_lowest": [float(x) for x in at[:count]],
        "min_sum": float(a[0]),
        "min_transmission": float(at[0]),
        "bracketing_gap": float(a[0] - at[0]),
    }
