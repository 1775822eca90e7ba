"""Krein resolvent formula, trace formula and finite-rank structure.

For a bounded-layout model the Dirichlet and Neumann realizations differ by
a rank ``<= |B|`` perturbation, and

    (A_D - l)^{-1} - (A_N - l)^{-1} = Gamma(l) Q(l)^{-1} Gamma(conj l)^*
    tr[(A_D - l)^{-1} - (A_N - l)^{-1}] = tr[Q(l)^{-1} dQ/dl]

hold exactly.  Everything here measures how close the computed matrices
come to these identities.
"""
from dataclasses import dataclass, field

import numpy as np

from .boundary_model import gamma_at, q_at, q_derivative
from .errors import SingularQ
from .numerics import ShiftedSolver, numerical_rank, schatten_norm, svd_values

RANK_RTOL = 1e-8
DEFAULT_P_LIST = (1, 2, 4)


def resolvent_difference(model, lam):
    """``(A_D - lam)^{-1} - (A_N - lam)^{-1}`` on the interior space.

    Raises
    ------
    NearSingularShift
        With ``which='A_D'`` or ``which='A_N'`` naming the offending operator.
    """
    RD = model.dirichlet_solver.inverse(lam)
    RN = model.neumann_solver.inverse(lam)
    return RD - RN


def _q_inverse_solver(Q, model, lam):
    solver = ShiftedSolver(Q, tau=model.tau, name="Q")
    s = solver.sigma_min(0.0)
    if not s > model.tau:
        raise SingularQ(lam, s, model.tau)
    return solver


def krein_rhs(model, lam):
    """``Gamma(lam) Q(lam)^{-1} Gamma(conj lam)^*``."""
    G = gamma_at(model, lam)
    G_bar = G if np.imag(lam) == 0 else gamma_at(model, np.conj(lam))
    Q = q_at(model, lam)
    X = _q_inverse_solver(Q, model, lam).solve(0.0, G_bar.conj().T)
    return G @ X


def krein_residual(model, lam):
    """Relative Frobenius residual of the Krein resolvent formula at `lam`."""
    lhs = resolvent_difference(model, lam)
    rhs = krein_rhs(model, lam)
    return float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(lhs)))


def trace_formula(model, lam):
    """Both sides of the trace formula and their relative gap.

    Returns
    -------
    (lhs, rhs, gap) : (complex, complex, float)
    """
    lhs = complex(np.trace(resolvent_difference(model, lam)))
    Q = q_at(model, lam)
    dQ = q_derivative(model, lam)
    rhs = complex(np.trace(_q_inverse_solver(Q, model, lam).solve(0.0, dQ)))
    gap = abs(lhs - rhs) / max(1.0, abs(lhs))
    return lhs, rhs, float(gap)


@dataclass
class KreinReport:
    model_hash: str
    lam: complex
    krein_residual: float
    lhs_trace: complex
    rhs_trace: complex
    trace_gap: float
    singular_values: np.ndarray = field(repr=False)
    numerical_rank: int
    n_boundary: int
    schatten_norms: dict
    site: str | None = None

    def __post_init__(self):
        if self.numerical_rank > self.n_boundary:
            raise AssertionError(
                f"numerical rank {self.numerical_rank} exceeds |B| = {self.n_boundary}")

    def to_dict(self):
        d = {
            "model_hash": self.model_hash,
            "lambda": {"re": self.lam.real, "im": self.lam.imag},
            "krein_residual": self.krein_residual,
            "trace": {
                "lhs_re": self.lhs_trace.real,
                "lhs_im": self.lhs_trace.imag,
                "rhs_re": self.rhs_trace.real,
                "rhs_im": self.rhs_trace.imag,
                "gap": self.trace_gap,
            },
            "singular_values": [float(s) for s in self.singular_values],
            "rank": self.numerical_rank,
            "schatten": {str(p): v for p, v in self.schatten_norms.items()},
        }
        if self.site is not None:
            d["site"] = self.site
        return d


def spectral_summary(diff, p_list=DEFAULT_P_LIST, rank_rtol=RANK_RTOL):
    sv = svd_values(diff)
    return sv, numerical_rank(sv, rank_rtol), {p: schatten_norm(sv, p) for p in p_list}


def schatten_report(model, lam, p_list=DEFAULT_P_LIST):
    """Krein residual, trace formula and singular-value data at `lam`."""
    lam = complex(lam)
    diff = resolvent_difference(model, lam)
    rhs = krein_rhs(model, lam)
    res = float(np.linalg.norm(diff - rhs) / max(1.0, np.linalg.norm(diff)))
    lhs_t, rhs_t, gap = trace_formula(model, lam)
    sv, rank, norms = spectral_summary(diff, p_list)
    return KreinReport(model.model_hash, lam, res, lhs_t, rhs_t, gap, sv, rank,
                       model.n_boundary, norms)


def refinement_decay(build_model, sizes=(8, 16, 32), lam=1j, n_leading=10):
    """Leading singular values of the resolvent difference across grid sizes.

    `build_model` maps a node count to a model.  The decay trend is only
    reported.
    """
    rows = []
    for n in sizes:
        model = build_model(n)
        diff = resolvent_difference(model, lam)
        sv, rank, norms = spectral_summary(diff)
        rows.append({
            "n": n,
            "n_boundary": model.n_boundary,
            "rank": rank,
            "leading_singular_values": [float(s) for s in sv[:n_leading]],
            "schatten": {str(p): v for p, v in norms.items()},
        })
    return rows


def default_real_points(model, count=11):
    """`count` real points below the spectra of both A_D and A_N."""
    lo = min(model.dirichlet_solver.spectrum[0], model.neumann_solver.spectrum[0])
    return [float(lo - 1.0 - k) for k in range(count)]


def sweep_points(re_range=(-5.0, 5.0), im_range=(0.1, 5.0), counts=(21, 11)):
    """Rectangle of points in the upper half-plane, row-major in Im then Re."""
    re = np.linspace(re_range[0], re_range[1], counts[0])
    im = np.linspace(im_range[0], im_range[1], counts[1])
    return [complex(x, y) for y in im for x in re]
