import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dtn_krein.boundary_model import (
    Partition,
    PartitionedHermitian,
    path3_model,
    q_at,
    random_hermitian,
    toy_model,
)
from dtn_krein.coupling import (
    bracketing_report,
    coupled_krein_residual,
    coupled_krein_rhs,
    coupled_q,
    coupled_q_derivative,
    coupled_q_identity_residual,
    coupled_report,
    coupled_resolvent_difference,
    coupled_trace_formula,
    flux_jump_residual,
    orthogonal_sum_op,
    steklov_additivity_residual,
    transmission_op,
)
from dtn_krein.elliptic_assembly import GridSpec, build
from dtn_krein.errors import NoExteriorPartition
from dtn_krein.rng import SplitMix64

upper = st.complex_numbers(min_magnitude=0.1, max_magnitude=6).filter(lambda z: abs(z.imag) >= 0.1)


def random_coupled(seed, nI=6, nB=3, nE=7):
    rng = SplitMix64(seed)
    n = nI + nB + nE
    H = random_hermitian(rng, n)
    I = np.arange(nI)
    B = np.arange(nI, nI + nB)
    E = np.arange(nI + nB, n)
    H[np.ix_(I, E)] = 0
    H[np.ix_(E, I)] = 0
    b_in = random_hermitian(rng.split(1), nB)
    b_out = H[np.ix_(B, B)] - b_in
    return PartitionedHermitian(H, Partition(I, B, E), boundary_split=(b_in, b_out))


@pytest.fixture(scope="module")
def grid12():
    return build(GridSpec(12, 12, layout="coupled"), "laplacian")


def test_path3_hand_values():
    m = path3_model()
    np.testing.assert_array_equal(orthogonal_sum_op(m), np.diag([2.0, 2.0]))
    np.testing.assert_allclose(transmission_op(m), [[1.5, -0.5], [-0.5, 1.5]], atol=1e-15)
    assert abs(coupled_q(m, 0)[0, 0] + 1.0) < 1e-14
    assert abs(q_at(m, 0, "in")[0, 0] + 0.5) < 1e-14
    assert abs(q_at(m, 0, "out")[0, 0] + 0.5) < 1e-14
    np.testing.assert_allclose(coupled_resolvent_difference(m, 0), np.full((2, 2), -0.25),
                               atol=1e-14)
    np.testing.assert_allclose(coupled_krein_rhs(m, 0), np.full((2, 2), -0.25), atol=1e-14)
    lhs, rhs, gap = coupled_trace_formula(m, 0)
    assert abs(lhs + 0.5) < 1e-14 and abs(rhs + 0.5) < 1e-14


def test_path3_additivity_and_flux():
    m = path3_model()
    for lam in (0.0, 1j, 0.5 + 0.25j):
        assert steklov_additivity_residual(m, lam) <= 1e-14
        jump, eq = flux_jump_residual(m, lam, np.array([1.0, -2.0]))
        assert jump <= 1e-14 and eq <= 1e-14


def test_requires_exterior():
    with pytest.raises(NoExteriorPartition):
        coupled_q(toy_model(), 1j)
    with pytest.raises(NoExteriorPartition):
        transmission_op(toy_model())


@pytest.mark.parametrize("lam", [1j, 2 + 1j, -1.0, 0.5 + 0.25j])
def test_grid_coupled_identities(grid12, lam):
    assert steklov_additivity_residual(grid12, lam) <= 1e-12
    assert coupled_krein_residual(grid12, lam) <= 1e-10
    assert coupled_trace_formula(grid12, lam)[2] <= 1e-9
    h = SplitMix64(3).uniform(grid12.n_interior + grid12.n_exterior, -1, 1)
    jump, eq = flux_jump_residual(grid12, lam, h)
    assert jump <= 1e-12 and eq <= 1e-12
    rep = coupled_report(grid12, lam)
    assert rep.site == "coupled" and rep.numerical_rank <= grid12.n_boundary


def test_grid_bracketing(grid12):
    rep = bracketing_report(grid12)
    assert rep["min_sum"] >= rep["min_transmission"]
    assert np.all(np.array(rep["sum_lowest"]) >= np.array(rep["transmission_lowest"]) - 1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 64 - 1), lam=upper, mu=upper)
def test_coupled_properties_random(seed, lam, mu):
    m = random_coupled(seed)
    assert steklov_additivity_residual(m, lam) <= 1e-12
    assert coupled_q_identity_residual(m, lam, mu) <= 1e-10
    assert coupled_krein_residual(m, lam) <= 1e-10
    assert coupled_trace_formula(m, lam)[2] <= 1e-9


def test_coupled_derivative_matches_difference_quotient():
    m = random_coupled(17)
    lam, h = 0.3 + 1j, 1e-4
    fd = (coupled_q(m, lam + h) - coupled_q(m, lam - h)) / (2 * h)
    dQ = coupled_q_derivative(m, lam)
    assert np.linalg.norm(fd - dQ) <= 1e-6 * max(1.0, np.linalg.norm(dQ))
