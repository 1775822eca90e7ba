import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dtn_krein.boundary_model import path3_model, random_model, toy_model
from dtn_krein.elliptic_assembly import GridSpec, build
from dtn_krein.errors import NearSingularShift, SingularQ
from dtn_krein.krein_verify import (
    KreinReport,
    default_real_points,
    krein_residual,
    krein_rhs,
    refinement_decay,
    resolvent_difference,
    schatten_report,
    sweep_points,
    trace_formula,
)
from dtn_krein.rng import SplitMix64

upper = st.complex_numbers(min_magnitude=0.1, max_magnitude=6).filter(lambda z: abs(z.imag) >= 0.1)


def test_toy_resolvent_difference():
    m = toy_model()
    # 1/2 - 1/1
    assert abs(resolvent_difference(m, 0)[0, 0] + 0.5) < 1e-14
    assert abs(krein_rhs(m, 0)[0, 0] + 0.5) < 1e-14
    lhs, rhs, gap = trace_formula(m, 0)
    assert abs(lhs + 0.5) < 1e-14 and abs(rhs + 0.5) < 1e-14 and gap < 1e-14


def test_path3_bounded_resolvent_difference():
    m = path3_model(coupled=False)
    np.testing.assert_allclose(resolvent_difference(m, 0), np.full((2, 2), -0.25), atol=1e-14)
    np.testing.assert_allclose(krein_rhs(m, 0), np.full((2, 2), -0.25), atol=1e-14)
    lhs, rhs, _ = trace_formula(m, 0)
    assert abs(lhs + 0.5) < 1e-14 and abs(rhs + 0.5) < 1e-14


def test_singular_q_at_neumann_eigenvalue():
    m = toy_model()
    with pytest.raises(SingularQ):
        krein_rhs(m, 1.0)
    with pytest.raises(NearSingularShift) as info:
        resolvent_difference(m, 1.0)
    assert info.value.which == "A_N"


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 64 - 1), lam=upper)
def test_krein_and_trace_property(seed, lam):
    rng = SplitMix64(seed)
    nI = int(rng.integers(1, 16, 1)[0])
    nB = int(rng.integers(1, 6, 1)[0])
    m = random_model(rng, nI, nB)
    assert krein_residual(m, lam) <= 1e-10
    assert trace_formula(m, lam)[2] <= 1e-9
    rep = schatten_report(m, lam)
    assert rep.numerical_rank <= m.n_boundary


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 64 - 1), lam=upper)
def test_resolvent_difference_adjoint_symmetry(seed, lam):
    m = random_model(SplitMix64(seed), 10, 3)
    D = resolvent_difference(m, lam)
    Db = resolvent_difference(m, np.conj(lam))
    assert np.linalg.norm(Db - D.conj().T) <= 1e-12 * max(1.0, np.linalg.norm(D))


def test_real_points_give_negative_semidefinite_difference():
    m = build(GridSpec(8, 8))
    for lam in default_real_points(m, 4):
        D = resolvent_difference(m, lam)
        assert np.allclose(D, D.T, atol=1e-14)
        assert np.linalg.eigvalsh(D)[-1] <= 1e-12
        assert krein_residual(m, lam) <= 1e-10


def test_rank_bounded_by_boundary_on_grid():
    m = build(GridSpec(8, 8), "anisotropic")
    rep = schatten_report(m, 2 + 1j)
    assert rep.numerical_rank <= m.n_boundary
    s = rep.singular_values
    assert abs(rep.schatten_norms[2] - np.linalg.norm(s)) <= 1e-14 * np.linalg.norm(s)
    assert rep.schatten_norms[1] >= rep.schatten_norms[2] >= rep.schatten_norms[4]


def test_report_dict_layout():
    d = schatten_report(toy_model(), 1j).to_dict()
    assert set(d) == {"model_hash", "lambda", "krein_residual", "trace",
                      "singular_values", "rank", "schatten"}
    assert set(d["schatten"]) == {"1", "2", "4"}
    assert d["rank"] == 1


def test_report_rejects_rank_above_boundary():
    with pytest.raises(AssertionError):
        KreinReport("x", 1j, 0.0, 0j, 0j, 0.0, np.ones(3), 3, 2, {})


def test_refinement_decay_rows():
    rows = refinement_decay(lambda n: build(GridSpec(n, n)), sizes=(4, 6), lam=1j, n_leading=3)
    assert [r["n"] for r in rows] == [4, 6]
    for r in rows:
        assert r["rank"] <= r["n_boundary"]
        assert len(r["leading_singular_values"]) == 3


def test_sweep_points_layout():
    pts = sweep_points(counts=(21, 11))
    assert len(pts) == 231
    assert pts[0] == complex(-5, 0.1) and pts[-1] == complex(5, 5)
    assert all(p.imag > 0 for p in pts)
