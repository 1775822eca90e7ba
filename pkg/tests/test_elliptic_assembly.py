import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from dtn_krein.boundary_model import gamma_at, q_at, simplicity_rank
from dtn_krein.elliptic_assembly import (
    ELEMENT_XX,
    ELEMENT_XY,
    ELEMENT_YY,
    CoefficientField,
    GridSpec,
    assemble,
    build,
    conormal_trace,
    coupled_grid,
    default_inner_box,
    element_matrix,
    ellipticity_check,
    preset,
    green_identity_residual,
    read_coefficient_table,
    write_coefficient_table,
)
from dtn_krein.errors import LayoutError, NotElliptic
from dtn_krein.rng import SplitMix64


def exact_element(a11, a12, a22):
    """Element stiffness by symbolic integration over the unit cell."""
    x, y = sp.symbols("x y")
    basis = [(1 - x) * (1 - y), x * (1 - y), (1 - x) * y, x * y]
    K = sp.zeros(4, 4)
    for a, pa in enumerate(basis):
        for b, pb in enumerate(basis):
            ga = (sp.diff(pa, x), sp.diff(pa, y))
            gb = (sp.diff(pb, x), sp.diff(pb, y))
            form = (a11 * ga[0] * gb[0] + a12 * (ga[0] * gb[1] + ga[1] * gb[0])
                    + a22 * ga[1] * gb[1])
            K[a, b] = sp.integrate(form, (x, 0, 1), (y, 0, 1))
    return K


@pytest.fixture(scope="module")
def symbolic_parts():
    return (np.array(exact_element(1, 0, 0), dtype=float),
            np.array(exact_element(0, 1, 0), dtype=float),
            np.array(exact_element(0, 0, 1), dtype=float))


def test_element_matrices_match_symbolic_integration(symbolic_parts):
    xx, xy, yy = symbolic_parts
    np.testing.assert_allclose(ELEMENT_XX, xx, atol=1e-15)
    np.testing.assert_allclose(ELEMENT_XY, xy, atol=1e-15)
    np.testing.assert_allclose(ELEMENT_YY, yy, atol=1e-15)


def test_element_matrix_anisotropic_rational():
    K = np.array(exact_element(sp.Integer(2), sp.Rational(1, 2), sp.Integer(1)), dtype=float)
    np.testing.assert_allclose(element_matrix(2.0, 0.5, 1.0), K, atol=1e-15)
    # constants are in the kernel
    np.testing.assert_allclose(element_matrix(2.0, 0.5, 1.0) @ np.ones(4), 0, atol=1e-15)


def test_laplacian_3x3_stencil():
    m = build(GridSpec(3, 3, h=1.0))
    H = m.H
    c = 4  # center node
    assert abs(H[c, c] - 8 / 3) < 1e-15
    assert np.allclose(H[c, [0, 1, 2, 3, 5, 6, 7, 8]], -1 / 3, atol=1e-15)
    assert np.array_equal(H, H.T)
    assert m.n_interior == 1 and m.n_boundary == 8


def test_grid_spacing_scales_stiffness():
    H1 = build(GridSpec(5, 5, h=1.0)).H
    H2 = build(GridSpec(5, 5, h=0.5)).H
    np.testing.assert_allclose(H2, 4 * H1, rtol=1e-15)


def test_potential_shifts_diagonal():
    g = GridSpec(6, 5)
    H0 = build(g).H
    H1 = build(g, a0=0.75).H
    np.testing.assert_allclose(H1 - H0, 0.75 * np.eye(30), atol=1e-12)


@pytest.mark.parametrize("name", ["laplacian", "anisotropic", "affine"])
def test_presets_exactly_symmetric_and_sized(name):
    m = build(GridSpec(8, 8), name)
    assert np.array_equal(m.H, m.H.T)
    assert (m.n_interior, m.n_boundary) == (36, 28)
    np.testing.assert_allclose(m.H @ np.ones(64), 0, atol=1e-9)


def test_anisotropic_ellipticity_constant():
    g = GridSpec(4, 4)
    assert abs(ellipticity_check(preset("anisotropic", g)) - (3 - 2 ** 0.5) / 2) < 1e-15


def test_not_elliptic_reports_cell():
    g = GridSpec(4, 4)
    c = CoefficientField.constant(g, 1.0, 0.0, 1.0)
    a12 = c.a12.copy()
    a12[1, 2] = 1.5
    bad = CoefficientField(c.a11, a12, c.a22, c.a0)
    with pytest.raises(NotElliptic) as info:
        assemble(g, bad)
    assert info.value.cell == (2, 1)
    assert info.value.value < 0


def test_coefficient_table_round_trip(tmp_path):
    g = GridSpec(6, 5)
    c = preset("affine", g)
    path = tmp_path / "coeffs.csv"
    write_coefficient_table(path, c)
    back = read_coefficient_table(path, g)
    for k in ("a11", "a12", "a22"):
        np.testing.assert_array_equal(getattr(back, k), getattr(c, k))
    np.testing.assert_allclose(assemble(g, back).H, assemble(g, c).H, atol=1e-12)


def test_coefficient_table_missing_cell(tmp_path):
    g = GridSpec(4, 4)
    path = tmp_path / "coeffs.csv"
    write_coefficient_table(path, preset("laplacian", g))
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(ValueError, match="misses 1 cells"):
        read_coefficient_table(path, g)


def test_coefficient_table_duplicate_cell(tmp_path):
    g = GridSpec(4, 4)
    path = tmp_path / "coeffs.csv"
    write_coefficient_table(path, preset("laplacian", g))
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines + [lines[1]]) + "\n")
    with pytest.raises(ValueError, match="duplicate"):
        read_coefficient_table(path, g)


def test_coefficient_shape_mismatch():
    with pytest.raises(LayoutError):
        assemble(GridSpec(5, 5), preset("laplacian", GridSpec(4, 4)))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 64 - 1))
def test_green_identity(seed):
    m = build(GridSpec(7, 6), "affine", a0=0.3)
    rng = SplitMix64(seed)
    n = m.n
    u = rng.uniform(n, -1, 1) + 1j * rng.uniform(n, -1, 1)
    v = rng.uniform(n, -1, 1) + 1j * rng.uniform(n, -1, 1)
    assert green_identity_residual(m, u, v) <= 1e-14


def test_conormal_trace_of_constants_vanishes():
    m = build(GridSpec(8, 8), "anisotropic")
    u = np.ones(m.n)
    np.testing.assert_allclose(conormal_trace(m, u), 0, atol=1e-10)


@pytest.mark.parametrize("lam", [1j, -1.0, 2 + 1j])
def test_conormal_trace_of_eigensolution_is_minus_q(lam):
    m = build(GridSpec(8, 8), "affine")
    phi = SplitMix64(21).uniform(m.n_boundary, -1, 1)
    uI = gamma_at(m, lam) @ phi
    u = np.concatenate([uI, phi])
    # the interior rows hold the eigen-equation
    res = m.H_II @ uI + m.H_IB @ phi - lam * uI
    assert np.linalg.norm(res) <= 1e-10 * np.linalg.norm(m.H_IB @ phi)
    np.testing.assert_allclose(conormal_trace(m, u), -q_at(m, lam) @ phi, atol=1e-10)


def test_generic_grid_is_simple():
    assert simplicity_rank(build(GridSpec(8, 8))) == 36


def test_coupled_layout_blocks():
    g = GridSpec(12, 12, layout="coupled")
    assert g.inner == default_inner_box(12, 12) == (3, 7, 3, 7)
    m = build(g, "laplacian", a0=0.5)
    assert (m.n_interior, m.n_boundary, m.n_exterior) == (9, 16, 75)
    I, E = m.partition.interior, m.partition.exterior
    assert not np.any(m.H[np.ix_(I, E)])
    b_in, b_out = m.boundary_split
    np.testing.assert_allclose(b_in + b_out, m.H_BB, atol=1e-14)


def test_coupled_layout_clearance():
    with pytest.raises(LayoutError):
        GridSpec(8, 8, layout="coupled", inner=(1, 4, 2, 5))
    with pytest.raises(LayoutError):
        GridSpec(8, 8, layout="bounded", inner=(2, 5, 2, 5))


def test_coupled_grid_far_field():
    g = coupled_grid(4)
    i0, i1, _, _ = g.inner
    assert i1 - i0 == 3
    assert g.nx >= 3 * 3 * 2 ** 0.5
