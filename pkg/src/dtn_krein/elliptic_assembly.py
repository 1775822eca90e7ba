"""Assembly of discrete uniformly elliptic operators on uniform 2-D grids.

The operator ``-div(a grad u) + a0 u`` is discretized with bilinear
quadrilateral elements.  The symmetric coefficient tensor ``a`` is sampled
once per cell (at the cell midpoint) and the element integrals of the
basis-gradient products are then exact.  Dividing the stiffness matrix by
the lumped mass ``h**2`` and adding ``a0`` on the diagonal gives a real
symmetric ``H`` that is Hermitian in the plain Euclidean inner product.

Node ``(i, j)`` sits at ``(i*h, j*h)`` and has global index ``j*nx + i``;
cell ``(ci, cj)`` has lower-left corner node ``(ci, cj)``.
"""
from dataclasses import dataclass
import csv

import numpy as np

from .boundary_model import Partition, PartitionedHermitian
from .errors import LayoutError, NotElliptic

LAYOUTS = ("bounded", "coupled")

# 1-D linear element integrals on [0, 1]: stiffness, mass, and C[a, b] = int phi_a' phi_b
_K1 = np.array([[1.0, -1.0], [-1.0, 1.0]])
_M1 = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
_C1 = np.array([[-0.5, -0.5], [0.5, 0.5]])

# local node order (0,0), (1,0), (0,1), (1,1); index = 2*ly + lx
ELEMENT_XX = np.kron(_M1, _K1)
ELEMENT_YY = np.kron(_K1, _M1)
_XY = np.kron(_C1.T, _C1)
ELEMENT_XY = _XY + _XY.T
_LOCAL_OFFSETS = ((0, 0), (1, 0), (0, 1), (1, 1))


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``nx * ny`` nodes with spacing `h`.

    For ``layout='coupled'`` the node box ``inner = (i0, i1, j0, j1)``
    (inclusive) is the interface ring; its strict inside is the interior
    region and everything between it and the outermost node ring is the
    exterior region.  The outermost ring is removed (homogeneous Dirichlet
    truncation of the exterior).
    """

    nx: int
    ny: int
    h: float | None = None
    layout: str = "bounded"
    inner: tuple | None = None

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise LayoutError(f"grid needs at least 3x3 nodes, got {self.nx}x{self.ny}")
        if self.h is None:
            object.__setattr__(self, "h", 1.0 / (max(self.nx, self.ny) - 1))
        if not self.h > 0:
            raise LayoutError(f"grid spacing must be positive, got {self.h}")
        if self.layout not in LAYOUTS:
            raise LayoutError(f"layout must be one of {LAYOUTS}, got {self.layout!r}")
        if self.layout == "coupled":
            inner = self.inner if self.inner is not None else default_inner_box(self.nx, self.ny)
            inner = tuple(int(v) for v in inner)
            object.__setattr__(self, "inner", inner)
            i0, i1, j0, j1 = inner
            # ring strictly inside the outer ring, >= 1 exterior node between them,
            # and a nonempty strict inside
            if not (2 <= i0 and i1 <= self.nx - 3 and 2 <= j0 and j1 <= self.ny - 3):
                raise LayoutError(f"inner box {inner} lacks clearance in a {self.nx}x{self.ny} grid")
            if i1 - i0 < 2 or j1 - j0 < 2:
                raise LayoutError(f"inner box {inner} has an empty inside")
        elif self.inner is not None:
            raise LayoutError("inner box is only meaningful for the coupled layout")

    @property
    def n_cells(self):
        return (self.nx - 1) * (self.ny - 1)

    def node_index(self, i, j):
        return j * self.nx + i

    def node_coords(self):
        x = np.arange(self.nx) * self.h
        y = np.arange(self.ny) * self.h
        return np.meshgrid(x, y)          # shape (ny, nx)

    def cell_midpoints(self):
        x = (np.arange(self.nx - 1) + 0.5) * self.h
        y = (np.arange(self.ny - 1) + 0.5) * self.h
        return np.meshgrid(x, y)          # shape (ny-1, nx-1)


def default_inner_box(nx, ny):
    """Centered inner box about a third of the grid wide.

    The outer rectangle is then roughly three box diameters across, which is
    the default far-field truncation distance.
    """
    def span(n):
        w = max(3, round((n - 1) / 3))
        lo = (n - 1 - w) // 2
        return lo, lo + w
    i0, i1 = span(nx)
    j0, j1 = span(ny)
    return (i0, i1, j0, j1)


def coupled_grid(inner_nodes, h=None, far_factor=3.0):
    """Coupled-layout grid sized so the outer box is `far_factor` inner diameters wide."""
    w = int(inner_nodes) - 1
    if w < 2:
        raise LayoutError("inner box needs at least 3 nodes per side")
    diam = w * np.sqrt(2.0)
    n = max(w + 5, int(np.ceil(far_factor * diam)) + 1)
    lo = (n - 1 - w) // 2
    return GridSpec(n, n, h=h, layout="coupled", inner=(lo, lo + w, lo, lo + w))


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Per-cell coefficient tensor and per-node potential.

    Arrays ``a11, a12, a22`` have shape ``(ny-1, nx-1)`` indexed
    ``[cell_j, cell_i]``; ``a0`` has shape ``(ny, nx)``.
    """

    a11: np.ndarray
    a12: np.ndarray
    a22: np.ndarray
    a0: np.ndarray
    source: str = "table"

    def __post_init__(self):
        shape = np.shape(self.a11)
        for name in ("a11", "a12", "a22", "a0"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite and real")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.a12.shape != shape or self.a22.shape != shape:
            raise ValueError("a11, a12, a22 must share one per-cell shape")
        if self.a0.shape != (shape[0] + 1, shape[1] + 1):
            raise ValueError("a0 must be sampled per node")

    @property
    def cell_shape(self):
        return self.a11.shape

    def matches(self, grid):
        return self.cell_shape == (grid.ny - 1, grid.nx - 1)

    def with_potential(self, a0):
        a0 = np.broadcast_to(np.asarray(a0, dtype=float), self.a0.shape)
        return CoefficientField(self.a11, self.a12, self.a22, a0, self.source)

    @classmethod
    def constant(cls, grid, a11=1.0, a12=0.0, a22=1.0, a0=0.0, source="constant"):
        cs = (grid.ny - 1, grid.nx - 1)
        ns = (grid.ny, grid.nx)
        return cls(np.full(cs, a11), np.full(cs, a12), np.full(cs, a22), np.full(ns, a0), source)

    @classmethod
    def affine(cls, grid, a11, a12, a22, a0=(0.0, 0.0, 0.0), source="affine"):
        """Coefficients ``c0 + c1*x + c2*y`` given as triples ``(c0, c1, c2)``.

        The tensor entries are sampled at cell midpoints, the potential at
        nodes.
        """
        X, Y = grid.cell_midpoints()
        Xn, Yn = grid.node_coords()

        def ev(c, x, y):
            c0, c1, c2 = (float(v) for v in c)
            return c0 + c1 * x + c2 * y
        return cls(ev(a11, X, Y), ev(a12, X, Y), ev(a22, X, Y), ev(a0, Xn, Yn), source)


PRESETS = ("laplacian", "anisotropic", "affine")


def preset(name, grid, a0=0.0):
    """Named coefficient presets.

    ``laplacian``   a11 = a22 = 1, a12 = 0
    ``anisotropic`` a11 = 2, a12 = 0.5, a22 = 1
    ``affine``      a11 = 1 + 0.5x + 0.25y, a12 = 0.2 + 0.1x - 0.1y,
                    a22 = 1.5 - 0.25x + 0.5y (elliptic on the unit square)
    """
    if name == "laplacian":
        return CoefficientField.constant(grid, 1.0, 0.0, 1.0, a0, source="laplacian")
    if name == "anisotropic":
        return CoefficientField.constant(grid, 2.0, 0.5, 1.0, a0, source="anisotropic")
    if name == "affine":
        return CoefficientField.affine(grid, (1.0, 0.5, 0.25), (0.2, 0.1, -0.1),
                                       (1.5, -0.25, 0.5), (a0, 0.0, 0.0), source="affine")
    raise ValueError(f"unknown coefficient preset {name!r}; choose from {PRESETS}")


def read_coefficient_table(path, grid):
    """Read per-cell coefficients from CSV.

    Columns ``cell_i, cell_j, a11, a12, a22, a0`` in any row order.  Every
    cell must appear exactly once.  The per-node potential is the average of
    ``a0`` over the cells touching the node.
    """
    ncx, ncy = grid.nx - 1, grid.ny - 1
    fields = ("a11", "a12", "a22", "a0")
    data = {k: np.full((ncy, ncx), np.nan) for k in fields}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"cell_i", "cell_j", *fields} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"coefficient table lacks columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            ci, cj = int(row["cell_i"]), int(row["cell_j"])
            if not (0 <= ci < ncx and 0 <= cj < ncy):
                raise ValueError(f"line {lineno}: cell ({ci}, {cj}) outside the grid")
            if not np.isnan(data["a11"][cj, ci]):
                raise ValueError(f"line {lineno}: duplicate cell ({ci}, {cj})")
            for k in fields:
                data[k][cj, ci] = float(row[k])
    holes = np.argwhere(np.isnan(data["a11"]))
    if holes.size:
        cj, ci = holes[0]
        raise ValueError(f"coefficient table misses {len(holes)} cells, e.g. ({ci}, {cj})")
    a0_cell = data["a0"]
    acc = np.zeros((grid.ny, grid.nx))
    cnt = np.zeros((grid.ny, grid.nx))
    for dx, dy in _LOCAL_OFFSETS:
        acc[dy:dy + ncy, dx:dx + ncx] += a0_cell
        cnt[dy:dy + ncy, dx:dx + ncx] += 1
    return CoefficientField(data["a11"], data["a12"], data["a22"], acc / cnt, source=str(path))


def write_coefficient_table(path, coeffs):
    """Write the per-cell table; ``a0`` per cell is the mean of its corner nodes."""
    a0n = coeffs.a0
    a0c = (a0n[:-1, :-1] + a0n[:-1, 1:] + a0n[1:, :-1] + a0n[1:, 1:]) / 4
    ncy, ncx = coeffs.cell_shape
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cell_i", "cell_j", "a11", "a12", "a22", "a0"])
        for cj in range(ncy):
            for ci in range(ncx):
                w.writerow([ci, cj] + [format(v, ".17g") for v in (
                    coeffs.a11[cj, ci], coeffs.a12[cj, ci], coeffs.a22[cj, ci], a0c[cj, ci])])


def ellipticity_check(coeffs):
    """Uniform ellipticity constant: min over cells of the smaller tensor eigenvalue.

    Raises
    ------
    NotElliptic
        At the first cell (row-major) whose tensor is not positive definite.
    """
    a11, a12, a22 = coeffs.a11, coeffs.a12, coeffs.a22
    lam_min = (a11 + a22) / 2 - np.sqrt(((a11 - a22) / 2) ** 2 + a12 ** 2)
    bad = np.argwhere(lam_min <= 0)
    if bad.size:
        cj, ci = bad[0]
        raise NotElliptic((ci, cj), lam_min[cj, ci])
    return float(lam_min.min())


def element_matrix(a11, a12, a22):
    """Exact 4x4 bilinear stiffness of one cell with constant tensor (h-independent in 2-D)."""
    return a11 * ELEMENT_XX + a22 * ELEMENT_YY + a12 * ELEMENT_XY


def _assemble_full(grid, coeffs, cell_mask=None):
    """Stiffness/h**2 over all nodes from the cells selected by `cell_mask`."""
    nx, ny = grid.nx, grid.ny
    n = nx * ny
    K = np.zeros((n, n))
    ncy, ncx = ny - 1, nx - 1
    cj, ci = np.meshgrid(np.arange(ncy), np.arange(ncx), indexing="ij")
    cj, ci = cj.ravel(), ci.ravel()
    if cell_mask is not None:
        sel = cell_mask.ravel()
        cj, ci = cj[sel], ci[sel]
    nodes = np.stack([(cj + dy) * nx + (ci + dx) for dx, dy in _LOCAL_OFFSETS], axis=1)
    a11 = coeffs.a11[cj, ci]
    a12 = coeffs.a12[cj, ci]
    a22 = coeffs.a22[cj, ci]
    local = (a11[:, None, None] * ELEMENT_XX + a22[:, None, None] * ELEMENT_YY
             + a12[:, None, None] * ELEMENT_XY)
    rows = np.repeat(nodes, 4, axis=1).ravel()
    cols = np.tile(nodes, (1, 4)).ravel()
    np.add.at(K, (rows, cols), local.reshape(len(ci), 16).ravel())
    K /= grid.h ** 2
    # exact symmetry independent of accumulation order
    return (K + K.T) / 2


def assemble(grid, coeffs):
    """Build the :class:`PartitionedHermitian` model of a grid and coefficients.

    ``bounded`` layout: all nodes, boundary = outermost ring.
    ``coupled`` layout: the outermost ring is dropped; B = inner-box ring,
    I = strict inside, E = the rest.  The boundary block is split into the
    contributions of cells inside and outside the box.

    Raises
    ------
    NotElliptic
    LayoutError
    """
    ellipticity_check(coeffs)
    if not coeffs.matches(grid):
        raise LayoutError(f"coefficients have cell shape {coeffs.cell_shape}, "
                          f"grid needs {(grid.ny - 1, grid.nx - 1)}")
    nx, ny = grid.nx, grid.ny
    J, I = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    I, J = I.ravel(), J.ravel()
    a0 = coeffs.a0.ravel()
    outer = (I == 0) | (I == nx - 1) | (J == 0) | (J == ny - 1)

    if grid.layout == "bounded":
        H = _assemble_full(grid, coeffs) + np.diag(a0)
        interior = np.flatnonzero(~outer)
        boundary = np.flatnonzero(outer)
        return PartitionedHermitian(H, Partition(interior, boundary),
                                    name=f"{coeffs.source}-{nx}x{ny}")

    i0, i1, j0, j1 = grid.inner
    ncy, ncx = ny - 1, nx - 1
    cj, ci = np.meshgrid(np.arange(ncy), np.arange(ncx), indexing="ij")
    in_cells = (ci >= i0) & (ci < i1) & (cj >= j0) & (cj < j1)
    # node share of the potential by owning side: fraction of incident cells
    in_frac = np.zeros((ny, nx))
    for dx, dy in _LOCAL_OFFSETS:
        in_frac[dy:dy + ncy, dx:dx + ncx] += in_cells
    in_frac = (in_frac / 4.0).ravel()
    a0_in = a0 * in_frac
    a0_out = a0 - a0_in
    H_in = _assemble_full(grid, coeffs, in_cells) + np.diag(a0_in)
    H_out = _assemble_full(grid, coeffs, ~in_cells) + np.diag(a0_out)
    H_full = H_in + H_out

    keep = np.flatnonzero(~outer)
    pos = np.full(nx * ny, -1)
    pos[keep] = np.arange(keep.size)
    on_box = (I >= i0) & (I <= i1) & (J >= j0) & (J <= j1)
    inside = (I > i0) & (I < i1) & (J > j0) & (J < j1)
    ring = on_box & ~inside
    interior = pos[np.flatnonzero(inside)]
    boundary = pos[np.flatnonzero(ring)]
    exterior = pos[np.flatnonzero(~on_box & ~outer)]
    H = H_full[np.ix_(keep, keep)]
    bidx = np.flatnonzero(ring)
    split = (H_in[np.ix_(bidx, bidx)], H_out[np.ix_(bidx, bidx)])
    return PartitionedHermitian(H, Partition(interior, boundary, exterior),
                                boundary_split=split,
                                name=f"{coeffs.source}-{nx}x{ny}-coupled")


def build(grid, preset_name="laplacian", a0=0.0):
    return assemble(grid, preset(preset_name, grid, a0))


def green_identity_residual(model, u, v):
    """Normalized residual of the discrete Green identity.

    ``<(Hu)_I, v_I> - <u_I, (Hv)_I> - <u_B, (Hv)_B> + <(Hu)_B, v_B>``
    divided by ``||u|| ||v|| ||H||``.  Vectors live on I u B (the exterior,
    if any, is ignored).  Inner products are linear in the second argument.
    """
    p = model.partition
    idx = np.concatenate([p.interior, p.boundary])
    u = np.asarray(u, dtype=complex).ravel()
    v = np.asarray(v, dtype=complex).ravel()
    nI = p.interior.size
    Hs = model.H[np.ix_(idx, idx)]
    Hu, Hv = Hs @ u, Hs @ v
    r = (np.vdot(Hu[:nI], v[:nI]) - np.vdot(u[:nI], Hv[:nI])
         - np.vdot(u[nI:], Hv[nI:]) + np.vdot(Hu[nI:], v[nI:]))
    scale = np.linalg.norm(u) * np.linalg.norm(v) * model.norm
    return float(abs(r) / scale) if scale > 0 else 0.0


def conormal_trace(model, u):
    """Discrete conormal derivative ``(Hu)_B = H_BI u_I + H_BB u_B``.

    `u` is ordered as ``[u_I, u_B]``.
    """
    u = np.asarray(u).ravel()
    nI = model.n_interior
    return model.H_BI @ u[:nI] + model.H_BB @ u[nI:]
