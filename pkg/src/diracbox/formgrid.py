"""Conforming tensor-grid discretisation of the squared Dirac form.

Everything lives on the reference square ``(-1/2, 1/2)^2``.  A spinor field
has two complex components ``(u1, u2)`` sampled at the nodes of a uniform
``n x n`` cell grid and interpolated with tensor-product piecewise-linear
(bilinear) elements.  The infinite-mass boundary condition couples the
components along each boundary edge,

    u2 = omega * u1,   omega(top) = -1, omega(bottom) = +1,
                       omega(right) = +i, omega(left) = -i,

and is eliminated from the degrees of freedom: interior nodes keep both
components, boundary edge nodes keep only ``u1``, and corner nodes (where
the two adjacent constraints are jointly satisfiable only by zero) carry no
degrees of freedom.  Because the constraint factors are constant per edge
and traces of bilinear functions are piecewise linear along edges, every
reduced vector reconstructs to a field satisfying the boundary condition
exactly, so the discrete space is a subspace of the true form domain and
discrete minima over-estimate the continuum ones.

The five matrices assembled here realise the weighted squared-operator form

    |H_{a,b} psi|^2 = a^-2 psi*K1 psi + b^-2 psi*K2 psi + m^2 psi*M psi
                      + (m/a) psi*Tpar psi + (m/b) psi*Teq psi,

with ``Tpar``/``Teq`` the trace mass matrices of the vertical/horizontal
boundary pieces.  All element integrals are exact closed forms; the scalar
weights ``(a, b, m)`` enter only at evaluation time, so one assembly serves
every parameter point.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Grid",
    "ConstraintMap",
    "FormMatrices",
    "FormMatrices1D",
    "SpinorField",
    "build_grid",
    "constraint_map",
    "assemble",
    "assemble_1d",
    "form_matrix",
    "quotient",
    "norm_parts",
    "trial_dirichlet",
    "random_field",
    "reconstruct",
    "reduce_field",
    "prolong",
    "save_form_matrices",
    "load_form_matrices",
]

# Node classes.
INTERIOR = 0
TOP = 1
BOTTOM = 2
LEFT = 3
RIGHT = 4
CORNER = 5

# Boundary constraint factor u2 = omega * u1 per edge class, from
# u2 = i*(n1 + i*n2)*u1 with the outward unit normal (n1, n2).
OMEGA = {TOP: -1.0 + 0.0j, BOTTOM: 1.0 + 0.0j, RIGHT: 1.0j, LEFT: -1.0j}


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on the reference square, n cells per axis."""

    n: int

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def nodes(self) -> np.ndarray:
        return -0.5 + np.arange(self.n + 1) / self.n


def build_grid(n: int) -> Grid:
    """Validated grid; n must be an even integer >= 4.

    Evenness keeps the node set invariant under the quarter-turn and
    x -> -x maps used by the symmetry analysis.
    """
    if int(n) != n or n < 4 or n % 2 != 0:
        raise ValueError(f"grid size must be an even integer >= 4, got {n!r}")
    return Grid(int(n))


@dataclass(frozen=True)
class ConstraintMap:
    """Bookkeeping for the eliminated boundary constraint.

    ``free1``/``free2`` hold the reduced index of each node's u1/u2 degree
    of freedom (-1 where eliminated).  ``basis1``/``basis2`` map reduced
    vectors to full nodal component values; conjugate-transposing them maps
    full matrices to reduced ones.
    """

    n: int
    node_class: np.ndarray      # (n+1, n+1) int
    omega: np.ndarray           # (n+1, n+1) complex, 0 at corners/interior
    free1: np.ndarray           # (n+1, n+1) int, -1 if eliminated
    free2: np.ndarray           # (n+1, n+1) int, -1 if eliminated
    ndof: int
    basis1: sp.csr_matrix = field(repr=False)
    basis2: sp.csr_matrix = field(repr=False)


def _classify_nodes(n: int) -> np.ndarray:
    cls = np.full((n + 1, n + 1), INTERIOR, dtype=np.int8)
    cls[:, n] = TOP
    cls[:, 0] = BOTTOM
    cls[0, :] = LEFT
    cls[n, :] = RIGHT
    for i, j in ((0, 0), (0, n), (n, 0), (n, n)):
        cls[i, j] = CORNER
    return cls


@lru_cache(maxsize=None)
def constraint_map(n: int) -> ConstraintMap:
    """Constraint bookkeeping for an even n-cell grid (cached per n)."""
    build_grid(n)
    cls = _classify_nodes(n)
    omega = np.zeros((n + 1, n + 1), dtype=complex)
    for c, w in OMEGA.items():
        omega[cls == c] = w

    free1 = -np.ones((n + 1, n + 1), dtype=np.int64)
    free2 = -np.ones((n + 1, n + 1), dtype=np.int64)
    k = 0
    # Node-major ordering keeps the reduced matrices banded.
    for i in range(n + 1):
        for j in range(n + 1):
            c = cls[i, j]
            if c == CORNER:
                continue
            free1[i, j] = k
            k += 1
            if c == INTERIOR:
                free2[i, j] = k
                k += 1
    ndof = k
    assert ndof == 2 * (n - 1) ** 2 + 4 * (n - 1)

    nn = (n + 1) * (n + 1)
    node_index = np.arange(nn).reshape(n + 1, n + 1)

    mask1 = free1 >= 0
    rows1 = node_index[mask1]
    cols1 = free1[mask1]
    data1 = np.ones(rows1.size, dtype=complex)
    basis1 = sp.csr_matrix((data1, (rows1, cols1)), shape=(nn, ndof))

    mask_int = free2 >= 0
    rows2 = np.concatenate([node_index[mask_int], node_index[~mask_int & mask1]])
    cols2 = np.concatenate([free2[mask_int], free1[~mask_int & mask1]])
    data2 = np.concatenate(
        [np.ones(mask_int.sum(), dtype=complex), omega[~mask_int & mask1]]
    )
    basis2 = sp.csr_matrix((data2, (rows2, cols2)), shape=(nn, ndof))

    return ConstraintMap(
        n=n, node_class=cls, omega=omega, free1=free1, free2=free2,
        ndof=ndof, basis1=basis1, basis2=basis2,
    )


@dataclass(frozen=True)
class SpinorField:
    """Complex reduced-coordinate nodal vector on an n-cell grid."""

    values: np.ndarray
    n: int

    def copy(self) -> "SpinorField":
        return SpinorField(self.values.copy(), self.n)


@dataclass(frozen=True)
class FormMatrices:
    """The five reduced Hermitian matrices of the squared form."""

    n: int
    K1: sp.csr_matrix = field(repr=False)
    K2: sp.csr_matrix = field(repr=False)
    M: sp.csr_matrix = field(repr=False)
    Tpar: sp.csr_matrix = field(repr=False)
    Teq: sp.csr_matrix = field(repr=False)

    @property
    def ndof(self) -> int:
        return self.M.shape[0]

    @property
    def cmap(self) -> ConstraintMap:
        return constraint_map(self.n)


@dataclass(frozen=True)
class FormMatrices1D:
    """1D analogue: interval stiffness, mass and endpoint trace."""

    n: int
    K: sp.csr_matrix = field(repr=False)
    M: sp.csr_matrix = field(repr=False)
    T: sp.csr_matrix = field(repr=False)

    @property
    def ndof(self) -> int:
        return self.M.shape[0]


def _matrices_1d(n: int):
    """Exact P1 mass/stiffness/endpoint-trace matrices on n unit-span cells.

    The interval is (-1/2, 1/2), h = 1/n:
      mass      tridiag(h/6, 2h/3, h/6), halved diagonal at the ends,
      stiffness tridiag(-1/h, 2/h, -1/h), halved diagonal at the ends,
      trace     selector of the two endpoint nodes.
    """
    h = 1.0 / n
    main_m = np.full(n + 1, 2.0 * h / 3.0)
    main_m[0] = main_m[-1] = h / 3.0
    off_m = np.full(n, h / 6.0)
    mass = sp.diags_array([off_m, main_m, off_m], offsets=[-1, 0, 1])

    main_k = np.full(n + 1, 2.0 / h)
    main_k[0] = main_k[-1] = 1.0 / h
    off_k = np.full(n, -1.0 / h)
    stiff = sp.diags_array([off_k, main_k, off_k], offsets=[-1, 0, 1])

    sel = np.zeros(n + 1)
    sel[0] = sel[-1] = 1.0
    trace = sp.diags_array([sel], offsets=[0])
    return sp.csr_matrix(stiff), sp.csr_matrix(mass), sp.csr_matrix(trace)


def _hermitize(a: sp.spmatrix) -> sp.csr_matrix:
    out = (a + a.conjugate().transpose()) * 0.5
    out = sp.csr_matrix(out)
    out.eliminate_zeros()
    out.sort_indices()
    return out


def _reduce(full: sp.spmatrix, cmap: ConstraintMap) -> sp.csr_matrix:
    """Project a per-component scalar matrix to reduced spinor coordinates."""
    b1, b2 = cmap.basis1, cmap.basis2
    red = (b1.getH() @ full @ b1) + (b2.getH() @ full @ b2)
    return _hermitize(red)


def assemble(grid: Grid) -> FormMatrices:
    """Assemble the five reduced matrices for one grid.

    Scalar 2D matrices are tensor (Kronecker) products of the exact 1D
    element matrices; the trace matrices pair an endpoint selector along
    the constrained axis with the 1D mass matrix along the edge.
    """
    n = grid.n
    cmap = constraint_map(n)
    k1d, m1d, t1d = _matrices_1d(n)

    kx = sp.kron(k1d, m1d, format="csr")
    ky = sp.kron(m1d, k1d, format="csr")
    mm = sp.kron(m1d, m1d, format="csr")
    tv = sp.kron(t1d, m1d, format="csr")   # x1 = +-1/2, vertical pieces
    th = sp.kron(m1d, t1d, format="csr")   # x2 = +-1/2, horizontal pieces

    return FormMatrices(
        n=n,
        K1=_reduce(kx, cmap),
        K2=_reduce(ky, cmap),
        M=_reduce(mm, cmap),
        Tpar=_reduce(tv, cmap),
        Teq=_reduce(th, cmap),
    )


def assemble_1d(n: int) -> FormMatrices1D:
    """1D spinor problem with endpoint constraints phi2 = +-i phi1 eliminated.

    Reduced layout: one dof per endpoint, two per interior node, node-major.
    """
    build_grid(n)
    k1d, m1d, t1d = _matrices_1d(n)
    npts = n + 1
    ndof = 2 * (n - 1) + 2

    rows1, cols1, data1 = [], [], []
    rows2, cols2, data2 = [], [], []
    k = 0
    for p in range(npts):
        if p == 0 or p == n:
            w = -1.0j if p == 0 else 1.0j
            rows1.append(p); cols1.append(k); data1.append(1.0)
            rows2.append(p); cols2.append(k); data2.append(w)
            k += 1
        else:
            rows1.append(p); cols1.append(k); data1.append(1.0)
            k += 1
            rows2.append(p); cols2.append(k); data2.append(1.0)
            k += 1
    assert k == ndof
    b1 = sp.csr_matrix((np.asarray(data1, dtype=complex), (rows1, cols1)),
                       shape=(npts, ndof))
    b2 = sp.csr_matrix((np.asarray(data2, dtype=complex), (rows2, cols2)),
                       shape=(npts, ndof))

    def red(a):
        return _hermitize((b1.getH() @ a @ b1) + (b2.getH() @ a @ b2))

    return FormMatrices1D(n=n, K=red(k1d), M=red(m1d), T=red(t1d))


def _check_weights(a: float, b: float, m: float):
    a, b, m = float(a), float(b), float(m)
    if not (np.isfinite(a) and a > 0.0) or not (np.isfinite(b) and b > 0.0):
        raise ValueError(f"side lengths must be finite and > 0, got {a!r}, {b!r}")
    if not np.isfinite(m) or m < 0.0:
        raise ValueError(f"mass must be finite and >= 0, got {m!r}")
    return a, b, m


def form_matrix(fm: FormMatrices, a: float, b: float, m: float) -> sp.csr_matrix:
    """Weighted form matrix a^-2 K1 + b^-2 K2 + m^2 M + (m/a) Tpar + (m/b) Teq."""
    a, b, m = _check_weights(a, b, m)
    q = fm.K1 / a**2 + fm.K2 / b**2
    if m > 0.0:
        q = q + m**2 * fm.M + (m / a) * fm.Tpar + (m / b) * fm.Teq
    return sp.csr_matrix(q)


def norm_parts(fm: FormMatrices, psi: SpinorField):
    """Squared norms (|d1 psi|^2, |d2 psi|^2, |psi|^2, |trace_par|^2, |trace_eq|^2)."""
    v = psi.values
    def quad(mat):
        return float(np.real(np.vdot(v, mat @ v)))
    return (quad(fm.K1), quad(fm.K2), quad(fm.M), quad(fm.Tpar), quad(fm.Teq))


def quotient(fm: FormMatrices, a: float, b: float, m: float,
             psi: SpinorField) -> float:
    """Rayleigh quotient of the weighted form against the mass matrix."""
    a, b, m = _check_weights(a, b, m)
    g1, g2, mass, t1, t2 = norm_parts(fm, psi)
    if mass <= 0.0:
        raise ValueError("quotient of a zero field is undefined")
    num = g1 / a**2 + g2 / b**2 + m**2 * mass + (m / a) * t1 + (m / b) * t2
    return num / mass


def trial_dirichlet(grid: Grid) -> SpinorField:
    """Nodal interpolant of cos(pi x1) cos(pi x2) * (1, 0).

    Boundary degrees of freedom are left exactly zero, so the field
    vanishes on the whole boundary and satisfies the constraint trivially.
    """
    cmap = constraint_map(grid.n)
    x = grid.nodes
    profile = np.cos(np.pi * x)[:, None] * np.cos(np.pi * x)[None, :]
    vals = np.zeros(cmap.ndof, dtype=complex)
    mask = (cmap.node_class == INTERIOR)
    vals[cmap.free1[mask]] = profile[mask]
    return SpinorField(vals, grid.n)


def random_field(grid: Grid, seed: int = 0) -> SpinorField:
    """Seeded complex standard-normal reduced field."""
    cmap = constraint_map(grid.n)
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(cmap.ndof) + 1j * rng.standard_normal(cmap.ndof)
    return SpinorField(vals, grid.n)


def reconstruct(psi: SpinorField, cmap: ConstraintMap | None = None):
    """Full nodal component arrays (U1, U2), each (n+1, n+1)."""
    cmap = cmap or constraint_map(psi.n)
    npts = cmap.n + 1
    u1 = np.asarray((cmap.basis1 @ psi.values)).reshape(npts, npts)
    u2 = np.asarray((cmap.basis2 @ psi.values)).reshape(npts, npts)
    return u1, u2


def reduce_field(u1: np.ndarray, u2: np.ndarray, cmap: ConstraintMap,
                 check: bool = True, rtol: float = 1e-10) -> SpinorField:
    """Reduced vector from full nodal values.

    With ``check`` on, verifies that the data satisfies the boundary
    constraint and vanishes at corners, up to ``rtol`` times the field scale.
    """
    vals = np.zeros(cmap.ndof, dtype=complex)
    mask1 = cmap.free1 >= 0
    mask2 = cmap.free2 >= 0
    vals[cmap.free1[mask1]] = u1[mask1]
    vals[cmap.free2[mask2]] = u2[mask2]
    if check:
        scale = max(np.abs(u1).max(), np.abs(u2).max(), 1e-300)
        edge = mask1 & ~mask2
        dev = np.abs(u2[edge] - cmap.omega[edge] * u1[edge]).max(initial=0.0)
        corner = cmap.node_class == CORNER
        dev = max(dev, np.abs(u1[corner]).max(initial=0.0),
                  np.abs(u2[corner]).max(initial=0.0))
        if dev > rtol * scale:
            raise ValueError(
                f"nodal data violates the boundary constraint: "
                f"deviation {dev:.3e} vs scale {scale:.3e}")
    return SpinorField(vals, cmap.n)


def prolong(psi: SpinorField, n_to: int) -> SpinorField:
    """Bilinear injection onto a dyadically finer grid (n_to = 2 * n).

    The interpolant is the same function, so every quadratic form value is
    preserved up to rounding.
    """
    n = psi.n
    if n_to != 2 * n:
        raise ValueError(f"prolongation requires n_to == 2n, got {n} -> {n_to}")
    u1, u2 = reconstruct(psi)

    def up(u):
        fine = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)
        fine[::2, ::2] = u
        fine[1::2, ::2] = 0.5 * (u[:-1, :] + u[1:, :])
        fine[::2, 1::2] = 0.5 * (u[:, :-1] + u[:, 1:])
        fine[1::2, 1::2] = 0.25 * (u[:-1, :-1] + u[1:, :-1]
                                   + u[:-1, 1:] + u[1:, 1:])
        return fine

    return reduce_field(up(u1), up(u2), constraint_map(n_to))


# ----------------------------------------------------------------------
# On-disk cache of assembled matrices: a documented binary triplet format.
#
#   header : 8 magic bytes b"DBXFMC1\n", uint32 n, uint64 reduced dimension
#   body   : for each of K1, K2, M, Tpar, Teq in that order:
#              uint64 nnz, then nnz records of
#              (uint32 row, uint32 col, float64 real, float64 imag)
#   all fields little-endian
# ----------------------------------------------------------------------

_MAGIC = b"DBXFMC1\n"
_TRIPLET = np.dtype([("row", "<u4"), ("col", "<u4"),
                     ("re", "<f8"), ("im", "<f8")])


def save_form_matrices(path, fm: FormMatrices) -> None:
    """Write an assembled FormMatrices to the binary triplet format."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQ", fm.n, fm.ndof))
        for mat in (fm.K1, fm.K2, fm.M, fm.Tpar, fm.Teq):
            coo = mat.tocoo()
            rec = np.empty(coo.nnz, dtype=_TRIPLET)
            rec["row"] = coo.row
            rec["col"] = coo.col
            rec["re"] = coo.data.real
            rec["im"] = coo.data.imag
            fh.write(struct.pack("<Q", coo.nnz))
            fh.write(rec.tobytes())


def load_form_matrices(path) -> FormMatrices:
    """Read matrices written by :func:`save_form_matrices`."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a form-matrix cache file")
        n, dim = struct.unpack("<IQ", fh.read(12))
        cmap = constraint_map(int(n))
        if dim != cmap.ndof:
            raise ValueError(
                f"{path}: dimension {dim} inconsistent with n={n}")
        mats = []
        for _ in range(5):
            (nnz,) = struct.unpack("<Q", fh.read(8))
            rec = np.frombuffer(fh.read(nnz * _TRIPLET.itemsize), dtype=_TRIPLET)
            if rec.size != nnz:
                raise ValueError(f"{path}: truncated matrix section")
            data = rec["re"] + 1j * rec["im"]
            mats.append(sp.csr_matrix(
                (data, (rec["row"], rec["col"])), shape=(dim, dim)))
    return FormMatrices(n=int(n), K1=mats[0], K2=mats[1], M=mats[2],
                        Tpar=mats[3], Teq=mats[4])
