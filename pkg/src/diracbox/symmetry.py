"""Quarter-turn symmetry of the constrained spinor space.

The map

    (R u)(x1, x2) = (i * u1(-x2, x1), u2(-x2, x1))

rotates the square by 90 degrees while twisting the first spinor component
by ``i``; it preserves the infinite-mass boundary constraint exactly (the
edge factors transform into one another consistently), so on the even grid
it acts on reduced coordinates as an exact permutation-with-phase sparse
matrix.  Its fourth power is the identity, it is an isometry of the mass
inner product, and it commutes with the square form, which makes the
eigenspaces of the square classifiable by an eigenvalue of ``R`` in
``{1, -1, i, -i}``; rectangles retain the half-turn ``R^2`` with classes
``{1, -1}``.  Any field with ``R psi = omega psi``, |omega| = 1, has equal
axis gradient norms and equal boundary trace norms, which is what
``verify_norm_identities`` measures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ClusterResolutionError
from .formgrid import (
    CORNER,
    ConstraintMap,
    FormMatrices,
    SpinorField,
    build_grid,
    constraint_map,
    norm_parts,
    quotient,
    random_field,
    reconstruct,
)

__all__ = [
    "RotationMap",
    "SymmetryClass",
    "rotation_map",
    "rotate",
    "symmetrize",
    "rotation_deviation",
    "commutation_check",
    "classify_symmetry",
    "verify_norm_identities",
    "separability_residual",
]

FOURTH_ROOTS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


@dataclass(frozen=True)
class RotationMap:
    """Reduced-coordinate action of the quarter turn on an even grid."""

    n: int
    matrix: sp.csr_matrix
    half_turn: sp.csr_matrix   # matrix @ matrix, cached

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ values


_ROTATIONS: dict[int, RotationMap] = {}


def _build_rotation(cmap: ConstraintMap) -> RotationMap:
    n = cmap.n
    rows, cols, data = [], [], []
    for i in range(n + 1):
        for j in range(n + 1):
            if cmap.node_class[i, j] == CORNER:
                continue
            si, sj = n - j, i   # value at (i, j) comes from this source node
            k1, s1 = cmap.free1[i, j], cmap.free1[si, sj]
            rows.append(k1); cols.append(s1); data.append(1.0j)
            k2, s2 = cmap.free2[i, j], cmap.free2[si, sj]
            if k2 >= 0:
                rows.append(k2); cols.append(s2); data.append(1.0 + 0.0j)
    mat = sp.csr_matrix((np.asarray(data), (rows, cols)),
                        shape=(cmap.ndof, cmap.ndof))

    # One-time self-test: the boundary classes must map onto one another so
    # that the permutation-with-phase action is a bijection with R^4 = I.
    ident = sp.identity(cmap.ndof, dtype=complex, format="csr")
    fourth = mat @ mat @ mat @ mat
    dev = fourth - ident
    if dev.nnz and abs(dev).max() != 0.0:
        raise AssertionError("quarter-turn action is not of order four")
    return RotationMap(n=n, matrix=mat, half_turn=(mat @ mat).tocsr())


def rotation_map(n: int) -> RotationMap:
    """Cached quarter-turn action for grid size n."""
    if n not in _ROTATIONS:
        _ROTATIONS[n] = _build_rotation(constraint_map(n))
    return _ROTATIONS[n]


def rotate(psi: SpinorField) -> SpinorField:
    """Apply the quarter turn; exact permutation plus phase."""
    return SpinorField(rotation_map(psi.n).apply(psi.values), psi.n)


def symmetrize(psi: SpinorField, alpha: complex = 1.0 + 0.0j) -> SpinorField:
    """Project onto the alpha-eigenspace of the quarter turn.

    Averages ``conj(alpha)^k R^k psi`` over k = 0..3; the result satisfies
    ``R psi = alpha psi`` exactly up to rounding in the sums.
    """
    rot = rotation_map(psi.n)
    acc = psi.values.copy()
    cur = psi.values
    phase = 1.0 + 0.0j
    for _ in range(3):
        cur = rot.apply(cur)
        phase *= np.conj(alpha)
        acc += phase * cur
    return SpinorField(acc / 4.0, psi.n)


def _m_norm(fm: FormMatrices, values: np.ndarray) -> float:
    return float(np.sqrt(abs(np.real(np.vdot(values, fm.M @ values)))))


def rotation_deviation(fm: FormMatrices, psi: SpinorField):
    """Best unit factor alpha and the relative M-norm of R psi - alpha psi."""
    w = rotation_map(psi.n).apply(psi.values)
    nrm2 = np.real(np.vdot(psi.values, fm.M @ psi.values))
    alpha = complex(np.vdot(psi.values, fm.M @ w) / nrm2)
    if alpha != 0.0:
        alpha /= abs(alpha)
    dev = _m_norm(fm, w - alpha * psi.values) / np.sqrt(nrm2)
    return alpha, float(dev)


def commutation_check(fm: FormMatrices, a: float, m: float,
                      batch: int = 8, seed: int = 0) -> float:
    """Max relative quotient change under rotation for the square form.

    Exactly zero in exact arithmetic for b = a; returns the observed
    rounding-level deviation over a batch of seeded random fields.
    """
    worst = 0.0
    for i in range(batch):
        psi = random_field(build_grid(fm.n), seed=seed + i)
        q0 = quotient(fm, a, a, m, psi)
        q1 = quotient(fm, a, a, m, rotate(psi))
        worst = max(worst, abs(q0 - q1) / abs(q0))
    return worst


@dataclass(frozen=True)
class SymmetryClass:
    """One symmetry eigenvalue with a certified representative."""

    alpha: complex
    field: SpinorField
    deviation: float


def classify_symmetry(fm: FormMatrices, pairs, square: bool = True):
    """Classify an eigenvalue cluster by the (half-) quarter-turn action.

    ``pairs`` is a list of ``(mu, psi)`` forming one numerically resolved
    cluster with M-orthonormal eigenvectors.  Builds the matrix of ``R``
    (or ``R^2`` when ``square`` is false) on the span, diagonalises it and
    returns one certified representative per symmetry eigenvalue, sorted
    by complex angle.  Raises ClusterResolutionError when the span is not
    invariant to tolerance, or the spectrum strays from the allowed roots
    of unity.
    """
    if not pairs:
        raise ValueError("empty cluster")
    mus = np.array([mu for mu, _ in pairs], dtype=float)
    spread = (mus.max() - mus.min()) / max(abs(mus.max()), 1e-300)
    if spread > 1e-8:
        raise ClusterResolutionError(
            f"eigenvalues do not form a cluster: relative spread {spread:.3e}")

    n = pairs[0][1].n if isinstance(pairs[0][1], SpinorField) else None
    vecs = [p.values if isinstance(p, SpinorField) else np.asarray(p)
            for _, p in pairs]
    v = np.column_stack(vecs)
    rot = rotation_map(n)
    op = rot.matrix if square else rot.half_turn
    allowed = FOURTH_ROOTS if square else (1.0 + 0.0j, -1.0 + 0.0j)

    w = op @ v
    mv = fm.M @ v
    gram = v.conj().T @ mv
    coeff = np.linalg.solve(gram, v.conj().T @ (fm.M @ w))
    resid = w - v @ coeff
    for k in range(resid.shape[1]):
        rel = _m_norm(fm, resid[:, k]) / _m_norm(fm, w[:, k])
        if rel > 1e-6:
            raise ClusterResolutionError(
                f"cluster is not rotation-invariant: member {k} leaks "
                f"{rel:.3e} outside the span; increase k or tighten tol")

    alphas, cvecs = np.linalg.eig(coeff)
    out = []
    for idx in np.argsort(np.angle(alphas)):
        alpha = complex(alphas[idx])
        if min(abs(alpha - t) for t in allowed) > 1e-6:
            raise ClusterResolutionError(
                f"symmetry eigenvalue {alpha!r} is not an allowed root of unity")
        rep = v @ cvecs[:, idx]
        rep = rep / _m_norm(fm, rep)
        dev = _m_norm(fm, (op @ rep) - alpha * rep)
        if dev > 1e-6:
            raise ClusterResolutionError(
                f"representative for alpha={alpha!r} deviates by {dev:.3e}")
        out.append(SymmetryClass(alpha=alpha, field=SpinorField(rep, n),
                                 deviation=float(dev)))
    return out


def verify_norm_identities(psi: SpinorField, fm: FormMatrices):
    """Relative mismatch of the axis gradient norms and of the trace norms."""
    g1, g2, mass, t1, t2 = norm_parts(fm, psi)
    scale = np.sqrt(mass)

    def rel(p, q):
        p, q = np.sqrt(max(p, 0.0)), np.sqrt(max(q, 0.0))
        top = max(p, q)
        if top <= 1e-14 * scale:
            return 0.0
        return abs(p - q) / top

    return rel(g1, g2), rel(t1, t2)


def separability_residual(psi: SpinorField):
    """Singular-value ratio sigma_2/sigma_1 of each nodal component matrix.

    A separable (rank-one) component gives zero; ``None`` marks a component
    that vanishes identically.
    """
    u1, u2 = reconstruct(psi)
    out = []
    scale = max(np.abs(u1).max(), np.abs(u2).max(), 1e-300)
    for comp in (u1, u2):
        s = np.linalg.svd(comp, compute_uv=False)
        if s[0] <= 1e-14 * scale:
            out.append(None)
        else:
            out.append(float(s[1] / s[0]))
    return tuple(out)
