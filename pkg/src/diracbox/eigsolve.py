"""Smallest-eigenpair solver for the Hermitian pencil and the lambda_1 driver.

The generalized problem ``Q psi = mu M psi`` with Hermitian positive-definite
``Q`` and ``M`` is solved by shift-invert Lanczos (ARPACK) around zero, with
a deterministic seeded start vector; problems of reduced dimension at most
``DENSE_LIMIT`` go through the dense LAPACK path instead, which doubles as a
cross-check oracle in the tests.

``lambda1_2d`` evaluates the rectangle eigenvalue through the mass-shifted
pencil: the ``m^2 M`` term of the squared form is an exact spectral shift of
the same pencil, so it is dropped before the solve and ``m^2`` is added back
to the eigenvalue.  This keeps the relative gaps at the bottom of the
spectrum of order one even for heavy masses, where the unshifted spectrum
clusters around ``m^2`` and shift-invert iteration stalls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConsistencyError, SolverError
from .formgrid import FormMatrices, SpinorField, assemble, build_grid, _check_weights

__all__ = ["EigenResult", "RefineStudy", "smallest_eigenpair", "lambda1_2d",
           "refine_study", "DENSE_LIMIT"]

DENSE_LIMIT = 2000


@dataclass(frozen=True)
class EigenResult:
    """Smallest eigenvalue of the weighted form and its eigenvector.

    ``mu`` is the discrete lambda_1^2, ``residual`` the M^-1-norm of
    ``Q psi - mu M psi`` and ``iterations`` the number of shifted-operator
    applications (0 on the dense path).
    """

    mu: float
    lambda1: float
    psi: SpinorField
    residual: float
    iterations: int
    n: int
    seed: int
    eigenvalues: tuple    # k lowest, for multiplicity evidence


@dataclass(frozen=True)
class RefineStudy:
    a: float
    b: float
    m: float
    entries: tuple        # ((n, mu), ...)
    extrapolated: float
    observed_order: float | None

    @property
    def lambda1(self) -> float:
        return float(np.sqrt(self.extrapolated))


@dataclass(frozen=True)
class _PencilSolution:
    mus: np.ndarray
    vectors: np.ndarray       # columns, M-orthonormal
    residuals: np.ndarray     # M^-1 norms
    iterations: int


def _check_pencil(q, m):
    if q.shape != m.shape or q.shape[0] != q.shape[1]:
        raise ValueError("matrices must be square and of equal shape")
    for name, mat in (("Q", q), ("M", m)):
        if sp.issparse(mat):
            anti = abs(mat - mat.getH())
            dev = anti.max() if anti.nnz else 0.0
        else:
            mat = np.asarray(mat)
            dev = np.abs(mat - mat.conj().T).max()
        scale = abs(mat).max()
        if dev > 1e-12 * max(scale, 1e-300):
            raise ValueError(f"{name} is not Hermitian (deviation {dev:.3e})")
    diag = m.diagonal()
    if np.any(diag.real <= 0.0):
        raise ValueError("M is not positive definite (non-positive diagonal)")


def _solve_pencil(q, m, k: int, tol: float, maxit: int, seed: int) -> _PencilSolution:
    _check_pencil(q, m)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    dim = q.shape[0]
    if k > dim:
        raise ValueError(f"k={k} exceeds dimension {dim}")

    if dim <= DENSE_LIMIT or k >= dim - 1:
        qd = q.toarray() if sp.issparse(q) else np.asarray(q, dtype=complex)
        md = m.toarray() if sp.issparse(m) else np.asarray(m, dtype=complex)
        try:
            sla.cholesky(md)
        except sla.LinAlgError as exc:
            raise ValueError("M is not positive definite") from exc
        w, v = sla.eigh(qd, md, subset_by_index=[0, k - 1])
        iterations = 0
    else:
        qc = sp.csc_matrix(q)
        mc = sp.csc_matrix(m)
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        lu = spla.splu(qc)
        count = [0]

        def apply_inverse(x):
            count[0] += 1
            return lu.solve(x)

        opinv = spla.LinearOperator((dim, dim), matvec=apply_inverse, dtype=complex)
        try:
            # ARPACK tolerance 0 converges the transformed problem to
            # machine precision; the residual contract is enforced below.
            w, v = spla.eigsh(qc, k=k, M=mc, sigma=0.0, which="LM", v0=v0,
                              maxiter=maxit, tol=0.0, OPinv=opinv)
        except spla.ArpackNoConvergence as exc:
            best_mu = (float(np.real(exc.eigenvalues[0]))
                       if len(exc.eigenvalues) else None)
            raise SolverError(
                f"eigensolver did not converge within {maxit} restarts",
                best_mu=best_mu, iterations=count[0]) from exc
        iterations = count[0]

    order = np.argsort(w)
    w = np.asarray(w, dtype=float)[order]
    v = np.asarray(v, dtype=complex)[:, order]

    # Deterministic M-orthonormalisation (Cholesky of the Gram matrix keeps
    # the ascending ordering and is a no-op up to rounding for converged
    # eigenvectors).
    gram = v.conj().T @ (m @ v)
    chol = sla.cholesky(gram, lower=True)
    v = sla.solve_triangular(chol, v.conj().T, lower=True).conj().T
    mus = np.real(np.einsum("ij,ij->j", v.conj(), q @ v))

    if sp.issparse(m):
        mlu = spla.splu(sp.csc_matrix(m))
        msolve = mlu.solve
    else:
        cho = sla.cho_factor(np.asarray(m, dtype=complex))
        msolve = lambda x: sla.cho_solve(cho, x)
    residuals = np.empty(k)
    for i in range(k):
        r = q @ v[:, i] - mus[i] * (m @ v[:, i])
        residuals[i] = np.sqrt(abs(np.real(np.vdot(r, msolve(r)))))
    bad = residuals > tol * np.maximum(np.abs(mus), 1e-300)
    if np.any(bad):
        i = int(np.argmax(residuals / np.maximum(np.abs(mus), 1e-300)))
        raise SolverError(
            f"residual contract violated: pair {i} has residual "
            f"{residuals[i]:.3e} > tol*mu = {tol * abs(mus[i]):.3e}",
            best_mu=float(mus[0]), residual=float(residuals[i]),
            iterations=iterations)
    return _PencilSolution(mus=mus, vectors=v, residuals=residuals,
                           iterations=iterations)


def smallest_eigenpair(Q, M, k: int = 1, tol: float = 1e-10,
                       maxit: int = 500, seed: int = 0):
    """k smallest eigenpairs of the Hermitian pencil (Q, M), ascending.

    Eigenvectors are M-orthonormal; each pair satisfies the residual
    contract ``|Q v - mu M v|_{M^-1} <= tol * mu``.  Deterministic for a
    fixed seed.
    """
    sol = _solve_pencil(Q, M, k, tol, maxit, seed)
    return [(float(sol.mus[i]), sol.vectors[:, i]) for i in range(k)]


def shifted_form(fm: FormMatrices, a: float, b: float, m: float) -> sp.csr_matrix:
    """Weighted form matrix without the m^2 mass term."""
    a, b, m = _check_weights(a, b, m)
    q = fm.K1 / a**2 + fm.K2 / b**2
    if m > 0.0:
        q = q + (m / a) * fm.Tpar + (m / b) * fm.Teq
    return sp.csr_matrix(q)


def lambda1_2d(a: float, b: float, m: float, n: int, tol: float = 1e-10,
               *, k: int = 4, seed: int = 0, maxit: int = 500,
               fm: FormMatrices | None = None) -> EigenResult:
    """Discrete lowest positive Dirac eigenvalue on the (a, b) rectangle.

    Conforming, so ``mu`` over-estimates the continuum lambda_1(a,b)^2.
    ``k`` defaults to 4 so a possibly degenerate lowest eigenspace is
    visible to the symmetry analysis.
    """
    a, b, m = _check_weights(a, b, m)
    if fm is None:
        fm = assemble(build_grid(n))
    elif fm.n != n:
        raise ValueError(f"supplied matrices are for n={fm.n}, requested n={n}")
    k = min(k, fm.ndof)
    qs = shifted_form(fm, a, b, m)
    sol = _solve_pencil(qs, fm.M, k, tol, maxit, seed)
    mu_shifted = float(sol.mus[0])
    if mu_shifted <= 0.0:
        raise ConsistencyError(
            f"shifted eigenvalue must be positive, got {mu_shifted!r}")
    mu = mu_shifted + m**2
    return EigenResult(
        mu=mu,
        lambda1=float(np.sqrt(mu)),
        psi=SpinorField(sol.vectors[:, 0], n),
        residual=float(sol.residuals[0]),
        iterations=sol.iterations,
        n=n,
        seed=seed,
        eigenvalues=tuple(float(x) + m**2 for x in sol.mus),
    )


def refine_study(a: float, b: float, m: float, n_list, tol: float = 1e-10,
                 *, seed: int = 0, fm_by_n=None) -> RefineStudy:
    """Eigenvalue refinement over nested grids with Richardson extrapolation.

    ``n_list`` must be strictly increasing with each entry dividing the
    next (nested bilinear spaces), which makes the sequence of discrete
    eigenvalues non-increasing.
    """
    n_list = [int(n) for n in n_list]
    if len(n_list) < 2:
        raise ValueError("need at least two grid sizes")
    for prev, nxt in zip(n_list, n_list[1:]):
        if nxt <= prev or nxt % prev != 0:
            raise ValueError(
                f"grid list must be strictly increasing and nested, got {n_list}")

    entries = []
    for n in n_list:
        fm = fm_by_n.get(n) if fm_by_n else None
        res = lambda1_2d(a, b, m, n, tol, seed=seed, fm=fm)
        entries.append((n, res.mu))
    for (_, prev), (ncur, cur) in zip(entries, entries[1:]):
        if cur > prev + 1e-12 * max(1.0, abs(prev)):
            raise ConsistencyError(
                f"refinement increased the eigenvalue at n={ncur}: "
                f"{prev!r} -> {cur!r}")

    extrapolated, order = _richardson(entries)
    return RefineStudy(a=a, b=b, m=m, entries=tuple(entries),
                       extrapolated=extrapolated, observed_order=order)


def _richardson(entries):
    (n1, mu1), (n2, mu2), (n3, mu3) = entries[-3:] if len(entries) >= 3 else \
        ((None, None), *entries[-2:])
    if n1 is None or n3 // n2 != n2 // n1 or n2 % n1 or n3 % n2:
        return entries[-1][1], None
    r = n2 / n1
    e1, e2 = mu1 - mu2, mu2 - mu3
    if e2 <= 0.0 or e1 <= 0.0:
        # converged to rounding level; the finest value is the estimate
        return entries[-1][1], None
    order = float(np.log(e1 / e2) / np.log(r))
    extrapolated = mu3 - e2 / (r**order - 1.0)
    return float(extrapolated), order
