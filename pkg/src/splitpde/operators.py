"""Discrete Dirichlet Laplacian, sine-mode propagators, and Crank-Nicolson.

The interior stencil L (second differences with zero extension beyond the
boundary) is diagonalized by the discrete sine basis, so e^{tL}, phi1(tL) and
the Crank-Nicolson resolvent are all available matrix-free.
"""

from __future__ import annotations

import numpy as np
import scipy.fft
import scipy.linalg
import scipy.sparse.linalg

from .grid import BoundaryValues, Field, Grid

CG_TOL = 1e-12


class DirichletLaplacian:
    """Centered second-order Laplacian on interior nodes, homogeneous Dirichlet.

    1D stencil (1, -2, 1)/h^2; 2D 5-point stencil (+1 neighbors, -4 center)/h^2.
    Eigenpairs: sine modes sin(k pi x) with lambda_k = -(4/h^2) sin^2(k pi h/2),
    tensor sums in 2D.

    ``fast_transforms=True`` uses the FFT-based DST; ``False`` uses a direct
    O(n^2) sine-sum product (any n, used to cross-check the fast path).
    Instances are immutable after construction and safe to share.
    """

    def __init__(self, grid: Grid, fast_transforms: bool = True):
        self.grid = grid
        self.fast_transforms = fast_transforms
        h = grid.h
        k = np.arange(1, grid.n + 1)
        lam = -(4.0 / h**2) * np.sin(k * np.pi * h / 2.0) ** 2
        if grid.dim == 1:
            self.eigenvalues = lam
        else:
            self.eigenvalues = lam[:, None] + lam[None, :]
        self._sine_matrix = None
        if not fast_transforms:
            j = np.arange(1, grid.n + 1)
            self._sine_matrix = np.sqrt(2.0 / (grid.n + 1)) * np.sin(
                np.pi * np.outer(j, j) / (grid.n + 1)
            )

    def to_modes(self, arr: np.ndarray) -> np.ndarray:
        """Orthonormal DST-I along every axis (involutive, so also the inverse)."""
        if self.fast_transforms:
            return scipy.fft.dstn(arr, type=1, norm="ortho")
        S = self._sine_matrix
        if self.grid.dim == 1:
            return S @ arr
        return S @ arr @ S

    from_modes = to_modes

    def apply(self, arr: np.ndarray) -> np.ndarray:
        """Interior stencil with zero extension beyond the boundary."""
        h2 = self.grid.h**2
        if self.grid.dim == 1:
            p = np.zeros(arr.size + 2)
            p[1:-1] = arr
            return (p[:-2] - 2.0 * p[1:-1] + p[2:]) / h2
        n = self.grid.n
        p = np.zeros((n + 2, n + 2))
        p[1:-1, 1:-1] = arr
        return (
            p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:] - 4.0 * p[1:-1, 1:-1]
        ) / h2

    def band(self) -> tuple[float, float]:
        """(off-diagonal, diagonal) entries of the 1D tridiagonal stencil."""
        if self.grid.dim != 1:
            raise ValueError("band() is defined for 1D operators only")
        h2 = self.grid.h**2
        return 1.0 / h2, -2.0 / h2

    @property
    def stencil_diagonal(self) -> float:
        return -2.0 * self.grid.dim / self.grid.h**2


class ScalarOperator(DirichletLaplacian):
    """Test double replacing L by value*I (value may be 0).

    Exercises the phi1 small-argument series and the Crank-Nicolson solve
    paths on a spectrum the Dirichlet Laplacian never produces.
    """

    def __init__(self, grid: Grid, value: float, fast_transforms: bool = True):
        super().__init__(grid, fast_transforms)
        self.value = float(value)
        self.eigenvalues = np.full(grid.shape, self.value)

    def apply(self, arr: np.ndarray) -> np.ndarray:
        return self.value * arr

    def band(self) -> tuple[float, float]:
        return 0.0, self.value

    @property
    def stencil_diagonal(self) -> float:
        return self.value


def _check_grid(op: DirichletLaplacian, v: Field):
    if v.grid != op.grid:
        raise ValueError("field grid does not match operator grid")


def apply_L(op: DirichletLaplacian, v: Field) -> Field:
    """L v: the interior stencil with zero extension beyond the boundary."""
    _check_grid(op, v)
    return Field(op.grid, op.apply(v.values))


def boundary_term(grid: Grid, bv: BoundaryValues) -> np.ndarray:
    """Contribution +b/h^2 of the boundary data at boundary-adjacent nodes.

    The full discrete operator acting on the extended field equals
    L(interior) + this term.
    """
    if bv.grid != grid:
        raise ValueError("boundary values sampled on a different grid")
    h2 = grid.h**2
    if grid.dim == 1:
        t = np.zeros(grid.n)
        t[0] += bv.left / h2
        t[-1] += bv.right / h2
        return t
    t = np.zeros(grid.shape)
    t[0, :] += bv.left / h2
    t[-1, :] += bv.right / h2
    t[:, 0] += bv.bottom / h2
    t[:, -1] += bv.top / h2
    return t


def apply_D_with_boundary(op: DirichletLaplacian, v: Field, bv: BoundaryValues) -> Field:
    """Full discrete D applied to the field extended by the boundary values."""
    _check_grid(op, v)
    return Field(op.grid, op.apply(v.values) + boundary_term(op.grid, bv))


def propagate(op: DirichletLaplacian, v0: Field, t: float) -> Field:
    """e^{tL} v0 by sine-mode diagonalization, exact up to transform rounding."""
    _check_grid(op, v0)
    if t < 0:
        raise ValueError("propagate requires t >= 0")
    if t == 0:
        return v0.copy()
    vhat = op.to_modes(v0.values)
    vhat *= np.exp(t * op.eigenvalues)
    return Field(op.grid, op.from_modes(vhat))


def phi1(x: np.ndarray) -> np.ndarray:
    """phi1(x) = (e^x - 1)/x, with a 4-term Taylor series for |x| < 1e-6."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-6
    xs = x[small]
    out[small] = 1.0 + xs / 2.0 + xs**2 / 6.0 + xs**3 / 24.0
    xl = x[~small]
    out[~small] = np.expm1(xl) / xl
    return out


def phi1_apply(op: DirichletLaplacian, w: Field, t: float) -> Field:
    """t * phi1(tL) w, the exponential-Euler source weight, computed spectrally."""
    _check_grid(op, w)
    if t <= 0:
        raise ValueError("phi1_apply requires t > 0")
    what = op.to_modes(w.values)
    what *= t * phi1(t * op.eigenvalues)
    return Field(op.grid, op.from_modes(what))


def _solve_shifted(op: DirichletLaplacian, a: float, rhs: np.ndarray, solver: str) -> np.ndarray:
    """Solve (I - a L) x = rhs."""
    if solver == "cg":
        n = rhs.size
        A = scipy.sparse.linalg.LinearOperator(
            (n, n), matvec=lambda u: u - a * op.apply(u.reshape(op.grid.shape)).ravel()
        )
        diag = 1.0 - a * op.stencil_diagonal
        M = scipy.sparse.linalg.LinearOperator((n, n), matvec=lambda u: u / diag)
        x, info = scipy.sparse.linalg.cg(A, rhs.ravel(), M=M, rtol=CG_TOL, atol=0.0)
        if info != 0:
            raise RuntimeError(f"conjugate gradient did not converge (info={info})")
        return x.reshape(op.grid.shape)
    if solver != "direct":
        raise ValueError(f"unknown solver {solver!r} (expected direct or cg)")
    if op.grid.dim == 1:
        off, diag = op.band()
        n = rhs.size
        ab = np.zeros((3, n))
        ab[0, 1:] = -a * off
        ab[1, :] = 1.0 - a * diag
        ab[2, :-1] = -a * off
        return scipy.linalg.solve_banded((1, 1), ab, rhs)
    xhat = op.to_modes(rhs)
    xhat /= 1.0 - a * op.eigenvalues
    return op.from_modes(xhat)


def crank_nicolson(
    op: DirichletLaplacian,
    v0: Field,
    source,
    t0: float,
    tau: float,
    m: int,
    solver: str = "direct",
) -> Field:
    """m trapezoidal substeps of size tau/m for v' = L v + source(t).

    ``source`` maps a time to a Field (or is None for the homogeneous problem).
    1D solves use tridiagonal elimination; 2D ``direct`` uses sine-transform
    diagonalization, ``cg`` the iterative path (relative residual 1e-12).
    """
    _check_grid(op, v0)
    if m < 1:
        raise ValueError("crank_nicolson requires m >= 1 substeps")
    if tau <= 0:
        raise ValueError("crank_nicolson requires tau > 0")
    delta = tau / m
    a = delta / 2.0
    v = v0.values.copy()
    s_prev = None if source is None else source(t0).values
    for j in range(m):
        rhs = v + a * op.apply(v)
        if source is not None:
            s_next = source(t0 + (j + 1) * delta).values
            rhs = rhs + a * (s_prev + s_next)
            s_prev = s_next
        v = _solve_shifted(op, a, rhs, solver)
    return Field(op.grid, v)


def dense_matrix(op: DirichletLaplacian) -> np.ndarray:
    """Dense matrix of the operator, for small-n verification against oracles."""
    n = op.grid.size
    A = np.empty((n, n))
    e = np.zeros(op.grid.shape)
    flat = e.ravel()
    for j in range(n):
        flat[j] = 1.0
        A[:, j] = op.apply(e).ravel()
        flat[j] = 0.0
    return A
