"""Discrete harmonic continuation of Dirichlet data and the corrected nonlinearity.

The lifting z(t) solves Dz = 0 with z = b(t) on the boundary; its time
derivative solves the same elliptic problem with data db/dt (the elliptic
solve and d/dt commute because D is linear and time-independent).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .grid import BoundaryValues, Field, Grid, zero_field
from .operators import DirichletLaplacian, boundary_term

FD_STEP = 1e-6


def _as_time_function(value) -> tuple[Callable, Optional[Callable], bool]:
    """Normalize a constant or callable of t to (b, db_dt, time_dependent)."""
    if callable(value):
        return value, None, True
    c = float(value)
    return (lambda t: c), (lambda t: 0.0), False


@dataclass
class BoundaryData:
    """Time-dependent Dirichlet trace b and its time derivative.

    ``b(t, x)`` in 1D (x is 0.0 or 1.0) and ``b(t, x, y)`` in 2D, where the
    spatial arguments may be numpy arrays (edges are sampled vectorized).
    When ``db_dt`` is None and b depends on time, a centered difference with
    step 1e-6 is used and flagged via ``numeric_derivative``.
    """

    dim: int
    b: Callable
    db_dt: Optional[Callable] = None
    time_dependent: bool = True

    @property
    def numeric_derivative(self) -> bool:
        return self.db_dt is None and self.time_dependent

    @staticmethod
    def endpoints(b0, b1, db0_dt=None, db1_dt=None) -> "BoundaryData":
        """1D data from the two endpoint values, each a constant or callable of t."""
        f0, d0, dep0 = _as_time_function(b0)
        f1, d1, dep1 = _as_time_function(b1)
        d0 = db0_dt if db0_dt is not None else d0
        d1 = db1_dt if db1_dt is not None else d1

        def b(t, x):
            return f0(t) if x < 0.5 else f1(t)

        db = None
        if d0 is not None and d1 is not None:
            db = lambda t, x: d0(t) if x < 0.5 else d1(t)
        return BoundaryData(1, b, db, time_dependent=dep0 or dep1)

    @staticmethod
    def uniform(dim: int, value, derivative=None) -> "BoundaryData":
        """Same value (constant or callable of t) on the whole boundary."""
        f, d, dep = _as_time_function(value)
        d = derivative if derivative is not None else d

        def b(t, *coords):
            return f(t) + 0.0 * coords[0]

        db = None
        if d is not None:
            db = lambda t, *coords: d(t) + 0.0 * coords[0]
        return BoundaryData(dim, b, db, time_dependent=dep)

    @staticmethod
    def trace_of(dim: int, g: Callable) -> "BoundaryData":
        """Time-independent data equal to the boundary trace of a spatial function."""
        return BoundaryData(
            dim,
            lambda t, *coords: g(*coords),
            lambda t, *coords: 0.0 * np.asarray(g(*coords), dtype=float),
            time_dependent=False,
        )

    def sample(self, grid: Grid, t: float) -> BoundaryValues:
        """Boundary-node values at time t."""
        self._check(grid)
        return self._sample_func(grid, lambda *args: self.b(t, *args))

    def sample_derivative(self, grid: Grid, t: float) -> BoundaryValues:
        """Boundary-node values of db/dt at time t (analytic or centered difference)."""
        self._check(grid)
        if not self.time_dependent:
            return self._sample_func(grid, lambda *args: 0.0 * np.asarray(args[0], dtype=float))
        if self.db_dt is not None:
            return self._sample_func(grid, lambda *args: self.db_dt(t, *args))
        d = FD_STEP
        return self._sample_func(
            grid, lambda *args: (self.b(t + d, *args) - self.b(t - d, *args)) / (2.0 * d)
        )

    def _check(self, grid: Grid):
        if grid.dim != self.dim:
            raise ValueError(f"boundary data is {self.dim}D, grid is {grid.dim}D")

    def _sample_func(self, grid: Grid, func) -> BoundaryValues:
        if grid.dim == 1:
            return BoundaryValues(grid, float(func(0.0)), float(func(1.0)))
        s = grid.axis_coords
        zeros = np.zeros_like(s)
        ones = np.ones_like(s)
        return BoundaryValues(
            grid,
            left=np.broadcast_to(func(zeros, s), s.shape).astype(float),
            right=np.broadcast_to(func(ones, s), s.shape).astype(float),
            bottom=np.broadcast_to(func(s, zeros), s.shape).astype(float),
            top=np.broadcast_to(func(s, ones), s.shape).astype(float),
        )


def _solve_dirichlet_laplace(op: DirichletLaplacian, bv: BoundaryValues) -> Field:
    """Solve L z = -boundary_term(bv), i.e. the full D z = 0 with trace bv."""
    rhs = -boundary_term(op.grid, bv)
    if op.grid.dim == 1:
        off, diag = op.band()
        n = rhs.size
        ab = np.zeros((3, n))
        ab[0, 1:] = off
        ab[1, :] = diag
        ab[2, :-1] = off
        return Field(op.grid, scipy.linalg.solve_banded((1, 1), ab, rhs))
    zhat = op.to_modes(rhs)
    zhat /= op.eigenvalues
    return Field(op.grid, op.from_modes(zhat))


def solve_lifting(grid: Grid, bd: BoundaryData, t: float, op: DirichletLaplacian | None = None) -> Field:
    """Discrete harmonic continuation of b(t): tridiagonal solve in 1D, fast
    sine-transform Poisson solve in 2D."""
    bd._check(grid)
    op = op if op is not None else DirichletLaplacian(grid)
    return _solve_dirichlet_laplace(op, bd.sample(grid, t))


def lifting_time_derivative(
    grid: Grid, bd: BoundaryData, t: float, op: DirichletLaplacian | None = None
) -> Field:
    """d/dt of the lifting: the harmonic continuation of db/dt(t)."""
    bd._check(grid)
    op = op if op is not None else DirichletLaplacian(grid)
    return _solve_dirichlet_laplace(op, bd.sample_derivative(grid, t))


class Lifting:
    """Evaluator for z(t) and dz/dt(t) on a fixed grid.

    For time-independent data both fields are precomputed at construction and
    every call returns the identical cached Field. Evaluations are pure.
    """

    def __init__(self, grid: Grid, bd: BoundaryData, op: DirichletLaplacian | None = None):
        bd._check(grid)
        self.grid = grid
        self.bd = bd
        self.op = op if op is not None else DirichletLaplacian(grid)
        self._z_cache: Field | None = None
        self._dz_cache: Field | None = None
        if not bd.time_dependent:
            self._z_cache = _solve_dirichlet_laplace(self.op, bd.sample(grid, 0.0))
            self._dz_cache = zero_field(grid)

    def z_at(self, t: float) -> Field:
        if self._z_cache is not None:
            return self._z_cache
        return _solve_dirichlet_laplace(self.op, self.bd.sample(self.grid, t))

    def dz_at(self, t: float) -> Field:
        if self._dz_cache is not None:
            return self._dz_cache
        return _solve_dirichlet_laplace(self.op, self.bd.sample_derivative(self.grid, t))


def modified_nonlinearity(f: Callable, lifting: Lifting, t: float, w: Field) -> Field:
    """g(t, w) = f(w + z(t)) - f(z(t)), which satisfies g(t, 0) = 0 exactly."""
    z = lifting.z_at(t).values
    return Field(w.grid, f(w.values + z) - f(z))
