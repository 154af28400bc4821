"""Uniform interior-node grids on [0,1] and [0,1]^2, fields, and discrete norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``n`` interior nodes per axis and spacing ``h = 1/(n+1)``.

    Boundary nodes at 0 and 1 are not stored; they carry Dirichlet data.
    In 2D the interior nodes form an n-by-n lattice, flattened row-major
    (index ``k = i*n + j`` is the node at ``((i+1)h, (j+1)h)``).
    """

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / (self.n + 1)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def axis_coords(self) -> np.ndarray:
        """Interior coordinates along one axis: (i+1)h for i = 0..n-1."""
        return (np.arange(self.n) + 1) * self.h

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays shaped like a field (ij indexing in 2D)."""
        x = self.axis_coords
        if self.dim == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))


def make_grid(dim: int, n: int) -> Grid:
    """Create a uniform grid with n interior nodes per axis on the unit domain."""
    return Grid(dim, n)


@dataclass
class Field:
    """Real values on the interior nodes of a grid.

    ``values`` is stored with shape ``grid.shape`` (C order, so ``ravel()``
    gives the row-major interior vector).
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size != self.grid.size:
            raise ValueError(
                f"field has {v.size} values, grid has {self.grid.size} nodes"
            )
        self.values = v.reshape(self.grid.shape)

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    # small amount of arithmetic so time-stepping code reads like the schemes
    def __add__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, a: float) -> "Field":
        return Field(self.grid, a * self.values)

    __rmul__ = __mul__

    def _check(self, other: "Field"):
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")


def zero_field(grid: Grid) -> Field:
    return Field(grid, np.zeros(grid.shape))


def eval_on_grid(func, grid: Grid) -> Field:
    """Sample a function of the interior coordinates into a field.

    ``func`` takes one array argument in 1D (x) and two in 2D (x, y); it must
    accept numpy arrays (any numpy expression does).
    """
    vals = np.asarray(func(*grid.meshgrid()), dtype=float)
    return Field(grid, np.broadcast_to(vals, grid.shape).copy())


def norm(field: Field, kind: str) -> float:
    """Discrete norm of a field: ``inf``, ``one`` (h^dim-weighted l1) or ``two``.

    The one- and two-norms carry the quadrature weight h^dim so they are
    mesh-consistent approximations of the continuous L1/L2 norms.
    """
    v = field.values
    w = field.grid.h ** field.grid.dim
    if kind == "inf":
        return float(np.max(np.abs(v)))
    if kind == "one":
        return float(w * np.sum(np.abs(v)))
    if kind == "two":
        return float(np.sqrt(w * np.sum(v * v)))
    raise ValueError(f"unknown norm kind {kind!r} (expected inf, one or two)")


@dataclass(frozen=True)
class BoundaryValues:
    """Dirichlet data sampled at boundary nodes of the extended lattice.

    1D: ``left``/``right`` are the scalar endpoint values b(0), b(1).
    2D: four length-n edge arrays indexed by the interior coordinate along the
    edge; ``left``/``right`` are the x=0/x=1 edges sampled at y_j, ``bottom``/
    ``top`` the y=0/y=1 edges sampled at x_i.  Corner nodes belong to the
    boundary but never enter the 5-point stencil, so they are not stored.
    """

    grid: Grid
    left: float | np.ndarray
    right: float | np.ndarray
    bottom: np.ndarray | None = None
    top: np.ndarray | None = None

    def __post_init__(self):
        if self.grid.dim == 2:
            for name in ("left", "right", "bottom", "top"):
                edge = np.asarray(getattr(self, name), dtype=float)
                if edge.shape != (self.grid.n,):
                    raise ValueError(f"edge {name} must have length n={self.grid.n}")
                object.__setattr__(self, name, edge)
        else:
            object.__setattr__(self, "left", float(self.left))
            object.__setattr__(self, "right", float(self.right))
