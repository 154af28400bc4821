"""Built-in problems P1-P5 and the plain-text problem config format.

All built-ins use the quadratic reaction f(u) = u^2 and t_final = 0.1.
P1-P3 are 1D (default 499 interior nodes, i.e. spacing 1/500), P4-P5 are 2D
(default 99 nodes per axis). P4/P5 replace the original finite element space
discretization with the same structured finite differences used in 1D, which
reproduces the temporal orders but not the error magnitudes.
"""

from __future__ import annotations

import math

import numpy as np

from .flows import ReactionTerm
from .grid import eval_on_grid, make_grid
from .lifting import BoundaryData
from .operators import DirichletLaplacian
from .splitting import Problem

PROBLEM_IDS = ("P1", "P2", "P3", "P4", "P5")

PROBLEM_SUMMARIES = {
    "P1": "1D, u0 = 1 + sin^2(pi x), constant boundary b0 = b1 = 1",
    "P2": "1D, u0 = 1 + sin^2(pi x), oscillating boundary b0 = b1 = 1 + sin(5t)",
    "P3": "1D, u0 = 0.5 + 0.5x, b0 = 0.5 fixed, b1 = 1 + sin(20 pi t)",
    "P4": "2D, u0 = 1 + sin^2(pi x) sin^2(pi y), constant boundary b = 1",
    "P5": "2D, Gaussian-bump initial value with its compatible boundary trace",
}


def gaussian_bumps(x, y):
    """Initial value of P5: offset plus two bent Gaussian ridges minus a dip."""
    return 0.5 + 2.0 * (
        np.exp(-40.0 * (x - 0.5 - 0.1 * np.cos(np.pi * y)) ** 2)
        + np.exp(-35.0 * (y - 0.5 - 0.1 * np.sin(2.0 * np.pi * x)) ** 2)
        - np.exp(-35.0 * ((x - 0.5) ** 2 + (y - 0.5) ** 2))
    )


def builtin_problem(problem_id: str, n: int | None = None) -> Problem:
    """Construct one of the built-in problems, optionally overriding the grid size."""
    if problem_id not in PROBLEM_IDS:
        raise ValueError(f"unknown problem {problem_id!r}, expected one of {PROBLEM_IDS}")
    square = ReactionTerm.square()
    t_final = 0.1

    if problem_id in ("P1", "P2", "P3"):
        grid = make_grid(1, 499 if n is None else n)
    else:
        grid = make_grid(2, 99 if n is None else n)
    op = DirichletLaplacian(grid)

    if problem_id == "P1":
        u0 = eval_on_grid(lambda x: 1.0 + np.sin(np.pi * x) ** 2, grid)
        bd = BoundaryData.endpoints(1.0, 1.0)
    elif problem_id == "P2":
        u0 = eval_on_grid(lambda x: 1.0 + np.sin(np.pi * x) ** 2, grid)
        osc = lambda t: 1.0 + math.sin(5.0 * t)
        dosc = lambda t: 5.0 * math.cos(5.0 * t)
        bd = BoundaryData.endpoints(osc, osc, dosc, dosc)
    elif problem_id == "P3":
        u0 = eval_on_grid(lambda x: 0.5 + 0.5 * x, grid)
        bd = BoundaryData.endpoints(
            0.5,
            lambda t: 1.0 + math.sin(20.0 * math.pi * t),
            db1_dt=lambda t: 20.0 * math.pi * math.cos(20.0 * math.pi * t),
        )
    elif problem_id == "P4":
        u0 = eval_on_grid(lambda x, y: 1.0 + np.sin(np.pi * x) ** 2 * np.sin(np.pi * y) ** 2, grid)
        bd = BoundaryData.uniform(2, 1.0)
    else:
        u0 = eval_on_grid(gaussian_bumps, grid)
        bd = BoundaryData.trace_of(2, gaussian_bumps)

    return Problem(grid, op, square, bd, u0, t_final, name=problem_id)


# --- named expression catalog for config files ------------------------------
#
# Expressions are written  name  or  name:p1,p2,...  with numeric parameters.

TIME_EXPRESSIONS = {
    # const:V               -> V
    # sin:OFFSET,AMP,FREQ   -> OFFSET + AMP*sin(FREQ*t)
    "const": 1,
    "sin": 3,
}

SPACE_EXPRESSIONS_1D = {
    # const:V        -> V
    # linear:A,B     -> A + B*x
    # sin_sq:A,B     -> A + B*sin^2(pi x)
    "const": 1,
    "linear": 2,
    "sin_sq": 2,
}

SPACE_EXPRESSIONS_2D = {
    # const:V          -> V
    # sin_sq_prod:A,B  -> A + B*sin^2(pi x)*sin^2(pi y)
    # gaussian_bumps   -> the P5 initial value
    "const": 1,
    "sin_sq_prod": 2,
    "gaussian_bumps": 0,
}

REACTION_EXPRESSIONS = {
    # square | linear:C | zero
    "square": 0,
    "linear": 1,
    "zero": 0,
}


def _parse_expr(text: str, table: dict, what: str) -> tuple[str, list[float]]:
    name, _, rest = text.strip().partition(":")
    name = name.strip()
    if name not in table:
        raise ValueError(f"unknown {what} expression {name!r} (choose from {sorted(table)})")
    params = [float(p) for p in rest.split(",") if p.strip()] if rest else []
    if len(params) != table[name]:
        raise ValueError(f"{what} expression {name!r} takes {table[name]} parameter(s), got {len(params)}")
    return name, params


def _time_function(text: str):
    """Return (value_or_callable, derivative_or_None) for a boundary endpoint."""
    name, p = _parse_expr(text, TIME_EXPRESSIONS, "time")
    if name == "const":
        return p[0], None
    off, amp, freq = p
    return (
        lambda t: off + amp * math.sin(freq * t),
        lambda t: amp * freq * math.cos(freq * t),
    )


def _space_function(text: str, dim: int):
    if dim == 1:
        name, p = _parse_expr(text, SPACE_EXPRESSIONS_1D, "1D space")
        if name == "const":
            return lambda x: p[0] + 0.0 * x
        if name == "linear":
            return lambda x: p[0] + p[1] * x
        return lambda x: p[0] + p[1] * np.sin(np.pi * x) ** 2
    name, p = _parse_expr(text, SPACE_EXPRESSIONS_2D, "2D space")
    if name == "const":
        return lambda x, y: p[0] + 0.0 * x
    if name == "sin_sq_prod":
        return lambda x, y: p[0] + p[1] * np.sin(np.pi * x) ** 2 * np.sin(np.pi * y) ** 2
    return gaussian_bumps


def _reaction(text: str) -> ReactionTerm:
    name, p = _parse_expr(text, REACTION_EXPRESSIONS, "reaction")
    if name == "square":
        return ReactionTerm.square()
    if name == "linear":
        return ReactionTerm.linear(p[0])
    return ReactionTerm.zero()


def load_problem(path: str) -> Problem:
    """Load a problem from a key = value config file.

    Required keys: dim, n, t_final, reaction, u0, and the boundary: b0 and b1
    in 1D, b in 2D (where ``b = trace`` uses the boundary trace of u0).
    Lines starting with # and blank lines are ignored.
    """
    entries: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            entries[key.strip()] = value.strip()

    def need(key):
        if key not in entries:
            raise ValueError(f"{path}: missing required key {key!r}")
        return entries[key]

    dim = int(need("dim"))
    grid = make_grid(dim, int(need("n")))
    t_final = float(need("t_final"))
    if t_final <= 0:
        raise ValueError(f"{path}: t_final must be positive")
    f = _reaction(need("reaction"))
    u0_func = _space_function(need("u0"), dim)
    u0 = eval_on_grid(u0_func, grid)

    if dim == 1:
        b0, db0 = _time_function(need("b0"))
        b1, db1 = _time_function(need("b1"))
        bd = BoundaryData.endpoints(b0, b1, db0, db1)
    else:
        btext = need("b").strip()
        if btext == "trace":
            bd = BoundaryData.trace_of(2, u0_func)
        else:
            value, deriv = _time_function(btext)
            bd = BoundaryData.uniform(2, value, deriv)

    known = {"name", "dim", "n", "t_final", "reaction", "u0", "b0", "b1", "b"}
    unknown = set(entries) - known
    if unknown:
        raise ValueError(f"{path}: unknown key(s) {sorted(unknown)}")

    name = entries.get("name", path)
    return Problem(grid, DirichletLaplacian(grid), f, bd, u0, t_final, name=name)
