"""Convergence and local-error studies, observed orders, and table emission."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

from .flows import BlowUpError, LinearFlowConfig
from .grid import Field, norm
from .lifting import Lifting
from .splitting import SCHEME_NAMES, Problem, SchemeConfig, integrate, one_step

NORM_LABELS = {"inf": "linf", "one": "l1", "two": "l2"}
LOCAL_REFERENCE_SUBSTEPS = 100


@dataclass(frozen=True)
class ReferencePolicy:
    """How the reference solution of a study is produced.

    modified_strang_small_step: one reference per problem, corrected Strang at
    step tau_ref. per_scheme: each scheme is compared against itself at step
    tau_ref. substepped_same_scheme: each (scheme, tau) cell is compared
    against the same scheme run with substep_factor substeps of tau/factor.
    """

    kind: str
    tau_ref: Optional[float] = None
    substep_factor: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("modified_strang_small_step", "per_scheme", "substepped_same_scheme"):
            raise ValueError(f"unknown reference policy {self.kind!r}")
        if self.kind == "substepped_same_scheme":
            if self.substep_factor is None or self.substep_factor < 4:
                raise ValueError("substepped_same_scheme needs substep_factor >= 4")
        elif self.tau_ref is None or self.tau_ref <= 0:
            raise ValueError(f"{self.kind} needs a positive tau_ref")

    @staticmethod
    def modified_strang(tau_ref: float) -> "ReferencePolicy":
        return ReferencePolicy("modified_strang_small_step", tau_ref=tau_ref)

    @staticmethod
    def per_scheme(tau_ref: float) -> "ReferencePolicy":
        return ReferencePolicy("per_scheme", tau_ref=tau_ref)

    @staticmethod
    def substepped(factor: int) -> "ReferencePolicy":
        return ReferencePolicy("substepped_same_scheme", substep_factor=factor)

    def describe(self) -> str:
        if self.kind == "substepped_same_scheme":
            return f"same scheme with {self.substep_factor} substeps"
        label = "modified Strang" if self.kind == "modified_strang_small_step" else "same scheme"
        return f"{label} at tau_ref = {self.tau_ref:g}"


def default_reference_policy(problem_name: str, step_sizes) -> ReferencePolicy:
    """The per-problem defaults: P3 compares each scheme against itself at
    tau_ref = 5e-5, everything else against a small-step corrected Strang run."""
    smallest = min(step_sizes)
    if problem_name == "P3":
        return ReferencePolicy.per_scheme(min(5e-5, smallest / 16.0))
    return ReferencePolicy.modified_strang(smallest / 16.0)


@dataclass
class ExperimentSpec:
    """A study: which schemes, step sizes and norms to run on a problem.

    ``linear=None`` picks the sub-integrator automatically: the exact spectral
    exponential step for time-independent boundary data, the exponential
    midpoint rule otherwise. ``local=True`` marks a single-step (local error)
    study, where step sizes need not divide t_final.
    """

    problem: Problem
    schemes: tuple[str, ...]
    step_sizes: tuple[float, ...]
    norms: tuple[str, ...] = ("inf",)
    reference: Optional[ReferencePolicy] = None
    linear: Optional[LinearFlowConfig] = None
    reaction_substeps: int = 10
    reaction_method: str = "rk4"
    local: bool = False
    local_substeps: int = LOCAL_REFERENCE_SUBSTEPS

    def __post_init__(self):
        self.schemes = tuple(self.schemes)
        self.step_sizes = tuple(float(s) for s in self.step_sizes)
        self.norms = tuple(self.norms)
        if not self.schemes or not self.step_sizes:
            raise ValueError("need at least one scheme and one step size")
        for s in self.schemes:
            if s not in SCHEME_NAMES:
                raise ValueError(f"unknown scheme {s!r}, expected one of {SCHEME_NAMES}")
        for k in self.norms:
            if k not in NORM_LABELS:
                raise ValueError(f"unknown norm {k!r}, expected inf, one or two")
        for tau in self.step_sizes:
            if tau <= 0:
                raise ValueError("step sizes must be positive")
            if not self.local:
                n = round(self.problem.t_final / tau)
                if n < 1 or abs(n * tau - self.problem.t_final) > 1e-9 * self.problem.t_final:
                    raise ValueError(
                        f"step size {tau:g} does not divide t_final = {self.problem.t_final:g}"
                    )
        if self.reference is None:
            self.reference = default_reference_policy(self.problem.name, self.step_sizes)
        if self.reference.tau_ref is not None and not self.local:
            if self.reference.tau_ref * 4.0 > min(self.step_sizes):
                raise ValueError("tau_ref must be at most a quarter of the smallest step size")

    def resolved_linear(self) -> LinearFlowConfig:
        if self.linear is not None:
            return self.linear
        if self.problem.bd.time_dependent:
            return LinearFlowConfig("exponential_midpoint")
        return LinearFlowConfig("exact_spectral_exp_euler")

    def scheme_config(self, name: str) -> SchemeConfig:
        return SchemeConfig.from_name(
            name,
            linear=self.resolved_linear(),
            reaction_substeps=self.reaction_substeps,
            reaction_method=self.reaction_method,
        )


@dataclass
class ResultTable:
    """Rows of (step size, error per norm, observed order per norm).

    ``errors[kind][i]`` is None for a failed (blown-up) cell; ``orders`` are
    aligned with rows, the first entry always None.
    """

    scheme: str
    step_sizes: tuple[float, ...]
    norms: tuple[str, ...]
    errors: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return any(e is None for kind in self.norms for e in self.errors[kind])


def observed_order(errors, steps) -> list[float]:
    """order_i = ln(e_{i-1}/e_i) / ln(tau_{i-1}/tau_i) for i = 1..len-1."""
    errors = [float(e) for e in errors]
    steps = [float(s) for s in steps]
    if len(errors) != len(steps) or len(errors) < 2:
        raise ValueError("need equal-length error/step lists with at least two entries")
    if any(e <= 0 for e in errors) or any(s <= 0 for s in steps):
        raise ValueError("errors and step sizes must be positive")
    return [
        math.log(errors[i - 1] / errors[i]) / math.log(steps[i - 1] / steps[i])
        for i in range(1, len(errors))
    ]


def _row_orders(errors, steps):
    """Per-row orders with None where a neighbor is missing (row 0 is None)."""
    out = [None]
    for i in range(1, len(errors)):
        a, b = errors[i - 1], errors[i]
        if a is None or b is None or a <= 0 or b <= 0:
            out.append(None)
        else:
            out.append(math.log(a / b) / math.log(steps[i - 1] / steps[i]))
    return out


def _base_metadata(spec: ExperimentSpec, scheme: str) -> dict:
    prob = spec.problem
    lin = spec.resolved_linear()
    meta = {
        "problem": prob.name,
        "scheme": scheme,
        "dim": prob.grid.dim,
        "n": prob.grid.n,
        "h": prob.grid.h,
        "t_final": prob.t_final,
        "linear_method": lin.method,
        "cn_substeps": lin.cn_substeps,
        "reaction_method": spec.reaction_method,
        "reaction_substeps": spec.reaction_substeps,
        "numeric_boundary_derivative": prob.bd.numeric_derivative,
    }
    return meta


def _steps_for(problem: Problem, tau: float) -> int:
    return max(1, round(problem.t_final / tau))


def run_convergence(spec: ExperimentSpec) -> dict[str, ResultTable]:
    """Global-error study at t_final; returns one ResultTable per scheme."""
    if spec.local:
        raise ValueError("spec is marked local; use run_local_error")
    prob = spec.problem
    shared_ref = None
    shared_ref_time = 0.0
    if spec.reference.kind == "modified_strang_small_step":
        t0 = time.perf_counter()
        # the shared reference always uses the high-order reaction path, even
        # when the study itself runs a low-order reaction method
        cfg = SchemeConfig.from_name(
            "strang-mod", linear=spec.resolved_linear(), reaction_substeps=spec.reaction_substeps
        )
        shared_ref = integrate(cfg, prob, _steps_for(prob, spec.reference.tau_ref))
        shared_ref_time = time.perf_counter() - t0

    tables = {}
    for scheme in spec.schemes:
        cfg = spec.scheme_config(scheme)
        t_start = time.perf_counter()
        scheme_ref = shared_ref
        ref_failed = False
        if spec.reference.kind == "per_scheme":
            try:
                scheme_ref = integrate(cfg, prob, _steps_for(prob, spec.reference.tau_ref))
            except BlowUpError:
                ref_failed = True

        errors = {kind: [] for kind in spec.norms}
        for tau in spec.step_sizes:
            n_steps = _steps_for(prob, tau)
            try:
                if ref_failed:
                    raise BlowUpError("reference run blew up")
                u = integrate(cfg, prob, n_steps)
                if spec.reference.kind == "substepped_same_scheme":
                    u_ref = integrate(cfg, prob, n_steps * spec.reference.substep_factor)
                else:
                    u_ref = scheme_ref
                diff = u - u_ref
                for kind in spec.norms:
                    errors[kind].append(norm(diff, kind))
            except BlowUpError:
                for kind in spec.norms:
                    errors[kind].append(None)

        orders = {kind: _row_orders(errors[kind], spec.step_sizes) for kind in spec.norms}
        meta = _base_metadata(spec, scheme)
        meta["kind"] = "global"
        meta["reference"] = spec.reference.describe()
        meta["reference_wall_time_s"] = shared_ref_time
        meta["wall_time_s"] = time.perf_counter() - t_start
        tables[scheme] = ResultTable(scheme, spec.step_sizes, spec.norms, errors, orders, meta)
    return tables


def run_local_error(spec: ExperimentSpec) -> dict[str, ResultTable]:
    """Error after a single step of each size, against the same scheme run
    with local_substeps substeps of tau/local_substeps."""
    prob = spec.problem
    k = spec.local_substeps
    tables = {}
    for scheme in spec.schemes:
        cfg = spec.scheme_config(scheme)
        t_start = time.perf_counter()
        lifting = Lifting(prob.grid, prob.bd, prob.op)
        errors = {kind: [] for kind in spec.norms}
        for tau in spec.step_sizes:
            try:
                u1 = one_step(cfg, prob, lifting, prob.u0, 0.0, tau)
                u_ref = prob.u0
                delta = tau / k
                for j in range(k):
                    u_ref = one_step(cfg, prob, lifting, u_ref, j * delta, delta)
                diff = u1 - u_ref
                for kind in spec.norms:
                    errors[kind].append(norm(diff, kind))
            except BlowUpError:
                for kind in spec.norms:
                    errors[kind].append(None)
        orders = {kind: _row_orders(errors[kind], spec.step_sizes) for kind in spec.norms}
        meta = _base_metadata(spec, scheme)
        meta["kind"] = "local"
        meta["reference"] = f"same scheme with {k} substeps"
        meta["local_substeps"] = k
        meta["wall_time_s"] = time.perf_counter() - t_start
        tables[scheme] = ResultTable(scheme, spec.step_sizes, spec.norms, errors, orders, meta)
    return tables


def _fmt(x, full_precision: bool, missing: str) -> str:
    if x is None:
        return missing
    return f"{x:.17g}" if full_precision else f"{x:.4g}"


def emit(table: ResultTable, format: str = "markdown", full_precision: bool = False) -> str:
    """Render a table as RFC-4180-style CSV or a paper-style markdown table.

    CSV columns are step_size,error_<norm>,order_<norm> per requested norm,
    with empty fields for missing cells; markdown renders missing cells as --.
    Values use 4 significant digits unless full_precision is set.
    """
    if format == "csv":
        cols = ["step_size"]
        for kind in table.norms:
            cols += [f"error_{kind}", f"order_{kind}"]
        lines = [",".join(cols)]
        for i, tau in enumerate(table.step_sizes):
            row = [_fmt(tau, True, "")]
            for kind in table.norms:
                row.append(_fmt(table.errors[kind][i], full_precision, ""))
                row.append(_fmt(table.orders[kind][i], full_precision, ""))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    if format != "markdown":
        raise ValueError(f"unknown format {format!r} (expected csv or markdown)")

    meta = table.metadata
    title = f"**{table.scheme}**"
    if meta:
        title += (
            f" on {meta.get('problem', '?')}"
            f" (n = {meta.get('n', '?')}, linear = {meta.get('linear_method', '?')},"
            f" reference = {meta.get('reference', '?')})"
        )
    head = ["step size"]
    for kind in table.norms:
        head += [f"{NORM_LABELS[kind]} error", "order"]
    lines = [title, ""]
    lines.append("| " + " | ".join(head) + " |")
    lines.append("|" + "---:|" * len(head))
    for i, tau in enumerate(table.step_sizes):
        row = [f"{tau:.3e}"]
        for kind in table.norms:
            e = table.errors[kind][i]
            o = table.orders[kind][i]
            row.append(f"{e:.3e}" if e is not None else "--")
            row.append(f"{o:.4g}" if o is not None else "--")
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> ResultTable:
    """Parse emit(..., 'csv') output back into a bare ResultTable."""
    lines = [ln for ln in text.strip().split("\n") if ln]
    header = lines[0].split(",")
    if header[0] != "step_size" or (len(header) - 1) % 2 != 0:
        raise ValueError("not a splitpde CSV table")
    norms = tuple(name.removeprefix("error_") for name in header[1::2])
    step_sizes = []
    errors = {k: [] for k in norms}
    orders = {k: [] for k in norms}
    for ln in lines[1:]:
        cells = ln.split(",")
        step_sizes.append(float(cells[0]))
        for j, kind in enumerate(norms):
            e, o = cells[1 + 2 * j], cells[2 + 2 * j]
            errors[kind].append(float(e) if e else None)
            orders[kind].append(float(o) if o else None)
    return ResultTable("", tuple(step_sizes), norms, errors, orders, {})
