import numpy as np
import pytest
import scipy.linalg

from splitpde import (
    BoundaryValues,
    DirichletLaplacian,
    Field,
    ScalarOperator,
    apply_D_with_boundary,
    apply_L,
    boundary_term,
    crank_nicolson,
    dense_matrix,
    make_grid,
    norm,
    phi1,
    phi1_apply,
    propagate,
)


def sine_mode(grid, k):
    x = grid.axis_coords
    return Field(grid, np.sin(k * np.pi * x))


def eig(grid, k):
    return -(4.0 / grid.h**2) * np.sin(k * np.pi * grid.h / 2.0) ** 2


# --- stencil -----------------------------------------------------------------


def test_apply_L_unit_vector():
    g = make_grid(1, 3)
    op = DirichletLaplacian(g)
    out = apply_L(op, Field(g, [0.0, 1.0, 0.0]))
    assert np.allclose(out.values, 16.0 * np.array([1.0, -2.0, 1.0]), atol=0)


@pytest.mark.parametrize("n,k", [(7, 1), (7, 4), (31, 9), (499, 250)])
def test_apply_L_sine_eigenvectors(n, k):
    g = make_grid(1, n)
    op = DirichletLaplacian(g)
    v = sine_mode(g, k)
    out = apply_L(op, v)
    assert np.allclose(out.values, eig(g, k) * v.values, rtol=1e-11, atol=1e-8)


def test_apply_L_constant_feels_boundary():
    g = make_grid(1, 5)
    op = DirichletLaplacian(g)
    out = apply_L(op, Field(g, np.ones(5)))
    expected = np.zeros(5)
    expected[0] = expected[-1] = -1.0 / g.h**2
    assert np.allclose(out.values, expected, atol=0)


def test_apply_L_grid_mismatch():
    op = DirichletLaplacian(make_grid(1, 4))
    with pytest.raises(ValueError):
        apply_L(op, Field(make_grid(1, 5), np.ones(5)))


def test_eigenvalues_match_dense_solver():
    for g in (make_grid(1, 8), make_grid(2, 4)):
        op = DirichletLaplacian(g)
        dense = dense_matrix(op)
        assert np.allclose(
            np.sort(op.eigenvalues.ravel()), np.linalg.eigvalsh(dense), rtol=1e-12, atol=1e-9
        )


def test_symmetry_and_negativity():
    rng = np.random.default_rng(3)
    for g in (make_grid(1, 16), make_grid(2, 7)):
        op = DirichletLaplacian(g)
        for _ in range(5):
            u = rng.standard_normal(g.shape)
            v = rng.standard_normal(g.shape)
            lu = op.apply(u)
            lv = op.apply(v)
            assert np.vdot(lu, v) == pytest.approx(np.vdot(u, lv), rel=1e-12)
            assert np.vdot(op.apply(u), u) < 0.0


# --- boundary term -----------------------------------------------------------


def test_apply_D_with_boundary_linear_data():
    g = make_grid(1, 9)
    op = DirichletLaplacian(g)
    v = Field(g, g.axis_coords)
    out = apply_D_with_boundary(op, v, BoundaryValues(g, 0.0, 1.0))
    assert np.max(np.abs(out.values)) < 1e-10


def test_apply_D_with_boundary_zero_interior():
    g = make_grid(1, 3)
    op = DirichletLaplacian(g)
    out = apply_D_with_boundary(op, Field(g, np.zeros(3)), BoundaryValues(g, 1.0, 1.0))
    assert np.allclose(out.values, [16.0, 0.0, 16.0], atol=0)


@pytest.mark.parametrize("dim,n", [(1, 6), (2, 4)])
def test_apply_D_with_boundary_matches_extended_stencil(dim, n):
    # oracle: build the extended lattice with the boundary values filled in
    # and apply the plain second-difference stencil to it
    rng = np.random.default_rng(11)
    g = make_grid(dim, n)
    op = DirichletLaplacian(g)
    v = rng.standard_normal(g.shape)
    if dim == 1:
        bv = BoundaryValues(g, rng.standard_normal(), rng.standard_normal())
        ext = np.concatenate([[bv.left], v, [bv.right]])
        oracle = (ext[:-2] - 2 * ext[1:-1] + ext[2:]) / g.h**2
    else:
        bv = BoundaryValues(
            g,
            rng.standard_normal(n),
            rng.standard_normal(n),
            rng.standard_normal(n),
            rng.standard_normal(n),
        )
        ext = np.zeros((n + 2, n + 2))
        ext[1:-1, 1:-1] = v
        ext[0, 1:-1] = bv.left
        ext[-1, 1:-1] = bv.right
        ext[1:-1, 0] = bv.bottom
        ext[1:-1, -1] = bv.top
        oracle = (
            ext[:-2, 1:-1] + ext[2:, 1:-1] + ext[1:-1, :-2] + ext[1:-1, 2:] - 4 * ext[1:-1, 1:-1]
        ) / g.h**2
    out = apply_D_with_boundary(op, Field(g, v), bv)
    assert np.allclose(out.values, oracle, rtol=1e-12, atol=1e-9)
    # linearity: D(v, b) = L v + D(0, b)
    lin = apply_L(op, Field(g, v)).values + boundary_term(g, bv)
    assert np.allclose(out.values, lin, atol=0)


# --- propagator --------------------------------------------------------------


def test_propagate_identity_at_zero():
    g = make_grid(1, 12)
    op = DirichletLaplacian(g)
    v = Field(g, np.arange(12, dtype=float))
    out = propagate(op, v, 0.0)
    assert np.array_equal(out.values, v.values)
    assert out.values is not v.values


def test_propagate_sine_mode():
    g = make_grid(1, 20)
    op = DirichletLaplacian(g)
    v = sine_mode(g, 1)
    out = propagate(op, v, 3e-4)
    assert np.allclose(out.values, np.exp(3e-4 * eig(g, 1)) * v.values, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("dim,n", [(1, 4), (1, 8), (2, 3)])
def test_propagate_matches_dense_expm(dim, n):
    rng = np.random.default_rng(5)
    g = make_grid(dim, n)
    op = DirichletLaplacian(g)
    v = rng.standard_normal(g.shape)
    t = 0.01
    oracle = scipy.linalg.expm(t * dense_matrix(op)) @ v.ravel()
    out = propagate(op, Field(g, v), t)
    assert np.max(np.abs(out.values.ravel() - oracle)) < 1e-12


def test_propagate_semigroup():
    rng = np.random.default_rng(6)
    g = make_grid(1, 33)
    op = DirichletLaplacian(g)
    v = Field(g, rng.standard_normal(33))
    a = propagate(op, propagate(op, v, 2e-4), 3e-4)
    b = propagate(op, v, 5e-4)
    assert norm(a - b, "inf") < 1e-11


def test_propagate_max_principle():
    rng = np.random.default_rng(9)
    g = make_grid(2, 8)
    op = DirichletLaplacian(g)
    v = Field(g, rng.standard_normal(g.shape))
    for t in (0.0, 1e-4, 1e-2, 1.0):
        assert norm(propagate(op, v, t), "inf") <= norm(v, "inf") + 1e-13


def test_propagate_rejects_negative_time():
    g = make_grid(1, 4)
    with pytest.raises(ValueError):
        propagate(DirichletLaplacian(g), Field(g, np.ones(4)), -1e-3)


def test_fast_and_direct_transforms_agree():
    rng = np.random.default_rng(10)
    for g in (make_grid(1, 13), make_grid(1, 499), make_grid(2, 6)):
        fast = DirichletLaplacian(g, fast_transforms=True)
        direct = DirichletLaplacian(g, fast_transforms=False)
        v = Field(g, rng.standard_normal(g.shape))
        d = propagate(fast, v, 1e-3) - propagate(direct, v, 1e-3)
        assert norm(d, "inf") < 1e-12


# --- phi1 --------------------------------------------------------------------


def test_phi1_scalar_series_and_limit():
    assert phi1(np.array([0.0]))[0] == 1.0
    x = np.array([-1e-7, 1e-8, 1e-3, -2.0])
    exact = np.expm1(x) / x
    assert np.allclose(phi1(x), exact, rtol=1e-12)


def test_phi1_apply_zero_operator_hook():
    g = make_grid(1, 6)
    op = ScalarOperator(g, 0.0)
    w = Field(g, np.linspace(1, 2, 6))
    out = phi1_apply(op, w, 0.3)
    assert np.allclose(out.values, 0.3 * w.values, rtol=1e-13)


def test_phi1_apply_sine_mode():
    g = make_grid(1, 15)
    op = DirichletLaplacian(g)
    k, t = 3, 2e-4
    lam = eig(g, k)
    w = sine_mode(g, k)
    out = phi1_apply(op, w, t)
    assert np.allclose(out.values, t * (np.expm1(t * lam) / (t * lam)) * w.values, rtol=1e-11)


def test_phi1_apply_matches_quadrature_oracle():
    # t*phi1(tL)w = integral_0^t e^{sL} w ds, by 40-node Gauss-Legendre + expm
    rng = np.random.default_rng(12)
    g = make_grid(1, 4)
    op = DirichletLaplacian(g)
    w = rng.standard_normal(4)
    t = 0.01
    L = dense_matrix(op)
    nodes, weights = np.polynomial.legendre.leggauss(40)
    s = 0.5 * t * (nodes + 1.0)
    oracle = 0.5 * t * sum(
        wt * (scipy.linalg.expm(si * L) @ w) for wt, si in zip(weights, s)
    )
    out = phi1_apply(op, Field(g, w), t)
    assert np.max(np.abs(out.values - oracle)) < 1e-10


# --- Crank-Nicolson ----------------------------------------------------------


def test_cn_amplification_per_substep():
    g = make_grid(1, 25)
    op = DirichletLaplacian(g)
    v = sine_mode(g, 1)
    tau, m = 1e-3, 4
    sigma = (tau / m) * eig(g, 1)
    amp = ((1 + sigma / 2) / (1 - sigma / 2)) ** m
    out = crank_nicolson(op, v, None, 0.0, tau, m)
    assert np.allclose(out.values, amp * v.values, rtol=1e-11)


def test_cn_zero_operator_constant_source():
    g = make_grid(1, 5)
    op = ScalarOperator(g, 0.0)
    c = Field(g, np.full(5, 2.5))
    v0 = Field(g, np.linspace(0, 1, 5))
    out = crank_nicolson(op, v0, lambda t: c, 0.0, 0.2, 3)
    assert np.allclose(out.values, v0.values + 0.2 * c.values, rtol=1e-13)


def test_cn_richardson_convergence_to_duhamel():
    # exact = e^{tau L} v0 + int_0^tau e^{(tau-s)L} src(s) ds (dense quadrature)
    rng = np.random.default_rng(13)
    g = make_grid(1, 6)
    op = DirichletLaplacian(g)
    v0 = rng.standard_normal(6)
    tau = 0.02
    L = dense_matrix(op)

    def src_vec(t):
        return np.sin(3 * t) * np.ones(6) + t * np.linspace(0, 1, 6)

    nodes, weights = np.polynomial.legendre.leggauss(60)
    s = 0.5 * tau * (nodes + 1.0)
    duhamel = 0.5 * tau * sum(
        wt * (scipy.linalg.expm((tau - si) * L) @ src_vec(si)) for wt, si in zip(weights, s)
    )
    exact = scipy.linalg.expm(tau * L) @ v0 + duhamel

    def src(t):
        return Field(g, src_vec(t))

    errs = []
    for m in (8, 16, 32):
        out = crank_nicolson(op, Field(g, v0), src, 0.0, tau, m)
        errs.append(np.max(np.abs(out.values - exact)))
    rate1 = np.log2(errs[0] / errs[1])
    rate2 = np.log2(errs[1] / errs[2])
    assert rate1 == pytest.approx(2.0, abs=0.3)
    assert rate2 == pytest.approx(2.0, abs=0.3)


def test_cn_2d_spectral_and_cg_agree():
    rng = np.random.default_rng(14)
    g = make_grid(2, 8)
    op = DirichletLaplacian(g)
    v0 = Field(g, rng.standard_normal(g.shape))
    src = Field(g, rng.standard_normal(g.shape))
    a = crank_nicolson(op, v0, lambda t: src, 0.0, 1e-3, 5, solver="direct")
    b = crank_nicolson(op, v0, lambda t: src, 0.0, 1e-3, 5, solver="cg")
    assert norm(a - b, "inf") < 1e-10


def test_cn_cg_nonconvergence_raises(monkeypatch):
    import splitpde.operators as ops

    def fake_cg(*args, **kwargs):
        return np.zeros(args[1].shape), 30

    monkeypatch.setattr(ops.scipy.sparse.linalg, "cg", fake_cg)
    g = make_grid(2, 4)
    op = DirichletLaplacian(g)
    with pytest.raises(RuntimeError, match="converge"):
        crank_nicolson(op, Field(g, np.ones(g.shape)), None, 0.0, 1e-3, 1, solver="cg")


def test_cn_validates_arguments():
    g = make_grid(1, 4)
    op = DirichletLaplacian(g)
    v = Field(g, np.ones(4))
    with pytest.raises(ValueError):
        crank_nicolson(op, v, None, 0.0, 1e-3, 0)
    with pytest.raises(ValueError):
        crank_nicolson(op, v, None, 0.0, -1e-3, 2)
    with pytest.raises(ValueError):
        crank_nicolson(op, v, None, 0.0, 1e-3, 2, solver="lu")


def test_exp_euler_constant_source_matches_cn():
    # e^{tau L} v + tau phi1(tau L) k  ==  CN with many substeps, same source
    rng = np.random.default_rng(15)
    g = make_grid(1, 10)
    op = DirichletLaplacian(g)
    v = Field(g, rng.standard_normal(10))
    k = Field(g, rng.standard_normal(10))
    tau = 5e-3
    exact = propagate(op, v, tau) + phi1_apply(op, k, tau)
    approx = crank_nicolson(op, v, lambda t: k, 0.0, tau, 1000)
    assert norm(exact - approx, "inf") < 5e-9
