import math

import numpy as np
import pytest

from splitpde import BoundaryValues, Field, eval_on_grid, make_grid, norm
from splitpde.problems import gaussian_bumps


def test_make_grid_paper_resolution():
    g = make_grid(1, 499)
    assert g.h == pytest.approx(1.0 / 500.0, abs=0)
    assert g.size == 499
    assert g.h * (g.n + 1) == pytest.approx(1.0, rel=1e-15)


def test_make_grid_single_node():
    g = make_grid(1, 1)
    assert g.axis_coords[0] == pytest.approx(0.5)


def test_make_grid_2d():
    g = make_grid(2, 3)
    assert g.size == 9
    assert g.h == 0.25
    X, Y = g.meshgrid()
    assert (X[0, 0], Y[0, 0]) == (0.25, 0.25)


@pytest.mark.parametrize("dim,n", [(0, 3), (3, 3), (1, 0), (2, -1)])
def test_make_grid_rejects_bad_args(dim, n):
    with pytest.raises(ValueError):
        make_grid(dim, n)


def test_grid_coords_interior():
    for g in (make_grid(1, 17), make_grid(2, 9)):
        for axis in g.meshgrid():
            assert np.all(axis > 0) and np.all(axis < 1)


def test_eval_on_grid_single_node():
    g = make_grid(1, 1)
    f = eval_on_grid(lambda x: 1.0 + np.sin(np.pi * x) ** 2, g)
    assert f.values[0] == pytest.approx(2.0, abs=1e-15)


def test_eval_on_grid_identity():
    g = make_grid(1, 3)
    f = eval_on_grid(lambda x: x, g)
    assert np.allclose(f.values, [0.25, 0.5, 0.75], atol=0)


def test_eval_on_grid_2d_matches_pointwise():
    # three hand-picked nodes of the 2D bump initial value, evaluated with
    # scalar math as an independent check of the vectorized sampling
    g = make_grid(2, 99)
    f = eval_on_grid(gaussian_bumps, g)

    def scalar(x, y):
        return 0.5 + 2.0 * (
            math.exp(-40.0 * (x - 0.5 - 0.1 * math.cos(math.pi * y)) ** 2)
            + math.exp(-35.0 * (y - 0.5 - 0.1 * math.sin(2.0 * math.pi * x)) ** 2)
            - math.exp(-35.0 * ((x - 0.5) ** 2 + (y - 0.5) ** 2))
        )

    for i, j in ((49, 49), (9, 74), (24, 24)):
        x, y = (i + 1) * g.h, (j + 1) * g.h
        assert f.values[i, j] == pytest.approx(scalar(x, y), rel=1e-14)
    assert f.values[49, 49] == pytest.approx(2.5, rel=1e-14)


def test_norm_examples():
    g = make_grid(1, 3)
    ones = Field(g, np.ones(3))
    assert norm(ones, "inf") == 1.0
    f = Field(g, [1.0, -2.0, 3.0])
    assert norm(f, "one") == pytest.approx(1.5, abs=0)
    assert norm(f, "two") == pytest.approx(math.sqrt(3.5), rel=1e-15)


def test_norm_homogeneity():
    rng = np.random.default_rng(7)
    g = make_grid(2, 5)
    v = rng.standard_normal(g.shape)
    for alpha in (-3.5, 0.0, 0.25, 11.0):
        for kind in ("inf", "one", "two"):
            assert norm(Field(g, alpha * v), kind) == pytest.approx(
                abs(alpha) * norm(Field(g, v), kind), rel=1e-12, abs=1e-300
            )


def test_norm_one_bounded_by_inf():
    # h^dim * count = (n h)^dim <= 1, so the weighted l1 never exceeds the max
    rng = np.random.default_rng(8)
    for g in (make_grid(1, 11), make_grid(2, 6)):
        v = Field(g, rng.standard_normal(g.shape))
        assert norm(v, "one") <= norm(v, "inf") + 1e-15


def test_norm_unknown_kind():
    g = make_grid(1, 2)
    with pytest.raises(ValueError):
        norm(Field(g, [1.0, 2.0]), "three")


def test_eval_on_grid_refinement_shares_values():
    f = lambda x: np.sin(3 * x) + x**2
    coarse = eval_on_grid(f, make_grid(1, 4))   # h = 1/5
    fine = eval_on_grid(f, make_grid(1, 9))     # h = 1/10, every 2nd node shared
    assert np.allclose(coarse.values, fine.values[1::2], atol=0)


def test_field_shape_validation():
    g = make_grid(2, 3)
    with pytest.raises(ValueError):
        Field(g, np.zeros(8))
    f = Field(g, np.zeros(9))
    assert f.values.shape == (3, 3)


def test_field_arithmetic_checks_grid():
    a = Field(make_grid(1, 3), np.ones(3))
    b = Field(make_grid(1, 4), np.ones(4))
    with pytest.raises(ValueError):
        _ = a + b


def test_boundary_values_validation():
    g2 = make_grid(2, 3)
    with pytest.raises(ValueError):
        BoundaryValues(g2, np.ones(2), np.ones(3), np.ones(3), np.ones(3))
    bv = BoundaryValues(make_grid(1, 3), 1, 2.5)
    assert bv.left == 1.0 and bv.right == 2.5
