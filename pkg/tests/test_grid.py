import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ihctriage.errors import InvalidInputError
from ihctriage.tiling import plan_grid

from oracles import grid_axis_loop


def test_1024_patch256_overlap128():
    plan = plan_grid((1024, 1024), 256, 128)
    xs = sorted({x for x, _ in plan.positions})
    assert xs == [0, 128, 256, 384, 512, 640, 768]
    assert len(plan.positions) == 49


def test_small_extent_single_padded_anchor():
    plan = plan_grid((200, 200), 256, 128)
    assert plan.positions == ((0, 0),)


def test_flush_anchor_appended():
    plan = plan_grid((1000, 1000), 256, 128)
    xs = sorted({x for x, _ in plan.positions})
    assert xs == [0, 128, 256, 384, 512, 640, 744]
    assert len(plan.positions) == 49


def test_positions_row_major_and_unique():
    plan = plan_grid((700, 500), 256, 128)
    assert len(set(plan.positions)) == len(plan.positions)
    assert plan.positions == tuple(sorted(plan.positions, key=lambda a: (a[1], a[0])))


def test_invalid_inputs():
    with pytest.raises(InvalidInputError):
        plan_grid((0, 100), 256, 128)
    with pytest.raises(InvalidInputError):
        plan_grid((100, 100), 0, 0)
    with pytest.raises(InvalidInputError):
        plan_grid((100, 100), 256, 256)
    with pytest.raises(InvalidInputError):
        plan_grid((100, 100), 256, -1)
    with pytest.raises(InvalidInputError):
        plan_grid((100, 100), 256, 128, pad_policy="mirror")


def test_matches_enumeration_oracle_on_random_geometries():
    rng = np.random.default_rng(123)
    for _ in range(100):
        w = int(rng.integers(1, 3000))
        h = int(rng.integers(1, 3000))
        patch = int(rng.integers(1, 600))
        overlap = int(rng.integers(0, patch))
        plan = plan_grid((w, h), patch, overlap)
        xs = grid_axis_loop(w, patch, patch - overlap)
        ys = grid_axis_loop(h, patch, patch - overlap)
        assert plan.positions == tuple((x, y) for y in ys for x in xs)


@settings(max_examples=150, deadline=None)
@given(
    dim=st.integers(1, 5000),
    patch=st.integers(1, 512),
    overlap_frac=st.floats(0, 0.99),
)
def test_axis_windows_cover_every_coordinate(dim, patch, overlap_frac):
    overlap = int(patch * overlap_frac)
    plan = plan_grid((dim, 1), patch, overlap)
    xs = sorted({x for x, _ in plan.positions})
    covered = np.zeros(dim, dtype=bool)
    for x in xs:
        covered[max(x, 0) : min(x + patch, dim)] = True
    assert covered.all()
    for x in xs:
        assert 0 <= x <= max(dim - patch, 0)
