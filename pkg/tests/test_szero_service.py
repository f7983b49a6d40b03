"""
構造的ゼロのテスト
"""
import itertools

import numpy as np
import pytest

from conftest import brute_force_omega, random_feasible_instances
from margin_sampler.models.margins import MarginPair
from margin_sampler.models.mask import StructuralZeroMask
from margin_sampler.services.margin_service import first_column_support, gale_ryser_feasible
from margin_sampler.services.szero_service import (
    first_column_support_sz, min_cut_bounds, sort_rows_sz, unsafe_column_support
)
from margin_sampler.utils.error_handlers import InfeasibleMarginsError, MaskViolationError, ShapeError


def _valid_columns(support, m):
    return sorted(b for b in itertools.product((0, 1), repeat=m) if support.contains(b))


def test_mask_properties():
    mask = StructuralZeroMask.from_positions([(0, 1), (2, 0)], 3, 3)
    assert list(mask.xi) == [1, 0, 1]
    assert list(mask.zeta) == [1, 1, 0]
    assert list(mask.y) == [1, 3, 0]
    assert mask.is_simple
    assert mask.to_dict()['positions'] == [[1, 2], [3, 1]]


def test_mask_out_of_range():
    with pytest.raises(ShapeError):
        StructuralZeroMask.from_positions([(3, 0)], 3, 3)


def test_sort_rows_sz_keeps_zero_diagonal():
    mp = MarginPair((1, 1, 1), (1, 1, 1))
    sorted_mp, sorted_mask, ordering = sort_rows_sz(mp, StructuralZeroMask.zero_diagonal(3, 3))
    assert list(ordering.permutation) == [0, 1, 2]
    assert np.array_equal(sorted_mask.a, np.eye(3, dtype=bool))


def test_sort_rows_sz_breaks_ties_by_zero_column():
    mp = MarginPair((1, 1), (1, 1))
    mask = StructuralZeroMask.from_positions([(1, 0)], 2, 2)
    _, _, ordering = sort_rows_sz(mp, mask)
    assert list(ordering.permutation) == [1, 0]

    mp = MarginPair((2, 1, 1), (2, 1, 1))
    mask = StructuralZeroMask.from_positions([(0, 1), (2, 0)], 3, 3)
    sorted_mp, sorted_mask, ordering = sort_rows_sz(mp, mask)
    assert list(ordering.permutation) == [0, 2, 1]
    assert sorted_mp.r == (2, 1, 1)
    assert list(sorted_mask.y) == [1, 0, 3]


def test_sort_rows_sz_rejects_general_mask():
    mask = StructuralZeroMask.from_positions([(0, 0), (0, 1)], 2, 2)
    with pytest.raises(MaskViolationError):
        sort_rows_sz(MarginPair((0, 1), (1, 0)), mask)


def test_support_on_derangement(derangement):
    mp, mask = derangement
    assert list(min_cut_bounds(mp, mask)[:2]) == [2, 2]
    support = first_column_support_sz(mp, mask)
    assert support.allowed == (frozenset({0}), frozenset({0, 1}), frozenset({0, 1}))
    assert list(support.lower) == [0, 0, 1]
    assert list(support.upper) == [1, 1, 1]
    assert _valid_columns(support, 3) == [(0, 0, 1), (0, 1, 0)]


def test_support_two_by_two_zero_diagonal():
    support = first_column_support_sz(MarginPair((1, 1), (1, 1)), StructuralZeroMask.zero_diagonal(2, 2))
    assert _valid_columns(support, 2) == [(0, 1)]


def test_empty_mask_reduces_to_plain_support():
    checked = 0
    for mp, _ in random_feasible_instances(200, seed=11, max_dim=5):
        if mp.n < 2:
            continue
        order_c = np.argsort(-mp.cols, kind='stable')
        order_r = np.argsort(-mp.rows, kind='stable')
        sorted_mp = MarginPair(tuple(mp.rows[order_r]), tuple(mp.cols[order_c]))
        plain = first_column_support(sorted_mp)
        sz = first_column_support_sz(sorted_mp, StructuralZeroMask.empty(mp.m, mp.n))
        assert np.array_equal(plain.allow_zero, sz.allow_zero)
        assert np.array_equal(plain.allow_one, sz.allow_one)
        # 区間の端は異なってよいが、含まれる列は同じ
        assert _valid_columns(plain, mp.m) == _valid_columns(sz, mp.m)
        checked += 1
    assert checked > 50


def test_support_sz_is_exact():
    """台に入る b はちょうど Ω(r - b, c', a') が空でない b"""
    checked = 0
    for mp, mask in random_feasible_instances(300, seed=3, max_dim=4, with_mask=True):
        if mp.n < 2:
            continue
        order_c = np.argsort(-mp.cols, kind='stable')
        col_mp = MarginPair(mp.r, tuple(mp.cols[order_c]))
        sorted_mp, sorted_mask, _ = sort_rows_sz(col_mp, mask.permute_columns(order_c))
        support = first_column_support_sz(sorted_mp, sorted_mask)
        # 完成できる第1列 = Ω(r, c, a) の行列の第1列
        expected = sorted({tuple(int(v) for v in z[:, 0]) for z in brute_force_omega(sorted_mp, sorted_mask)})
        assert _valid_columns(support, mp.m) == expected, (sorted_mp, sorted_mask.positions)
        checked += 1
    assert checked > 100


def test_support_sz_preconditions(derangement):
    mp, mask = derangement
    with pytest.raises(InfeasibleMarginsError) as excinfo:
        first_column_support_sz(MarginPair((1, 1, 1), (1, 2, 0)), mask)
    assert excinfo.value.error_code == "UNSORTED_COLUMNS"
    with pytest.raises(InfeasibleMarginsError) as excinfo:
        first_column_support_sz(MarginPair((1, 2, 0), (1, 1, 1)), mask)
    assert excinfo.value.error_code == "UNSORTED_ROWS"


def test_unsafe_support_forbids_masked_ones():
    mask = StructuralZeroMask.from_positions([(0, 0), (0, 1), (1, 0)], 3, 3)
    mp = MarginPair((1, 1, 1), (1, 1, 1))
    support = unsafe_column_support(mp, mask)
    assert not support.allow_one[0] and not support.allow_one[1]
    assert support.allow_one[2]
    # 第1列に置ける行は3行目だけ
    assert _valid_columns(support, 3) == [(0, 0, 1)]
    assert gale_ryser_feasible(mp)
