"""
構造的ゼロのサービス: 行の並べ替えと第1列の台
"""
from typing import Tuple

import numpy as np

from ..models.margins import ColumnSupport, MarginPair, RowOrdering
from ..models.mask import StructuralZeroMask
from ..utils.error_handlers import InfeasibleMarginsError, ShapeError


def _check_shape(mp: MarginPair, mask: StructuralZeroMask) -> None:
    if (mask.m, mask.n) != (mp.m, mp.n):
        raise ShapeError(f"マスクの形 {mask.m}x{mask.n} が周辺和 {mp.m}x{mp.n} と一致しません")


def sort_rows_sz(
    mp: MarginPair,
    mask: StructuralZeroMask,
    allow_general: bool = False
) -> Tuple[MarginPair, StructuralZeroMask, RowOrdering]:
    """
    行和の降順、同順位はゼロの列位置 y の昇順、それでも同じなら元の順。
    allow_general=True なら複数ゼロの行も受け付け、y は最初のゼロの列とする。
    """
    _check_shape(mp, mask)
    if not allow_general:
        mask.validate()
    # lexsort は最後のキーが主キーで、安定
    ordering = RowOrdering(np.lexsort((mask.y, -mp.rows)))
    return (
        MarginPair(tuple(ordering.apply(mp.r)), mp.c),
        mask.permute_rows(ordering.permutation),
        ordering
    )


def rows_in_sz_order(mp: MarginPair, mask: StructuralZeroMask) -> bool:
    r, y = mp.rows, mask.y
    for i in range(mp.m - 1):
        if r[i] < r[i + 1] or (r[i] == r[i + 1] and y[i] > y[i + 1]):
            return False
    return True


def min_cut_bounds(mp: MarginPair, mask: StructuralZeroMask) -> np.ndarray:
    """
    d_i = min_j [ i(j-1) + Σ_{k>j} c_k - Σ_{l<=i} Σ_{k=2..j} a_lk ]  (i, j は1始まり)
    """
    m, n = mp.m, mp.n
    c = mp.cols
    i_idx = np.arange(1, m + 1)[:, None]
    j_idx = np.arange(1, n + 1)[None, :]
    suffix = c.sum() - np.cumsum(c)
    a = mask.a.astype(np.int64).copy()
    a[:, 0] = 0
    zeros_before = np.cumsum(np.cumsum(a, axis=1), axis=0)
    return (i_idx * (j_idx - 1) + suffix[None, :] - zeros_before).min(axis=1)


def first_column_support_sz(mp: MarginPair, mask: StructuralZeroMask) -> ColumnSupport:
    """
    構造的ゼロがある場合の第1列の台。
    A_i: r_i = 0 または a_i1 = 1 なら {0}、r_i = n - ξ_i かつ a_i1 = 0 なら {1}
    B_i: [max(0, Σ_{l<=i} r_l - d_i), c_1]、B_m = {c_1}
    """
    _check_shape(mp, mask)
    mask.validate()
    if mp.n < 2:
        raise InfeasibleMarginsError("第1列の台には2列以上が必要です", error_code="SINGLE_COLUMN")
    if not mp.cols_sorted():
        raise InfeasibleMarginsError("構造的ゼロがある場合は列和の降順が必要です", error_code="UNSORTED_COLUMNS",
                                     details=mp.to_dict())
    if not rows_in_sz_order(mp, mask):
        raise InfeasibleMarginsError("行が (r 降順, y 昇順) に並んでいません", error_code="UNSORTED_ROWS",
                                     details=mp.to_dict())

    r = mp.rows
    c1 = int(mp.c[0])
    first = mask.a[:, 0]
    room = mp.n - mask.xi

    lower = np.maximum(0, np.cumsum(r) - min_cut_bounds(mp, mask))
    lower = np.maximum.accumulate(lower)
    lower[-1] = c1

    return ColumnSupport(
        allow_zero=~((r == room) & ~first),
        allow_one=(r > 0) & ~first,
        lower=lower.astype(np.int64),
        upper=np.full(mp.m, c1, dtype=np.int64)
    )


def unsafe_column_support(mp: MarginPair, mask: StructuralZeroMask) -> ColumnSupport:
    """
    一般のマスク用。行和と列和だけから作った台で、マスク位置の 1 を禁止する。
    台は厳密でなく、後の列で行き詰まることがある。
    """
    _check_shape(mp, mask)
    r = mp.rows
    c1 = int(mp.c[0])
    first = mask.a[:, 0]
    lower = np.zeros(mp.m, dtype=np.int64)
    lower[-1] = c1
    return ColumnSupport(
        allow_zero=r < mp.n - mask.xi + first.astype(np.int64),
        allow_one=(r > 0) & ~first,
        lower=lower,
        upper=np.full(mp.m, c1, dtype=np.int64)
    )
