"""
周辺和の計算サービス: 共役列、Gale-Ryser 条件、行の並べ替え、第1列の台
"""
from typing import Sequence, Tuple

import numpy as np

from ..models.margins import ColumnSupport, MarginPair, RowOrdering
from ..utils.error_handlers import InfeasibleMarginsError


def conjugate(t: Sequence[int], length_out: int) -> np.ndarray:
    """t*_j = #{i : t_i >= j}, j = 1..length_out"""
    t = np.asarray(t, dtype=np.int64).reshape(-1)
    if length_out <= 0:
        return np.zeros(0, dtype=np.int64)
    counts = np.bincount(np.minimum(t, length_out), minlength=length_out + 1)
    at_least = np.cumsum(counts[::-1])[::-1]
    return at_least[1:length_out + 1].astype(np.int64)


def gale_ryser_feasible(mp: MarginPair) -> bool:
    """Ω(r, c) が空でないか"""
    r, c = mp.rows, mp.cols
    if r.max() > mp.n or c.max() > mp.m or r.sum() != c.sum():
        return False
    r_sorted = np.sort(r)[::-1]
    c_star = conjugate(c, mp.m)
    return bool(np.all(np.cumsum(r_sorted) <= np.cumsum(c_star)))


def sort_rows(mp: MarginPair) -> Tuple[MarginPair, RowOrdering]:
    """行和の降順に安定ソートする"""
    ordering = RowOrdering(np.argsort(-mp.rows, kind='stable'))
    return MarginPair(tuple(ordering.apply(mp.r)), mp.c), ordering


def first_column_support(mp: MarginPair) -> ColumnSupport:
    """
    第1列として取り得る b の集合を A と B で表す。
    A_i: r_i = 0 なら {0}、r_i = n なら {1}、それ以外 {0, 1}
    B_i: [max(0, Σ_{l<=i} r_l - Σ_{l<=i} c'*_l), c_1]、B_m = {c_1}
    """
    if mp.n < 2:
        raise InfeasibleMarginsError("第1列の台には2列以上が必要です", error_code="SINGLE_COLUMN",
                                     details=mp.to_dict())
    if not mp.rows_sorted():
        raise InfeasibleMarginsError("行和が降順に並んでいません", error_code="UNSORTED_ROWS",
                                     details=mp.to_dict())
    if not gale_ryser_feasible(mp):
        raise InfeasibleMarginsError("周辺和が Gale-Ryser 条件を満たしません", details=mp.to_dict())

    r = mp.rows
    c1 = int(mp.c[0])
    c_star = conjugate(mp.c[1:], mp.m)

    lower = np.maximum(0, np.cumsum(r) - np.cumsum(c_star))
    # 部分和は非減少なので下限の累積最大を取っても台は変わらない
    lower = np.maximum.accumulate(lower)
    upper = np.full(mp.m, c1, dtype=np.int64)
    lower[-1] = c1

    return ColumnSupport(
        allow_zero=r < mp.n,
        allow_one=r > 0,
        lower=lower.astype(np.int64),
        upper=upper
    )


def single_column_fill(r: Sequence[int]) -> np.ndarray:
    """列が1本だけ残った場合の決定的な割り当て b_i = r_i"""
    return (np.asarray(r, dtype=np.int64) == 1).astype(np.int64)
