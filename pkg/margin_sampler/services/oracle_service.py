"""
厳密解のサービス: Ω の全列挙、厳密な数え上げ、病的な周辺和の閉形式、一様分布との全変動距離
"""
import math
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config.logging_config import app_logger
from ..config.settings import app_settings
from ..models.margins import MarginPair
from ..models.mask import StructuralZeroMask
from ..models.profile import Heuristic
from ..models.run import ExactCount
from ..utils.error_handlers import BudgetExceededError, InfeasibleMarginsError, ShapeError, SizeLimitError
from .dp_sampler_service import ProposalSampler
from .margin_service import gale_ryser_feasible


def _check_mask_shape(mp: MarginPair, mask: Optional[StructuralZeroMask]) -> None:
    if mask is not None and (mask.m, mask.n) != (mp.m, mp.n):
        raise ShapeError(f"マスクの形 {mask.m}x{mask.n} が周辺和 {mp.m}x{mp.n} と一致しません")


def _room(mask: Optional[StructuralZeroMask], m: int, n: int) -> np.ndarray:
    """room[i, j] = 列 j 以降で行 i に 1 を置ける列の数"""
    allowed = np.ones((m, n), dtype=np.int64) if mask is None else (~mask.a).astype(np.int64)
    return np.cumsum(allowed[:, ::-1], axis=1)[:, ::-1]


def enumerate_omega(
    mp: MarginPair,
    mask: Optional[StructuralZeroMask] = None,
    limit: Optional[int] = None
) -> List[np.ndarray]:
    """周辺和（とマスク）を満たす行列をすべて列挙する。重複なし"""
    limit = app_settings.get_setting('oracle', 'enumeration_limit', 25) if limit is None else limit
    if mp.m * mp.n > limit:
        raise SizeLimitError(f"全列挙は mn <= {limit} に限られます（{mp.m}x{mp.n}）",
                             details={'m': mp.m, 'n': mp.n, 'limit': limit})
    _check_mask_shape(mp, mask)
    m, n = mp.m, mp.n
    if mp.total != sum(mp.c):
        return []

    room = _room(mask, m, n)
    blocked = mask.a if mask is not None else np.zeros((m, n), dtype=bool)
    found: List[np.ndarray] = []
    z = np.zeros((m, n), dtype=np.int64)

    def fill(j: int, r: List[int]) -> None:
        if j == n:
            if not any(r):
                found.append(z.copy())
            return
        candidates = [i for i in range(m) if r[i] > 0 and not blocked[i, j]]
        for rows in combinations(candidates, int(mp.c[j])):
            for i in rows:
                r[i] -= 1
            # 残りの列で行和を満たせない枝は打ち切る
            if j + 1 == n or all(r[i] <= room[i, j + 1] for i in range(m)):
                z[list(rows), j] = 1
                fill(j + 1, r)
                z[list(rows), j] = 0
            for i in rows:
                r[i] += 1

    fill(0, list(mp.r))
    app_logger.debug(f"Ω を列挙しました: {len(found)}個")
    return found


def exact_count_dp(
    mp: MarginPair,
    mask: Optional[StructuralZeroMask] = None,
    budget: Optional[int] = None
) -> ExactCount:
    """
    列ごとの再帰 N(r, c) = Σ_b N(r - b, c') をメモ化して厳密に数える。
    マスクがなければ N は行の置換で不変なので、状態は残り行和の値ごとの個数で持つ。
    """
    budget = app_settings.get_setting('oracle', 'memo_budget', 10_000_000) if budget is None else budget
    _check_mask_shape(mp, mask)
    if mp.total != sum(mp.c):
        return ExactCount(0)
    if mask is None:
        value = _count_unmasked(mp, budget)
    else:
        value = _count_masked(mp, mask, budget)
    app_logger.info(f"厳密数を計算しました: {mp.m}x{mp.n}, N={value}")
    return ExactCount(value)


def _count_unmasked(mp: MarginPair, budget: int) -> int:
    n = mp.n
    cols = sorted(mp.c, reverse=True)
    memo: Dict[Tuple[int, Tuple[int, ...]], int] = {}

    def feasible(counts: Tuple[int, ...], j: int) -> bool:
        rows = [v for v, k in enumerate(counts) for _ in range(k) if v > 0]
        if not rows:
            return sum(cols[j:]) == 0
        if max(rows) > n - j:
            return False
        return gale_ryser_feasible(MarginPair(tuple(rows), tuple(cols[j:])))

    def count(j: int, counts: Tuple[int, ...]) -> int:
        if j == n:
            return 1 if sum(counts[1:]) == 0 else 0
        key = (j, counts)
        if key in memo:
            return memo[key]
        if len(memo) >= budget:
            raise BudgetExceededError(f"メモ化状態数が上限 {budget} を超えました",
                                      details={'budget': budget, 'column': j + 1})
        total = 0
        if feasible(counts, j):
            total = split(j, counts, len(counts) - 1, int(cols[j]), list(counts), 1)
        memo[key] = total
        return total

    def split(j: int, counts: Tuple[int, ...], v: int, need: int, state: List[int], ways: int) -> int:
        """値 v の行から s 行を選んで 1 を置く（v の大きい順に割り振る）"""
        if need == 0:
            return ways * count(j + 1, tuple(state))
        if v == 0:
            return 0
        available = counts[v]
        total = 0
        for s in range(min(available, need), -1, -1):
            state[v] -= s
            state[v - 1] += s
            total += split(j, counts, v - 1, need - s, state, ways * math.comb(available, s))
            state[v] += s
            state[v - 1] -= s
        return total

    initial = [0] * (n + 1)
    for value in mp.r:
        if value > n:
            return 0
        initial[value] += 1
    return count(0, tuple(initial))


def _count_masked(mp: MarginPair, mask: StructuralZeroMask, budget: int) -> int:
    m, n = mp.m, mp.n
    room = _room(mask, m, n)
    blocked = mask.a
    cols = [int(v) for v in mp.c]
    memo: Dict[Tuple[int, Tuple[int, ...]], int] = {}

    def count(j: int, r: Tuple[int, ...]) -> int:
        if j == n:
            return 1 if not any(r) else 0
        if any(r[i] > room[i, j] for i in range(m)):
            return 0
        key = (j, r)
        if key in memo:
            return memo[key]
        if len(memo) >= budget:
            raise BudgetExceededError(f"メモ化状態数が上限 {budget} を超えました",
                                      details={'budget': budget, 'column': j + 1})
        candidates = [i for i in range(m) if r[i] > 0 and not blocked[i, j]]
        total = 0
        for rows in combinations(candidates, cols[j]):
            nxt = list(r)
            for i in rows:
                nxt[i] -= 1
            total += count(j + 1, tuple(nxt))
        memo[key] = total
        return total

    return count(0, tuple(int(v) for v in mp.r))


def pathological_count(R: int, C: int, m: int, n: int) -> ExactCount:
    """
    r = (R, 1, ..., 1)（長さ m）、c = (C, 1, ..., 1)（長さ n）の厳密数。
    z_11 = 1 と z_11 = 0 で場合分けし、残りの単位行と単位列の完全マッチングを数える。
    """
    if not (1 <= R <= n and 1 <= C <= m):
        raise ShapeError("病的な周辺和は 1 <= R <= n かつ 1 <= C <= m が必要です",
                         details={'R': R, 'C': C, 'm': m, 'n': n})
    if R + m - 1 != C + n - 1:
        return ExactCount(0)

    total = 0
    if m - C >= 0 and m - C == n - R:
        total += math.comb(n - 1, R - 1) * math.comb(m - 1, C - 1) * math.factorial(m - C)
    if m - 1 - C >= 0 and m - 1 - C == n - 1 - R:
        total += math.comb(n - 1, R) * math.comb(m - 1, C) * math.factorial(m - 1 - C)
    return ExactCount(total)


def pathological_parameters(mp: MarginPair) -> Optional[Tuple[int, int]]:
    """周辺和が (R, 1, ..., 1), (C, 1, ..., 1) の形なら (R, C)"""
    if all(v == 1 for v in mp.r[1:]) and all(v == 1 for v in mp.c[1:]) and mp.r[0] >= 1 and mp.c[0] >= 1:
        return int(mp.r[0]), int(mp.c[0])
    return None


def exact_uniform_sample(
    mp: MarginPair,
    mask: Optional[StructuralZeroMask] = None,
    rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    """列挙した Ω から一様に1つ選ぶ"""
    omega = enumerate_omega(mp, mask)
    if not omega:
        raise InfeasibleMarginsError("Ω が空です", details=mp.to_dict())
    rng = rng if rng is not None else np.random.default_rng()
    return omega[int(rng.integers(len(omega)))].copy()


def tv_report(
    mp: MarginPair,
    h: Heuristic,
    mask: Optional[StructuralZeroMask] = None,
    **options
) -> Dict[str, float]:
    """
    提案分布と Ω 上の一様分布の全変動距離

    ½ Σ_{z∈Ω} |Q(z) - 1/N| + ½ (1 - Σ_{z∈Ω} Q(z))
    第2項は Ω の外に漏れた確率（台が厳密なら 0）。

    Returns:
        {'tv': 距離, 'N': |Ω|, 'q_total': Σ_{z∈Ω} Q(z)}
    """
    omega = enumerate_omega(mp, mask)
    if not omega:
        raise InfeasibleMarginsError("Ω が空です", details=mp.to_dict())
    sampler = ProposalSampler(mp, h, mask, **options)
    q = np.exp(np.array([sampler.evaluate(z) for z in omega]))
    uniform = 1.0 / len(omega)
    q_total = float(q.sum())
    distance = 0.5 * float(np.abs(q - uniform).sum()) + 0.5 * max(0.0, 1.0 - q_total)
    app_logger.info(f"全変動距離: {distance:.6g} (|Ω|={len(omega)}, heuristic={Heuristic(h).value})")
    return {'tv': distance, 'N': len(omega), 'q_total': q_total}


def tv_distance(
    mp: MarginPair,
    h: Heuristic,
    mask: Optional[StructuralZeroMask] = None,
    **options
) -> float:
    return tv_report(mp, h, mask, **options)['tv']


def log_count(count: ExactCount) -> float:
    return count.log
