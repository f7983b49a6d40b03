"""
動的計画法による列ごとの逐次重点サンプリング
"""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..config.logging_config import app_logger
from ..config.settings import app_settings
from ..models.chain import ColumnChain, ColumnChainFactors, OperationCounter, SampledMatrix
from ..models.margins import ColumnSupport, MarginPair
from ..models.mask import StructuralZeroMask
from ..models.profile import BernoulliProfile, Heuristic
from ..utils.error_handlers import (
    DeadEndError, EnumerationDomainError, InfeasibleMarginsError, ShapeError, ValidationError
)
from ..utils.helpers import chunk_list, chunk_size_for, make_stream
from .enumeration_service import bernoulli_profile, clamp_profile
from .margin_service import first_column_support, gale_ryser_feasible, single_column_fill, sort_rows
from .szero_service import first_column_support_sz, sort_rows_sz, unsafe_column_support

NEG_INF = -np.inf


def build_factors(profile: BernoulliProfile, support: ColumnSupport) -> ColumnChainFactors:
    """
    h_i(s, s)   = log(1 - p_i)  (0 ∈ A_i かつ s ∈ B_i)
    h_i(s, s+1) = log p_i       (1 ∈ A_i かつ s+1 ∈ B_i)
    それ以外は -inf
    """
    if profile.m != support.m:
        raise ShapeError(f"プロファイル長 {profile.m} と台の行数 {support.m} が一致しません")
    s = np.arange(support.c1 + 1)[:, None]
    in_b_stay = (s >= support.lower[None, :]) & (s <= support.upper[None, :])
    in_b_step = (s + 1 >= support.lower[None, :]) & (s + 1 <= support.upper[None, :])
    with np.errstate(invalid='ignore'):
        stay = np.where(support.allow_zero[None, :] & in_b_stay, profile.log_q[None, :], NEG_INF)
        step = np.where(support.allow_one[None, :] & in_b_step, profile.log_p[None, :], NEG_INF)
    return ColumnChainFactors(stay=stay, step=step)


def _normalize(stay: np.ndarray, step: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    total = np.logaddexp(stay, step)
    finite = np.isfinite(total)
    log_stay = np.full_like(stay, NEG_INF)
    log_step = np.full_like(step, NEG_INF)
    log_stay[finite] = stay[finite] - total[finite]
    log_step[finite] = step[finite] - total[finite]
    return log_stay, log_step


def backward_pass(factors: ColumnChainFactors, counter: Optional[OperationCounter] = None) -> ColumnChain:
    """
    β_m = h_m、β_i(s_{i-1}, s_i) = h_i(s_{i-1}, s_i) + logsumexp_{s_{i+1}} β_{i+1}(s_i, ·)。
    各段で最大値を引いて尺度を揃え、π_i は β_i を s_i について正規化したもの。
    """
    c1, m = factors.c1, factors.m
    beta_stay = np.empty_like(factors.stay)
    beta_step = np.empty_like(factors.step)
    beta_stay[:, -1] = factors.stay[:, -1]
    beta_step[:, -1] = factors.step[:, -1]

    for i in range(m - 1, -1, -1):
        if i < m - 1:
            # β_{i+1}(s, ·) の合計。s_i = s+1 の分は1つずらして参照する
            ahead = np.logaddexp(beta_stay[:, i + 1], beta_step[:, i + 1])
            ahead_next = np.append(ahead[1:], NEG_INF)
            beta_stay[:, i] = factors.stay[:, i] + ahead
            beta_step[:, i] = factors.step[:, i] + ahead_next
        top = max(beta_stay[:, i].max(), beta_step[:, i].max())
        if np.isfinite(top):
            beta_stay[:, i] -= top
            beta_step[:, i] -= top

    if counter is not None:
        counter.add(m * (c1 + 1))

    if not np.isfinite(np.logaddexp(beta_stay[0, 0], beta_step[0, 0])):
        raise DeadEndError("s_0 = 0 から s_m = c_1 への有効な経路がありません",
                           details={'m': m, 'c1': c1})

    log_pi_stay, log_pi_step = _normalize(beta_stay, beta_step)
    return ColumnChain(beta_stay=beta_stay, beta_step=beta_step,
                       log_pi_stay=log_pi_stay, log_pi_step=log_pi_step)


def sample_column(chain: ColumnChain, rng: np.random.Generator) -> Tuple[np.ndarray, float]:
    """π から部分和を前向きに生成し、列 b とその対数確率を返す"""
    m = chain.m
    b = np.zeros(m, dtype=np.int64)
    log_u = np.log(rng.random(m))
    s = 0
    log_prob = 0.0
    for i in range(m):
        step = chain.log_pi_step[s, i]
        if log_u[i] < step:
            b[i] = 1
            log_prob += step
            s += 1
        else:
            log_prob += chain.log_pi_stay[s, i]
    return b, float(log_prob)


def eval_column(chain: ColumnChain, b: Sequence[int]) -> float:
    """b の部分和の経路に沿った Σ log π。台の外なら -inf"""
    b = np.asarray(b)
    if b.shape != (chain.m,) or np.any((b != 0) & (b != 1)):
        return -math.inf
    s = 0
    log_prob = 0.0
    for i, bit in enumerate(b.tolist()):
        if bit:
            if s + 1 > chain.c1:
                return -math.inf
            log_prob += chain.log_pi_step[s, i]
            s += 1
        else:
            log_prob += chain.log_pi_stay[s, i]
        if log_prob == -math.inf:
            return -math.inf
    return float(log_prob)


class ProposalSampler:
    """
    周辺和・ヒューリスティック・マスクを固定した提案分布 Q。
    設定は生成後に変わらないので、並列の描画間で共有できる。
    """

    def __init__(
        self,
        mp: MarginPair,
        heuristic: Heuristic = Heuristic.CGM,
        mask: Optional[StructuralZeroMask] = None,
        keep_column_order: Optional[bool] = None,
        unsafe_mask: bool = False,
        clamp_epsilon: Optional[float] = None,
        counter: Optional[OperationCounter] = None
    ):
        """初期化"""
        self.margins = mp
        self.heuristic = Heuristic(heuristic)
        self.mask = mask
        self.unsafe_mask = unsafe_mask
        self.clamp_epsilon = (app_settings.get_setting('sampler', 'clamp_epsilon', 1e-12)
                              if clamp_epsilon is None else clamp_epsilon)
        self.counter = counter
        if keep_column_order is None:
            keep_column_order = app_settings.get_setting('sampler', 'keep_column_order', False)
        self.keep_column_order = bool(keep_column_order)

        self._validate()

        if self.keep_column_order:
            self.column_order = np.arange(mp.n)
        else:
            self.column_order = np.argsort(-mp.cols, kind='stable')
        self._cols = mp.cols[self.column_order]
        self._mask = mask.a[:, self.column_order] if mask is not None else None

    def _validate(self) -> None:
        mp, mask = self.margins, self.mask
        if self.heuristic.is_sz and mask is None:
            raise ValidationError("構造的ゼロ用のヒューリスティックにはマスクが必要です",
                                  error_code="SZ_WITHOUT_MASK")
        if mask is None:
            if not gale_ryser_feasible(mp):
                raise InfeasibleMarginsError("周辺和が実現不可能です", details=mp.to_dict())
            return

        if (mask.m, mask.n) != (mp.m, mp.n):
            raise ShapeError(f"マスクの形 {mask.m}x{mask.n} が周辺和 {mp.m}x{mp.n} と一致しません")
        if not self.unsafe_mask:
            mask.validate()
            if self.keep_column_order and not mp.cols_sorted():
                raise ValidationError("構造的ゼロがある場合は列を列和の降順で生成する必要があります",
                                      error_code="COLUMN_ORDER_REQUIRED")
        if (mp.total != sum(mp.c) or np.any(mp.rows > mp.n - mask.xi)
                or np.any(mp.cols > mp.m - mask.zeta)):
            raise InfeasibleMarginsError("マスク付きの周辺和が実現不可能です", details=mp.to_dict())

    # ------------------------------------------------------------------
    def sample(self, rng: np.random.Generator, index: Optional[int] = None) -> SampledMatrix:
        """行列を1つ生成し、その log Q を記録する"""
        entries, log_q = self._run(rng=rng)
        return SampledMatrix(entries=entries, log_q=log_q, index=index)

    def evaluate(self, z) -> float:
        """与えられた行列の log Q(z)。台の外なら -inf"""
        z = np.asarray(z)
        mp = self.margins
        if z.shape != (mp.m, mp.n) or np.any((z != 0) & (z != 1)):
            return -math.inf
        _, log_q = self._run(z=z.astype(np.int64))
        return log_q

    def sample_many(self, count: int, seed: int, jobs: int = 1, key_prefix: Tuple[int, ...] = ()) -> List[SampledMatrix]:
        """描画 k にはストリーム (seed, *key_prefix, k) を使う。結果は k の順"""
        indices = list(range(int(count)))
        if jobs == 1 or count < 2:
            samples = [self.sample(make_stream(seed, *key_prefix, k), index=k) for k in indices]
        else:
            chunks = chunk_list(indices, chunk_size_for(count, jobs if jobs > 0 else 8))
            results = Parallel(n_jobs=jobs)(
                delayed(self._sample_chunk)(seed, key_prefix, chunk) for chunk in chunks
            )
            samples = sorted((s for part in results for s in part), key=lambda s: s.index)
        app_logger.info(f"{len(samples)}個の行列を生成しました (heuristic={self.heuristic.value}, seed={seed})")
        return samples

    def _sample_chunk(self, seed: int, key_prefix: Tuple[int, ...], indices: Sequence[int]) -> List[SampledMatrix]:
        return [self.sample(make_stream(seed, *key_prefix, k), index=k) for k in indices]

    # ------------------------------------------------------------------
    def _sorted_step(
        self, r: np.ndarray, cols: np.ndarray, mask_rest: Optional[np.ndarray]
    ) -> Tuple[MarginPair, Optional[StructuralZeroMask], np.ndarray]:
        """残りの周辺和を列ごとに並べ直す。戻り値の順序は並べ替え後 -> 元の行"""
        step_mp = MarginPair(tuple(r), tuple(cols))
        if mask_rest is None:
            sorted_mp, ordering = sort_rows(step_mp)
            return sorted_mp, None, ordering.permutation
        sorted_mp, sorted_mask, ordering = sort_rows_sz(
            step_mp, StructuralZeroMask(mask_rest), allow_general=self.unsafe_mask
        )
        return sorted_mp, sorted_mask, ordering.permutation

    def _column_support(self, mp: MarginPair, mask: Optional[StructuralZeroMask]) -> ColumnSupport:
        if mask is None:
            return first_column_support(mp)
        if self.unsafe_mask and not (mask.is_simple and mp.cols_sorted()):
            return unsafe_column_support(mp, mask)
        return first_column_support_sz(mp, mask)

    def _dead_end(self, column: int, error: Exception):
        if self.unsafe_mask:
            app_logger.warning(f"一般マスクで第{column + 1}列が行き詰まりました")
            raise DeadEndError(f"第{column + 1}列で有効な列がありません（一般マスク）",
                               details={'column': column + 1})
        raise InfeasibleMarginsError("有効な行列が存在しません", details={'column': column + 1}) from error

    def _run(self, rng: Optional[np.random.Generator] = None, z: Optional[np.ndarray] = None):
        """生成（rng）または評価（z）。評価時は z の列の部分和をそのまま使う"""
        mp = self.margins
        m, n = mp.m, mp.n
        r = mp.rows.copy()
        cols = self._cols
        z_sorted = z[:, self.column_order] if z is not None else None
        out = np.zeros((m, n), dtype=np.int64)
        log_q = 0.0

        for j in range(n):
            cj = int(cols[j])
            mask_rest = self._mask[:, j:] if self._mask is not None else None

            if j == n - 1:
                # 残り1列は決定的: b_i = r_i
                b = single_column_fill(r)
                if np.any(r > 1) or b.sum() != cj or (mask_rest is not None and np.any(b[mask_rest[:, 0]] > 0)):
                    if z is not None:
                        return out, -math.inf
                    self._dead_end(j, ValueError("last column"))
                if z is not None and not np.array_equal(z_sorted[:, j], b):
                    return out, -math.inf
                out[:, j] = b
                break

            if cj == 0:
                b = np.zeros(m, dtype=np.int64)
                lp = 0.0
                if z is not None and np.any(z_sorted[:, j] != 0):
                    return out, -math.inf
            else:
                step_mp, step_mask, order = self._sorted_step(r, cols[j:], mask_rest)
                r_sorted = step_mp.rows
                active = int(np.count_nonzero(r_sorted))
                if active < cj:
                    if z is not None:
                        return out, -math.inf
                    self._dead_end(j, ValueError("too few active rows"))

                try:
                    support = self._column_support(step_mp, step_mask)
                    profile = bernoulli_profile(step_mp, self.heuristic, step_mask)
                except (InfeasibleMarginsError, EnumerationDomainError) as e:
                    if z is not None:
                        return out, -math.inf
                    self._dead_end(j, e)

                # 行和 0 の行は末尾にまとまっており、常に 0 を取る
                support = support.truncate(active)
                profile = clamp_profile(profile.take(active), support, self.clamp_epsilon)

                try:
                    chain = backward_pass(build_factors(profile, support), self.counter)
                except DeadEndError as e:
                    if z is not None:
                        return out, -math.inf
                    self._dead_end(j, e)

                if z is None:
                    b_active, lp = sample_column(chain, rng)
                else:
                    b_given = z_sorted[order, j]
                    if np.any(b_given[active:] != 0):
                        return out, -math.inf
                    b_active = b_given[:active]
                    lp = eval_column(chain, b_active)
                    if lp == -math.inf:
                        return out, -math.inf

                b = np.zeros(m, dtype=np.int64)
                b[order[:active]] = b_active

            out[:, j] = b
            r = r - b
            log_q += lp

        entries = np.empty_like(out)
        entries[:, self.column_order] = out
        if self.counter is not None:
            self.counter.checkpoint()
        return entries, float(log_q)


def sample_matrix(
    mp: MarginPair,
    h: Heuristic,
    mask: Optional[StructuralZeroMask] = None,
    rng: Optional[np.random.Generator] = None,
    **options
) -> SampledMatrix:
    """行列を1つ生成する"""
    rng = rng if rng is not None else make_stream(app_settings.get_setting('run', 'seed', 0))
    return ProposalSampler(mp, h, mask, **options).sample(rng)


def eval_matrix(
    mp: MarginPair,
    h: Heuristic,
    mask: Optional[StructuralZeroMask],
    z,
    **options
) -> float:
    """log Q(z) を決定的に再計算する。周辺和が合わなければ -inf"""
    z = np.asarray(z)
    if z.shape != (mp.m, mp.n):
        return -math.inf
    if not (np.array_equal(z.sum(axis=1), mp.rows) and np.array_equal(z.sum(axis=0), mp.cols)):
        return -math.inf
    if mask is not None and np.any(z[mask.a] != 0):
        return -math.inf
    try:
        sampler = ProposalSampler(mp, h, mask, **options)
    except InfeasibleMarginsError:
        return -math.inf
    return sampler.evaluate(z)


def feasible_with_mask(mp: MarginPair, mask: StructuralZeroMask, unsafe_mask: bool = False) -> bool:
    """
    マスク付きの実現可能性。和の条件に加え、第1列の台に s_0 = 0 から s_m = c_1 への経路があるか調べる。

    調べるのは第1列だけ。台の構成は N(r, c, a) > 0 を前提にしているため、
    Ω(r, c, a) が空でも True を返すことがある（False は常に正しい）。
    一般のマスクでは台が厳密でないので必要条件にとどまる。
    厳密な判定が要る小さい問題では exact_count_dp(mp, mask) を使う。
    """
    if (mask.m, mask.n) != (mp.m, mp.n):
        raise ShapeError(f"マスクの形 {mask.m}x{mask.n} が周辺和 {mp.m}x{mp.n} と一致しません")
    if not unsafe_mask:
        mask.validate()
    if (mp.total != sum(mp.c) or np.any(mp.rows > mp.n - mask.xi)
            or np.any(mp.cols > mp.m - mask.zeta)):
        return False
    if mp.n == 1:
        return True

    column_order = np.argsort(-mp.cols, kind='stable')
    sorted_mask = mask.permute_columns(column_order)
    sorted_mp = MarginPair(mp.r, tuple(mp.cols[column_order]))
    step_mp, step_mask, _ = sort_rows_sz(sorted_mp, sorted_mask, allow_general=unsafe_mask)

    if unsafe_mask and not step_mask.is_simple:
        support = unsafe_column_support(step_mp, step_mask)
    else:
        support = first_column_support_sz(step_mp, step_mask)
    try:
        backward_pass(build_factors(BernoulliProfile.constant(step_mp.m, 0.5), support))
    except DeadEndError:
        return False
    return True
