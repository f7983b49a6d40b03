"""
外部一様性チェック: 行和一様生成による Δ̂_max と敵対的行列 z* による Δ̂*
"""
import math
from typing import Callable, List, Optional, Sequence

import numpy as np

from ..config.logging_config import app_logger
from ..models.margins import MarginPair
from ..models.profile import Heuristic
from ..models.weights import DeltaMaxResult, DeltaStarResult, WeightAccumulator
from ..utils.error_handlers import ConstructionFailedError, ShapeError, SupportError, ValidationError
from ..utils.helpers import make_stream
from .dp_sampler_service import ProposalSampler
from .weight_service import validate_log_weights

# ストリームの鍵: (seed, 1, ℓ) は Z0、(seed, 2, ℓ, k) は提案分布からの描画
_KEY_UNIFORM = 1
_KEY_PROPOSAL = 2


def uniform_given_rowsums(r: Sequence[int], n: int, rng: np.random.Generator) -> np.ndarray:
    """各行を n 列から r_i 個の一様な部分集合として独立に選ぶ"""
    r = np.asarray(r, dtype=np.int64)
    if np.any(r < 0) or np.any(r > n):
        raise ValidationError(f"行和は 0 以上 {n} 以下である必要があります")
    z = np.zeros((r.size, n), dtype=np.int64)
    for i, ri in enumerate(r.tolist()):
        if ri:
            z[i, rng.choice(n, size=ri, replace=False)] = 1
    return z


def delta_max_experiment(
    r: Sequence[int],
    n: int,
    replicates: int,
    count: int,
    h: Heuristic,
    seed: int = 0,
    jobs: int = 1,
    on_replicate: Optional[Callable[[int, float, float, WeightAccumulator], None]] = None,
    **options
) -> DeltaMaxResult:
    """
    ℓ = 1..L について Z0ℓ を行和一様に生成し、その列和 Cℓ の上で N 個の提案標本を引く。
    Δ̂ℓ は元の観測 Q(Z0ℓ)^-1 を含めた最大・最小重みの比。
    """
    if replicates < 1 or count < 0:
        raise ValidationError("L は1以上、N は0以上である必要があります",
                              details={'L': replicates, 'N': count})
    h = Heuristic(h)
    log_deltas: List[float] = []
    log_q0: List[float] = []
    column_sums: List[tuple] = []

    for ell in range(replicates):
        z0 = uniform_given_rowsums(r, n, make_stream(seed, _KEY_UNIFORM, ell))
        mp = MarginPair(tuple(int(v) for v in r), tuple(int(v) for v in z0.sum(axis=0)))
        sampler = ProposalSampler(mp, h, **options)

        lq0 = sampler.evaluate(z0)
        if lq0 == -math.inf:
            raise SupportError("一様生成した Z0 が提案分布の台の外にあります",
                               details={'replicate': ell + 1})

        accumulator = WeightAccumulator()
        accumulator.add(-lq0)
        if count > 0:
            samples = sampler.sample_many(count, seed, jobs=jobs, key_prefix=(_KEY_PROPOSAL, ell))
            accumulator.add_many([s.log_weight for s in samples])

        log_deltas.append(accumulator.log_delta)
        log_q0.append(lq0)
        column_sums.append(mp.c)
        app_logger.debug(f"反復 {ell + 1}/{replicates}: log Δ̂ = {accumulator.log_delta:.6g}")
        if on_replicate is not None:
            on_replicate(ell, accumulator.log_delta, lq0, accumulator)

    result = DeltaMaxResult(
        heuristic=h.value,
        log_deltas=np.array(log_deltas),
        log_q0=np.array(log_q0),
        column_sums=column_sums
    )
    app_logger.info(f"Δ̂_max 実験が完了しました: L={replicates}, N={count}, log Δ̂_max={result.log_delta_max:.6g}")
    return result


def adversarial_block(m: int, n: int, r1: int) -> np.ndarray:
    """r1 × r1 の1のブロックを対角に並べた z*"""
    if m != n:
        raise ShapeError(f"ブロック構成には正方行列が必要です（{m}x{n}）")
    if r1 < 1 or n % r1:
        raise ShapeError(f"r1={r1} は n={n} を割り切る必要があります", error_code="NOT_DIVISIBLE")
    return np.kron(np.eye(n // r1, dtype=np.int64), np.ones((r1, r1), dtype=np.int64))


def adversarial_greedy(r: Sequence[int], c: Sequence[int]) -> np.ndarray:
    """
    各列の c_j 個の1を、まだ行和に達していない行のうち最後の c_j 行に置く。
    置けない列が出たら失敗。
    """
    r = np.asarray(r, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    if np.any(np.diff(r) > 0) or np.any(np.diff(c) > 0):
        raise ValidationError("周辺和は降順に並んでいる必要があります")

    z = np.zeros((r.size, c.size), dtype=np.int64)
    filled = np.zeros(r.size, dtype=np.int64)
    for j, cj in enumerate(c.tolist()):
        available = np.nonzero(filled < r)[0]
        if available.size < cj:
            raise ConstructionFailedError(f"第{j + 1}列に{cj}個の1を置けません",
                                          details={'column': j + 1, 'available': int(available.size)})
        if cj:
            rows = available[available.size - cj:]
            z[rows, j] = 1
            filled[rows] += 1
    if not np.array_equal(filled, r):
        raise ConstructionFailedError("行和を満たせませんでした",
                                      details={'missing': int((r - filled).sum())})
    return z


def delta_star_from_log(log_weight_star: float, log_weights) -> DeltaStarResult:
    """Δ̂* = max{Q(z*)^-1, W_1..W_N} / min{...}"""
    if not math.isfinite(log_weight_star):
        raise SupportError("z* が提案分布の台の外にあります（重みが有限でない）")
    values = validate_log_weights(log_weights)
    internal = float(values.max() - values.min()) if values.size else 0.0
    top = max(log_weight_star, float(values.max())) if values.size else log_weight_star
    bottom = min(log_weight_star, float(values.min())) if values.size else log_weight_star
    return DeltaStarResult(
        log_delta_star=top - bottom,
        log_weight_star=float(log_weight_star),
        log_delta_internal=internal
    )


def delta_star(z_star, sampler: ProposalSampler, log_weights) -> DeltaStarResult:
    lq = sampler.evaluate(z_star)
    if lq == -math.inf:
        raise SupportError("z* が提案分布の台の外にあります", details={'shape': list(np.shape(z_star))})
    return delta_star_from_log(-lq, log_weights)
