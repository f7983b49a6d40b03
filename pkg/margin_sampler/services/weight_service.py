"""
重要度重みの集計サービス: 診断量、数え上げ推定、比推定量
"""
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from ..config.logging_config import app_logger
from ..models.chain import SampledMatrix
from ..models.margins import MarginPair
from ..models.mask import StructuralZeroMask
from ..models.profile import Heuristic
from ..models.weights import WeightSummary
from ..utils.error_handlers import AppError, DegenerateInputError, ShapeError
from .dp_sampler_service import ProposalSampler


def validate_log_weights(log_weights) -> np.ndarray:
    values = np.asarray(log_weights, dtype=float).reshape(-1)
    if np.isnan(values).any() or np.isinf(values).any():
        raise DegenerateInputError("対数重みに有限でない値が含まれています",
                                   details={'count': int(values.size)})
    return values


def log_delta(log_weights) -> float:
    """log Δ̂ = max log W - min log W"""
    values = validate_log_weights(log_weights)
    if values.size == 0:
        return 0.0
    return float(values.max() - values.min())


def summarize(log_weights) -> WeightSummary:
    """
    W_k = exp(u_k + M)、M = max log W として線形領域で2パスの標本分散を取る。
      log W̄    = logsumexp(log W) - log N
      cv^2      = S_W^2 / W̄^2            （S_W^2 は N-1 で割る標本分散）
      log S_W̄  = M + ½ log(S_u^2 / N)
    """
    values = validate_log_weights(log_weights)
    count = int(values.size)
    if count < 2:
        raise DegenerateInputError(f"重みの要約には2個以上の標本が必要です（N={count}）")

    top = float(values.max())
    shifted = np.exp(values - top)
    mean_u = float(shifted.mean())
    var_u = float(shifted.var(ddof=1))
    # 定数重みは 0/0 := 0
    cv2 = var_u / mean_u ** 2 if var_u > 0 else 0.0
    log_mean = float(logsumexp(values) - math.log(count))
    log_se = top + 0.5 * math.log(var_u / count) if var_u > 0 else -math.inf

    return WeightSummary(
        count=count,
        log_delta=float(top - values.min()),
        cv2_hat=cv2,
        log_mean=log_mean,
        log_se=log_se,
        log_weights=values
    )


def log_weights_from_samples(samples: Sequence[SampledMatrix]) -> np.ndarray:
    return np.array([s.log_weight for s in samples], dtype=float)


def estimate_count(
    mp: MarginPair,
    h: Heuristic,
    mask: Optional[StructuralZeroMask] = None,
    count: int = 1000,
    seed: int = 0,
    jobs: int = 1,
    **options
) -> WeightSummary:
    """N 個の標本を生成し、W̄ で N(r, c)（マスクがあれば N(r, c, a)）を推定する"""
    try:
        sampler = ProposalSampler(mp, h, mask, **options)
        samples = sampler.sample_many(count, seed, jobs=jobs)
        summary = summarize(log_weights_from_samples(samples))
    except AppError:
        raise
    except Exception as e:
        app_logger.error(f"数え上げ推定エラー: {e}")
        raise DegenerateInputError(f"数え上げ推定に失敗しました: {e}", error_code="ESTIMATE_FAILED",
                                   details={'heuristic': Heuristic(h).value, 'count': count})

    app_logger.info(
        f"数え上げ推定が完了しました: N={summary.count}, log W̄={summary.log_mean:.6f}, cv^2={summary.cv2_hat:.4g}"
    )
    return summary


def estimate_expectation(
    samples: Sequence,
    log_weights,
    f_values: Union[Callable, Sequence[float]]
) -> float:
    """
    自己正規化推定量 Σ f(Z_k) W_k / Σ W_k。
    f_values は行列を受け取る関数か、標本と同じ長さの値の列。
    """
    values = validate_log_weights(log_weights)
    if values.size == 0:
        raise DegenerateInputError("標本が空です")
    if len(samples) != values.size:
        raise ShapeError(f"標本数 {len(samples)} と重みの数 {values.size} が一致しません")

    if callable(f_values):
        f = np.array([
            f_values(s.entries if isinstance(s, SampledMatrix) else s) for s in samples
        ], dtype=float)
    else:
        f = np.asarray(f_values, dtype=float).reshape(-1)
        if f.size != values.size:
            raise ShapeError(f"f の長さ {f.size} と重みの数 {values.size} が一致しません")

    w = np.exp(values - values.max())
    return float((f * w).sum() / w.sum())
