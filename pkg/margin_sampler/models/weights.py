"""
重要度重みの要約データモデル
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

# exp() が有限に収まる上限
LOG_FLOAT_MAX = float(np.log(np.finfo(float).max))


def exp_or_inf(log_value: float) -> float:
    if log_value > LOG_FLOAT_MAX:
        return math.inf
    return math.exp(log_value)


@dataclass(frozen=True, eq=False)
class WeightSummary:
    """対数重み log W_k = -log Q(Z_k) と診断量"""
    count: int
    log_delta: float
    cv2_hat: float
    log_mean: float
    log_se: float
    log_weights: Optional[np.ndarray] = None

    @property
    def delta_hat(self) -> float:
        """最大重み / 最小重み。浮動小数点の範囲を超える場合は inf"""
        return exp_or_inf(self.log_delta)

    @property
    def mean(self) -> float:
        return exp_or_inf(self.log_mean)

    def to_dict(self) -> dict:
        return {
            'count': self.count,
            'delta_hat': self.delta_hat,
            'log_delta': self.log_delta,
            'cv2_hat': self.cv2_hat,
            'log_mean': self.log_mean,
            'log_se': self.log_se
        }


@dataclass
class WeightAccumulator:
    """併合可能な重みの集計 (count, log Σw, log Σw², min, max)"""
    count: int = 0
    log_sum: float = -math.inf
    log_sum_sq: float = -math.inf
    log_min: float = math.inf
    log_max: float = -math.inf

    def add(self, log_weight: float) -> None:
        log_weight = float(log_weight)
        self.count += 1
        self.log_sum = float(np.logaddexp(self.log_sum, log_weight))
        self.log_sum_sq = float(np.logaddexp(self.log_sum_sq, 2.0 * log_weight))
        self.log_min = min(self.log_min, log_weight)
        self.log_max = max(self.log_max, log_weight)

    def add_many(self, log_weights) -> None:
        for value in np.asarray(log_weights, dtype=float):
            self.add(value)

    def merge(self, other: 'WeightAccumulator') -> 'WeightAccumulator':
        return WeightAccumulator(
            count=self.count + other.count,
            log_sum=float(np.logaddexp(self.log_sum, other.log_sum)),
            log_sum_sq=float(np.logaddexp(self.log_sum_sq, other.log_sum_sq)),
            log_min=min(self.log_min, other.log_min),
            log_max=max(self.log_max, other.log_max)
        )

    @property
    def log_delta(self) -> float:
        return self.log_max - self.log_min if self.count else 0.0

    def summary(self) -> WeightSummary:
        """
        cv^2 = N/(N-1) * (N Σw² / (Σw)² - 1)
        S_W^2 = W̄² cv^2、 S_W̄ = sqrt(S_W^2 / N)
        """
        n = self.count
        log_mean = self.log_sum - math.log(n)
        ratio = math.exp(self.log_sum_sq + math.log(n) - 2.0 * self.log_sum)
        cv2 = max(0.0, n / (n - 1) * (ratio - 1.0)) if n > 1 else 0.0
        log_se = log_mean + 0.5 * math.log(cv2 / n) if cv2 > 0 else -math.inf
        return WeightSummary(count=n, log_delta=self.log_delta, cv2_hat=cv2,
                             log_mean=log_mean, log_se=log_se)


@dataclass(frozen=True, eq=False)
class DeltaMaxResult:
    """行和一様生成による外部一様性チェックの結果"""
    heuristic: str
    log_deltas: np.ndarray
    log_q0: np.ndarray
    column_sums: List[tuple] = field(default_factory=list)

    @property
    def replicates(self) -> int:
        return int(self.log_deltas.size)

    @property
    def log_delta_max(self) -> float:
        return float(self.log_deltas.max()) if self.log_deltas.size else 0.0

    @property
    def delta_max(self) -> float:
        return exp_or_inf(self.log_delta_max)

    def to_dict(self) -> dict:
        return {
            'heuristic': self.heuristic,
            'replicates': self.replicates,
            'delta_max': self.delta_max,
            'log_delta_max': self.log_delta_max
        }


@dataclass(frozen=True)
class DeltaStarResult:
    """敵対的行列 z* を含めた重み比"""
    log_delta_star: float
    log_weight_star: float
    log_delta_internal: float

    @property
    def delta_star(self) -> float:
        return exp_or_inf(self.log_delta_star)

    @property
    def delta_internal(self) -> float:
        return exp_or_inf(self.log_delta_internal)

    def to_dict(self) -> dict:
        return {
            'delta_star': self.delta_star,
            'log_delta_star': self.log_delta_star,
            'delta_internal': self.delta_internal,
            'log_weight_star': self.log_weight_star
        }
