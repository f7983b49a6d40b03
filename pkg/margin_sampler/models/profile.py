"""
ベルヌーイ確率プロファイルのデータモデル
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.special import expit, logit

from ..utils.error_handlers import ValidationError


class Heuristic(str, Enum):
    """p の選び方"""
    CGM = 'cgm'
    BINOMIAL = 'binomial'
    GMW = 'gmw'
    ONEIL = 'oneil'
    CGM_SZ = 'cgm_sz'
    BINOMIAL_SZ = 'binomial_sz'
    ONEIL_SZ = 'oneil_sz'

    @property
    def is_sz(self) -> bool:
        return self.value.endswith('_sz')

    @property
    def base(self) -> 'Heuristic':
        return Heuristic(self.value[:-3]) if self.is_sz else self

    @property
    def sz_variant(self) -> Optional['Heuristic']:
        """構造的ゼロ用の変種（GMW には存在しない）"""
        if self.is_sz:
            return self
        try:
            return Heuristic(f"{self.value}_sz")
        except ValueError:
            return None

    @classmethod
    def from_name(cls, name: str) -> 'Heuristic':
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            choices = ', '.join(h.value for h in cls)
            raise ValidationError(f"不明なヒューリスティック: {name} (選択肢: {choices})",
                                  error_code="UNKNOWN_HEURISTIC")


@dataclass(frozen=True, eq=False)
class BernoulliProfile:
    """行ごとの確率 p を対数オッズ log(p/(1-p)) で保持する"""
    logodds: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.logodds, dtype=float)
        if np.any(np.isnan(arr)):
            raise ValidationError("対数オッズに NaN が含まれています")
        object.__setattr__(self, 'logodds', arr)

    @property
    def m(self) -> int:
        return int(self.logodds.size)

    @property
    def p(self) -> np.ndarray:
        return expit(self.logodds)

    @property
    def log_p(self) -> np.ndarray:
        return -np.logaddexp(0.0, -self.logodds)

    @property
    def log_q(self) -> np.ndarray:
        """log(1 - p)"""
        return -np.logaddexp(0.0, self.logodds)

    @classmethod
    def from_probabilities(cls, p: Sequence[float]) -> 'BernoulliProfile':
        p = np.asarray(p, dtype=float)
        if np.any((p < 0) | (p > 1)):
            raise ValidationError("確率は [0, 1] の範囲である必要があります")
        with np.errstate(divide='ignore'):
            return cls(logit(p))

    @classmethod
    def constant(cls, m: int, p: float) -> 'BernoulliProfile':
        return cls.from_probabilities(np.full(m, p))

    def take(self, k: int) -> 'BernoulliProfile':
        return BernoulliProfile(self.logodds[:k].copy())


@dataclass(frozen=True)
class MomentCache:
    """下降階乗和 [t]_l = Σ t_i (t_i - 1) ... (t_i - l + 1), l = 1, 2, 3"""
    falling_sums: Dict[int, float] = field(default_factory=dict)

    @classmethod
    def from_sequence(cls, t: Sequence[int]) -> 'MomentCache':
        t = np.asarray(t, dtype=float)
        term = np.ones_like(t)
        sums = {}
        for order in (1, 2, 3):
            term = term * (t - (order - 1))
            sums[order] = float(term.sum())
        return cls(falling_sums=sums)

    def __getitem__(self, order: int) -> float:
        return self.falling_sums[order]
