"""
列ごとの連鎖（部分和のマルコフ連鎖）と標本行列のデータモデル
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class ColumnChainFactors:
    """因子 h_i の対数。stay[s, i] は s_i = s_{i-1} = s、step[s, i] は s_i = s + 1"""
    stay: np.ndarray
    step: np.ndarray

    @property
    def c1(self) -> int:
        return self.stay.shape[0] - 1

    @property
    def m(self) -> int:
        return self.stay.shape[1]

    def shifted(self, log_scale: float) -> 'ColumnChainFactors':
        return ColumnChainFactors(self.stay + log_scale, self.step + log_scale)


@dataclass(frozen=True, eq=False)
class ColumnChain:
    """後ろ向きメッセージ β と遷移確率 π（いずれも対数）"""
    beta_stay: np.ndarray
    beta_step: np.ndarray
    log_pi_stay: np.ndarray
    log_pi_step: np.ndarray

    @property
    def c1(self) -> int:
        return self.beta_stay.shape[0] - 1

    @property
    def m(self) -> int:
        return self.beta_stay.shape[1]


@dataclass(frozen=True, eq=False)
class SampledMatrix:
    """二値行列とその提案確率の対数 log Q(z)"""
    entries: np.ndarray
    log_q: float
    index: Optional[int] = None

    @property
    def log_weight(self) -> float:
        return -self.log_q

    @property
    def shape(self):
        return self.entries.shape

    def to_dict(self) -> dict:
        return {
            'index': self.index,
            'log_q': self.log_q,
            'entries': self.entries.tolist()
        }


@dataclass
class OperationCounter:
    """動的計画法で触れたセル数の計測"""
    cells: int = 0
    columns: int = 0
    history: list = field(default_factory=list)

    def add(self, cells: int) -> None:
        self.cells += int(cells)
        self.columns += 1

    def checkpoint(self) -> int:
        """現在までのセル数を記録して返す"""
        self.history.append(self.cells)
        return self.cells
