"""
実行設定と厳密数のデータモデル
"""
import math
from dataclasses import dataclass, asdict
from typing import Optional


@dataclass(frozen=True)
class ExactCount:
    """|Ω(r, c)| または |Ω(r, c, a)| の厳密値（任意精度整数）"""
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("厳密数は非負である必要があります")

    @property
    def log(self) -> float:
        return math.log(self.value) if self.value > 0 else -math.inf

    def __int__(self) -> int:
        return self.value

    def to_dict(self) -> dict:
        return {'value': str(self.value), 'log': self.log}


@dataclass
class RunConfig:
    """CLI 実行設定"""
    command: str
    margins_path: Optional[str] = None
    mask_path: Optional[str] = None
    zero_diagonal: bool = False
    heuristic: Optional[str] = None
    sample_count: int = 1000
    seed: int = 0
    out: Optional[str] = None
    jobs: int = 1
    keep_column_order: bool = False
    unsafe_mask: bool = False
    db_path: Optional[str] = None
    mode: Optional[str] = None
    replicates: int = 1
    matrix_path: Optional[str] = None
    output_format: str = 'concat'

    def to_dict(self) -> dict:
        return asdict(self)
