"""
構造的ゼロのマスク
"""
from dataclasses import dataclass
from typing import Iterable, Set, Tuple

import numpy as np

from ..utils.error_handlers import MaskViolationError, ShapeError


@dataclass(frozen=True, eq=False)
class StructuralZeroMask:
    """a[i, j] = True の位置は 0 に固定される（0始まりの添字）"""
    a: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=bool)
        if arr.ndim != 2:
            raise ShapeError("マスクは2次元配列である必要があります", details={'shape': list(arr.shape)})
        object.__setattr__(self, 'a', arr)

    @classmethod
    def from_positions(cls, positions: Iterable[Tuple[int, int]], m: int, n: int) -> 'StructuralZeroMask':
        a = np.zeros((m, n), dtype=bool)
        for i, j in positions:
            if not (0 <= i < m and 0 <= j < n):
                raise ShapeError(f"マスクの位置 ({i + 1}, {j + 1}) が {m}x{n} の範囲外です")
            a[i, j] = True
        return cls(a)

    @classmethod
    def zero_diagonal(cls, m: int, n: int) -> 'StructuralZeroMask':
        return cls(np.eye(m, n, dtype=bool))

    @classmethod
    def empty(cls, m: int, n: int) -> 'StructuralZeroMask':
        return cls(np.zeros((m, n), dtype=bool))

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]

    @property
    def positions(self) -> Set[Tuple[int, int]]:
        return {(int(i), int(j)) for i, j in zip(*np.nonzero(self.a))}

    @property
    def xi(self) -> np.ndarray:
        return self.a.sum(axis=1).astype(np.int64)

    @property
    def zeta(self) -> np.ndarray:
        return self.a.sum(axis=0).astype(np.int64)

    @property
    def y(self) -> np.ndarray:
        """各行の構造的ゼロの列位置。無い行は n"""
        has_zero = self.a.any(axis=1)
        return np.where(has_zero, np.argmax(self.a, axis=1), self.n).astype(np.int64)

    @property
    def is_simple(self) -> bool:
        """各行・各列のゼロが高々1個"""
        return bool(self.xi.max(initial=0) <= 1 and self.zeta.max(initial=0) <= 1)

    def validate(self) -> None:
        if not self.is_simple:
            bad_rows = [int(i) + 1 for i in np.nonzero(self.xi > 1)[0]]
            bad_cols = [int(j) + 1 for j in np.nonzero(self.zeta > 1)[0]]
            raise MaskViolationError(
                "構造的ゼロは各行・各列に高々1個である必要があります（--unsafe-mask で一般のマスクを許可）",
                details={'rows': bad_rows, 'columns': bad_cols}
            )

    def permute_rows(self, permutation) -> 'StructuralZeroMask':
        return StructuralZeroMask(self.a[np.asarray(permutation)])

    def permute_columns(self, permutation) -> 'StructuralZeroMask':
        return StructuralZeroMask(self.a[:, np.asarray(permutation)])

    def drop_first_column(self) -> 'StructuralZeroMask':
        return StructuralZeroMask(self.a[:, 1:])

    def to_dict(self) -> dict:
        return {'m': self.m, 'n': self.n, 'positions': sorted([i + 1, j + 1] for i, j in self.positions)}
