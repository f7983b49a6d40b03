"""
周辺和データモデル
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Sequence, Tuple

import numpy as np

from ..utils.error_handlers import ShapeError, ValidationError


def _as_counts(values: Sequence[int], name: str) -> Tuple[int, ...]:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ShapeError(f"{name}は1次元の整数列である必要があります", details={'shape': list(arr.shape)})
    if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValidationError(f"{name}は整数である必要があります")
    counts = tuple(int(v) for v in arr)
    if any(v < 0 for v in counts):
        raise ValidationError(f"{name}に負の値があります", details={name: list(counts)})
    return counts


@dataclass(frozen=True)
class MarginPair:
    """行和 r と列和 c の組"""
    r: Tuple[int, ...]
    c: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'r', _as_counts(self.r, 'r'))
        object.__setattr__(self, 'c', _as_counts(self.c, 'c'))
        if not self.r or not self.c:
            raise ShapeError("行数と列数は1以上である必要があります",
                             details={'m': len(self.r), 'n': len(self.c)})

    @property
    def m(self) -> int:
        return len(self.r)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def total(self) -> int:
        return sum(self.r)

    @property
    def rows(self) -> np.ndarray:
        return np.asarray(self.r, dtype=np.int64)

    @property
    def cols(self) -> np.ndarray:
        return np.asarray(self.c, dtype=np.int64)

    @cached_property
    def feasible(self) -> bool:
        """Gale-Ryser 条件による実現可能性"""
        from ..services.margin_service import gale_ryser_feasible
        return gale_ryser_feasible(self)

    def rows_sorted(self) -> bool:
        return all(a >= b for a, b in zip(self.r, self.r[1:]))

    def cols_sorted(self) -> bool:
        return all(a >= b for a, b in zip(self.c, self.c[1:]))

    def to_dict(self) -> dict:
        """辞書形式に変換"""
        return {'m': self.m, 'n': self.n, 'r': list(self.r), 'c': list(self.c)}

    @classmethod
    def from_dict(cls, data: dict) -> 'MarginPair':
        """辞書からインスタンスを作成"""
        return cls(r=tuple(data.get('r', ())), c=tuple(data.get('c', ())))


@dataclass(frozen=True, eq=False)
class RowOrdering:
    """行の並べ替え。sorted[k] = original[permutation[k]]"""
    permutation: np.ndarray
    inverse: np.ndarray = field(default=None)

    def __post_init__(self):
        perm = np.asarray(self.permutation, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(perm.size)):
            raise ValidationError("permutation が全単射ではありません")
        inverse = np.empty_like(perm)
        inverse[perm] = np.arange(perm.size)
        object.__setattr__(self, 'permutation', perm)
        object.__setattr__(self, 'inverse', inverse)

    def apply(self, values) -> np.ndarray:
        """元の順序の値を並べ替え後の順序にする"""
        return np.asarray(values)[self.permutation]

    def restore(self, values) -> np.ndarray:
        """並べ替え後の順序の値（行列なら行）を元の順序に戻す"""
        return np.asarray(values)[self.inverse]


@dataclass(frozen=True, eq=False)
class ColumnSupport:
    """第1列の台: 各行の許容値 A_i と部分和の区間 B_i = [lower_i, upper_i]"""
    allow_zero: np.ndarray
    allow_one: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @property
    def m(self) -> int:
        return int(self.lower.size)

    @property
    def c1(self) -> int:
        return int(self.upper[-1])

    @property
    def allowed(self) -> Tuple[FrozenSet[int], ...]:
        return tuple(
            frozenset(v for v, ok in ((0, z), (1, o)) if ok)
            for z, o in zip(self.allow_zero.tolist(), self.allow_one.tolist())
        )

    def contains(self, b: Sequence[int]) -> bool:
        """b ∈ A かつ部分和 s ∈ B"""
        b = np.asarray(b, dtype=np.int64)
        if b.shape != (self.m,) or np.any((b != 0) & (b != 1)):
            return False
        ok_values = np.where(b == 1, self.allow_one, self.allow_zero)
        s = np.cumsum(b)
        return bool(np.all(ok_values) and np.all(s >= self.lower) and np.all(s <= self.upper))

    def truncate(self, k: int) -> 'ColumnSupport':
        """先頭 k 行に制限し、k 行目で部分和を c1 に固定する"""
        lower = self.lower[:k].copy()
        upper = self.upper[:k].copy()
        lower[-1] = upper[-1] = self.c1
        return ColumnSupport(self.allow_zero[:k].copy(), self.allow_one[:k].copy(), lower, upper)
