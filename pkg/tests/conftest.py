"""
共通フィクスチャ
"""
import itertools
from functools import lru_cache

import numpy as np
import pytest

from margin_sampler.models.margins import MarginPair
from margin_sampler.models.mask import StructuralZeroMask

FINCH_R = (14, 13, 14, 10, 12, 2, 10, 1, 10, 11, 6, 2, 17)
FINCH_C = (4, 4, 11, 10, 10, 8, 9, 10, 8, 9, 3, 10, 4, 7, 9, 3, 3)
FINCH_COUNT = 67149106137567626

# 50x100 の偏った周辺和
TILDE_R = (24, 22, 22, 17, 17, 17, 17, 13, 13, 13, 12, 12, 11, 11, 11, 10, 10, 9, 9, 9, 8, 8, 8, 8, 8, 8, 7, 6, 6,
           6, 6, 5, 5, 5, 5, 4, 4, 4, 4, 4, 3, 3, 3, 3, 3, 3, 2, 2, 2, 2)
TILDE_C = (12, 12, 10, 10, 9, 9, 9, 9, 9, 8, 8, 8, 8, 7, 7, 7, 7, 7, 7, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 5, 5, 5,
           5, 5, 5, 5, 5, 5, 5, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 3, 3, 3, 3, 3, 3, 3, 3, 3, 2,
           2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1)


@lru_cache(maxsize=None)
def all_matrices(m: int, n: int) -> np.ndarray:
    """2^(mn) 個すべての m x n 二値行列"""
    bits = np.array(list(itertools.product((0, 1), repeat=m * n)), dtype=np.int64)
    return bits.reshape(-1, m, n)


def brute_force_omega(mp: MarginPair, mask: StructuralZeroMask = None):
    """すべての行列から周辺和（とマスク）を満たすものを選ぶ"""
    z = all_matrices(mp.m, mp.n)
    keep = np.all(z.sum(axis=2) == mp.rows, axis=1) & np.all(z.sum(axis=1) == mp.cols, axis=1)
    if mask is not None:
        keep &= ~np.any(z[:, mask.a], axis=1)
    return list(z[keep])


def random_feasible_instances(count: int, seed: int, max_dim: int = 4, with_mask: bool = False):
    """行列を一様に作ってその周辺和を使うので、必ず実現可能"""
    rng = np.random.default_rng(seed)
    instances = []
    while len(instances) < count:
        m, n = rng.integers(1, max_dim + 1, size=2)
        mask = None
        if with_mask:
            positions = []
            cols = rng.permutation(n)
            for i in range(m):
                if i < n and rng.random() < 0.6:
                    positions.append((i, int(cols[i])))
            mask = StructuralZeroMask.from_positions(positions, m, n)
        z = (rng.random((m, n)) < rng.uniform(0.2, 0.8)).astype(np.int64)
        if mask is not None:
            z[mask.a] = 0
        instances.append((MarginPair(tuple(z.sum(axis=1)), tuple(z.sum(axis=0))), mask))
    return instances


@pytest.fixture
def small_margins():
    """Ω が5個の行列からなる例"""
    return MarginPair((2, 1, 1), (2, 1, 1))


@pytest.fixture
def two_by_two():
    return MarginPair((1, 1), (1, 1))


@pytest.fixture
def derangement():
    """3x3 の対角ゼロ、r = c = (1, 1, 1)"""
    return MarginPair((1, 1, 1), (1, 1, 1)), StructuralZeroMask.zero_diagonal(3, 3)


@pytest.fixture
def finch_margins():
    return MarginPair(FINCH_R, FINCH_C)


@pytest.fixture
def pathological_margins():
    def build(R: int, C: int, m: int, n: int) -> MarginPair:
        return MarginPair((R,) + (1,) * (m - 1), (C,) + (1,) * (n - 1))
    return build


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
