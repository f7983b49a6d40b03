"""
ヘルパー関数
"""
import hashlib
import os
from typing import Any, List, Sequence

import numpy as np

from ..models.margins import MarginPair
from ..models.mask import StructuralZeroMask


def ensure_directory_exists(directory_path: str) -> None:
    """ディレクトリが存在しない場合は作成"""
    if directory_path and not os.path.exists(directory_path):
        os.makedirs(directory_path, exist_ok=True)


def chunk_list(lst: Sequence[Any], chunk_size: int) -> List[Sequence[Any]]:
    """リストを指定サイズのチャンクに分割"""
    chunk_size = max(1, int(chunk_size))
    return [lst[i:i + chunk_size] for i in range(0, len(lst), chunk_size)]


def make_stream(seed: int, *keys: int) -> np.random.Generator:
    """
    (seed, keys) から決まる独立な乱数ストリーム。
    Philox はカウンタベースなので、描画 k のストリームは他の描画の有無や順序に依存しない。
    """
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(sequence))


def margins_hash(mp: MarginPair, mask: StructuralZeroMask = None) -> str:
    """周辺和（とマスク）の SHA-256"""
    digest = hashlib.sha256()
    digest.update(f"{mp.m} {mp.n}\n".encode())
    digest.update((" ".join(map(str, mp.r)) + "\n").encode())
    digest.update((" ".join(map(str, mp.c)) + "\n").encode())
    if mask is not None:
        for i, j in sorted(mask.positions):
            digest.update(f"{i + 1} {j + 1}\n".encode())
    return digest.hexdigest()


def chunk_size_for(total: int, jobs: int) -> int:
    """ジョブ数に応じたチャンクサイズ"""
    jobs = max(1, int(jobs))
    return max(1, -(-int(total) // (jobs * 4)))
