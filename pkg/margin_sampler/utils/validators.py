"""
入力ファイルの解析とバリデーション
"""
from typing import Iterable, List, Optional, Tuple

import numpy as np

from ..models.margins import MarginPair
from ..models.mask import StructuralZeroMask
from .error_handlers import MarginParseError, ValidationError


def _content_lines(text: str) -> Iterable[Tuple[int, str]]:
    """(行番号, 内容)。空行と '#' で始まる行は飛ばす"""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith('#'):
            yield number, line


def _read_text(path: str) -> str:
    try:
        with open(path, encoding='utf-8') as f:
            return f.read()
    except OSError as e:
        raise ValidationError(f"ファイルを読み込めません: {path} ({e.strerror})",
                              error_code="FILE_READ_ERROR", details={'path': path})


class Validators:
    """バリデーションクラス"""

    @staticmethod
    def validate_integer_range(value: int, field_name: str, min_value: int = None, max_value: int = None) -> None:
        """整数範囲のバリデーション"""
        if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
            raise ValidationError(f"{field_name}は整数である必要があります")

        if min_value is not None and value < min_value:
            raise ValidationError(f"{field_name}は{min_value}以上である必要があります")

        if max_value is not None and value > max_value:
            raise ValidationError(f"{field_name}は{max_value}以下である必要があります")

    @staticmethod
    def _parse_integers(line: str, number: int, path: Optional[str], what: str) -> List[int]:
        try:
            values = [int(token) for token in line.split()]
        except ValueError:
            raise MarginParseError(f"{what}に整数でない値があります: '{line}'", line=number, path=path)
        if any(v < 0 for v in values):
            raise MarginParseError(f"{what}に負の値があります", line=number, path=path)
        return values

    @staticmethod
    def parse_margins(text: str, path: Optional[str] = None) -> MarginPair:
        """
        1行目 "m n"、2行目に m 個の行和、3行目に n 個の列和。
        '#' で始まる行と空行は無視する。
        """
        lines = list(_content_lines(text))
        if len(lines) < 3:
            last = lines[-1][0] if lines else 1
            raise MarginParseError("周辺和ファイルには 'm n'、行和、列和の3行が必要です", line=last, path=path)

        (n1, header), (n2, row_line), (n3, col_line) = lines[:3]
        dims = Validators._parse_integers(header, n1, path, "ヘッダ")
        if len(dims) != 2 or dims[0] < 1 or dims[1] < 1:
            raise MarginParseError("ヘッダは正の整数2個 'm n' である必要があります", line=n1, path=path)
        m, n = dims

        r = Validators._parse_integers(row_line, n2, path, "行和")
        if len(r) != m:
            raise MarginParseError(f"行和の個数が {len(r)} ですが m = {m} です", line=n2, path=path)
        c = Validators._parse_integers(col_line, n3, path, "列和")
        if len(c) != n:
            raise MarginParseError(f"列和の個数が {len(c)} ですが n = {n} です", line=n3, path=path)

        if len(lines) > 3:
            raise MarginParseError("周辺和の後に余分な行があります", line=lines[3][0], path=path)
        return MarginPair(tuple(r), tuple(c))

    @staticmethod
    def read_margins(path: str) -> MarginPair:
        return Validators.parse_margins(_read_text(path), path=path)

    @staticmethod
    def parse_mask(text: str, m: int, n: int, path: Optional[str] = None) -> StructuralZeroMask:
        """各行 "i j"（1始まり）の構造的ゼロの位置"""
        positions = []
        for number, line in _content_lines(text):
            values = Validators._parse_integers(line, number, path, "マスクの位置")
            if len(values) != 2:
                raise MarginParseError("マスクの各行は 'i j' の2個の整数である必要があります", line=number, path=path)
            i, j = values
            if not (1 <= i <= m and 1 <= j <= n):
                raise MarginParseError(f"位置 ({i}, {j}) が {m}x{n} の範囲外です", line=number, path=path)
            positions.append((i - 1, j - 1))
        return StructuralZeroMask.from_positions(positions, m, n)

    @staticmethod
    def read_mask(path: str, m: int, n: int) -> StructuralZeroMask:
        return Validators.parse_mask(_read_text(path), m, n, path=path)

    @staticmethod
    def parse_matrices(text: str, path: Optional[str] = None) -> List[np.ndarray]:
        """0/1 の行列。複数の行列は空行で区切る"""
        matrices: List[np.ndarray] = []
        block: List[List[int]] = []
        start = None

        def flush():
            if not block:
                return
            widths = {len(row) for row in block}
            if len(widths) != 1:
                raise MarginParseError("行列の行の長さがそろっていません", line=start, path=path)
            matrices.append(np.array(block, dtype=np.int64))
            block.clear()

        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if line.startswith('#'):
                continue
            if not line:
                flush()
                continue
            tokens = line.split()
            if any(t not in ('0', '1') for t in tokens):
                raise MarginParseError(f"行列の要素は 0 か 1 である必要があります: '{line}'", line=number, path=path)
            if not block:
                start = number
            block.append([int(t) for t in tokens])
        flush()

        if not matrices:
            raise MarginParseError("行列がありません", line=1, path=path)
        return matrices

    @staticmethod
    def read_matrices(path: str) -> List[np.ndarray]:
        return Validators.parse_matrices(_read_text(path), path=path)
