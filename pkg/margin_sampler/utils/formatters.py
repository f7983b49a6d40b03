"""
フォーマッター機能
"""
import math
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

LOG10 = math.log(10.0)


class Formatters:
    """フォーマッタークラス"""

    @staticmethod
    def format_log_number(log_value: float, digits: int = 6) -> str:
        """exp(log_value) を「仮数 e 指数」で表す。浮動小数点の範囲を超えても表示できる"""
        if log_value == -math.inf:
            return "0"
        if math.isnan(log_value):
            return "nan"
        if log_value == math.inf:
            return "inf"
        log10_value = log_value / LOG10
        exponent = math.floor(log10_value)
        mantissa = 10.0 ** (log10_value - exponent)
        if round(mantissa, digits - 1) >= 10.0:
            mantissa /= 10.0
            exponent += 1
        return f"{mantissa:.{digits - 1}f}e{exponent:+d}"

    @staticmethod
    def format_estimate(log_mean: float, log_se: float) -> str:
        """W̄ ± S_W̄"""
        return f"{Formatters.format_log_number(log_mean)} ± {Formatters.format_log_number(log_se, digits=3)}"

    @staticmethod
    def format_float(value: Optional[float], digits: int = 6) -> str:
        if value is None:
            return ""
        if isinstance(value, float) and math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{digits}g}"

    @staticmethod
    def format_matrix(z: np.ndarray) -> str:
        """m 行の空白区切り 0/1"""
        return "\n".join(" ".join(str(int(v)) for v in row) for row in np.asarray(z))

    @staticmethod
    def format_matrices(matrices: Iterable[np.ndarray]) -> str:
        """空行区切りで連結"""
        return "\n\n".join(Formatters.format_matrix(z) for z in matrices) + "\n"

    @staticmethod
    def format_weight_line(index: int, log_q: float) -> str:
        """重みログの1行 "index logQ"（有効数字17桁）"""
        return f"{index} {log_q:.17g}"

    @staticmethod
    def format_key_values(values: Dict[str, Any]) -> str:
        """機械可読な key=value 行"""
        lines = []
        for key, value in values.items():
            if isinstance(value, float):
                value = repr(value) if math.isfinite(value) else ("inf" if value > 0 else ("-inf" if value < 0 else "nan"))
            lines.append(f"{key}={value}")
        return "\n".join(lines)

    @staticmethod
    def format_header(values: Dict[str, Any]) -> str:
        """出力ファイル先頭の '# key=value' 行"""
        return "\n".join(f"# {key}={value}" for key, value in values.items())

    @staticmethod
    def format_table(records: List[Dict[str, Any]]) -> str:
        """人が読むための表"""
        if not records:
            return ""
        return pd.DataFrame(records).to_string(index=False)
