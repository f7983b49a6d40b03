"""
エラーハンドリング機能
"""
from typing import Any, Dict

from ..config.logging_config import app_logger

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class AppError(Exception):
    """アプリケーション固有のエラー"""
    exit_code = EXIT_INTERNAL
    default_code = "APP_ERROR"

    def __init__(self, message: str, error_code: str = None, details: Dict[str, Any] = None):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.default_code
        self.details = details or {}


class InfeasibleMarginsError(AppError):
    """周辺和が実現不可能"""
    exit_code = EXIT_FAILED
    default_code = "INFEASIBLE_MARGINS"


class MaskViolationError(AppError):
    """構造的ゼロのマスクが1行・1列に1個の制約を破っている"""
    exit_code = EXIT_FAILED
    default_code = "MASK_VIOLATION"


class DeadEndError(AppError):
    """動的計画法で有効な経路が存在しない"""
    exit_code = EXIT_FAILED
    default_code = "DEAD_END"


class ConstructionFailedError(AppError):
    """敵対的行列の構成に失敗"""
    exit_code = EXIT_FAILED
    default_code = "CONSTRUCTION_FAILED"


class EnumerationDomainError(AppError):
    """近似数え上げ式の定義域外"""
    exit_code = EXIT_USAGE
    default_code = "DOMAIN_ERROR"


class DegenerateInputError(AppError):
    """統計量を計算できない入力"""
    exit_code = EXIT_USAGE
    default_code = "DEGENERATE_INPUT"


class SizeLimitError(AppError):
    """全列挙のサイズ上限超過"""
    exit_code = EXIT_USAGE
    default_code = "SIZE_LIMIT"


class BudgetExceededError(AppError):
    """メモ化状態数の上限超過"""
    exit_code = EXIT_USAGE
    default_code = "BUDGET_EXCEEDED"


class ShapeError(AppError):
    """入力の形が想定と異なる"""
    exit_code = EXIT_USAGE
    default_code = "SHAPE_ERROR"


class ValidationError(AppError):
    """バリデーション関連のエラー"""
    exit_code = EXIT_USAGE
    default_code = "VALIDATION_ERROR"


class MarginParseError(ValidationError):
    """入力ファイルの解析エラー"""
    default_code = "PARSE_ERROR"

    def __init__(self, message: str, line: int = None, path: str = None, error_code: str = None):
        details = {}
        if line is not None:
            details['line'] = line
        if path is not None:
            details['path'] = path
        prefix = f"{path}:{line}: " if path and line else (f"line {line}: " if line else "")
        super().__init__(f"{prefix}{message}", error_code=error_code, details=details)
        self.line = line


class SupportError(AppError):
    """行列が提案分布の台の外にある"""
    exit_code = EXIT_INTERNAL
    default_code = "SUPPORT_ERROR"


class DatabaseError(AppError):
    """データベース関連のエラー"""
    exit_code = EXIT_INTERNAL
    default_code = "DB_ERROR"


def exit_code_for(error: BaseException) -> int:
    """例外からCLIの終了コードを決定"""
    if isinstance(error, AppError):
        return error.exit_code
    return EXIT_INTERNAL


def log_app_error(error: AppError) -> None:
    """アプリケーションエラーをログ出力"""
    if error.details:
        app_logger.error(f"[{error.error_code}] {error.message} {error.details}")
    else:
        app_logger.error(f"[{error.error_code}] {error.message}")
