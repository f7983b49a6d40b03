"""
ログ設定

標準出力は行列とレポート専用なので、ログはすべて標準エラーかファイルへ出す。
"""
import os
import sys
from contextlib import contextmanager
from typing import Optional

from loguru import logger

from .settings import AppSettings, app_settings

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<magenta>{extra[command]}</magenta> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
    "<level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {extra[command]} | {name}:{function}:{line} | {message}"


def error_log_path(log_file: str) -> str:
    """エラー専用ファイルのパス（logs/run.log -> logs/run_error.log）"""
    root, ext = os.path.splitext(log_file)
    return f"{root}_error{ext or '.log'}"


class LoggingConfig:
    """ログ設定クラス"""

    def __init__(self, settings: Optional[AppSettings] = None):
        self.settings = settings or app_settings
        self._setup_logging()

    def _setup_logging(self) -> None:
        logger.remove()
        # サブコマンドの外で出たログにも extra[command] を持たせる
        logger.configure(extra={'command': '-'})

        log_level = self.settings.get_setting('log', 'log_level', 'INFO')
        logger.add(sys.stderr, level=log_level, format=CONSOLE_FORMAT, colorize=True)

        log_file = self.settings.get_setting('log', 'log_file', '')
        if log_file:
            self._add_file_sink(log_file, log_level)
            self._add_file_sink(error_log_path(log_file), "ERROR")

    def _add_file_sink(self, path: str, level: str) -> None:
        """ローテーション付きのファイル出力"""
        log_dir = os.path.dirname(path)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        logger.add(
            path,
            level=level,
            format=FILE_FORMAT,
            rotation=int(self.settings.get_setting('log', 'max_log_size', 10485760)),
            retention=self.settings.get_setting('log', 'backup_count', 5),
            compression="zip",
            encoding="utf-8"
        )

    def get_logger(self, name: str = None):
        """ロガーを取得"""
        if name:
            return logger.bind(name=name)
        return logger

    def set_level(self, level: str) -> None:
        """ログレベルを設定（--log-level）"""
        self.settings.update_setting('log', 'log_level', level.upper())
        self._setup_logging()
        logger.debug(f"ログレベルを {level} に変更しました")

    @contextmanager
    def command_context(self, command: str):
        """この中で出たログにサブコマンド名を付ける"""
        with logger.contextualize(command=command):
            yield


logging_config = LoggingConfig()

# グローバルロガーインスタンス
app_logger = logging_config.get_logger("margin_sampler")
