"""
結果台帳データベース接続設定
"""
import os
from typing import Optional
from dotenv import load_dotenv

# 環境変数を読み込み
load_dotenv()


class DatabaseConfig:
    """結果台帳データベース接続設定クラス"""

    def __init__(self, database_path: Optional[str] = None):
        """初期化"""
        self.sqlite_config = {
            'database': database_path or os.getenv('RESULTS_DATABASE', '')
        }

    @property
    def enabled(self) -> bool:
        return bool(self.sqlite_config['database'])

    def get_sqlite_connection_string(self) -> str:
        """SQLite接続文字列を取得"""
        path = self.sqlite_config['database']
        if path == ':memory:':
            return "sqlite://"

        db_dir = os.path.dirname(path)
        if db_dir and not os.path.exists(db_dir):
            os.makedirs(db_dir, exist_ok=True)
        return f"sqlite:///{path}"
