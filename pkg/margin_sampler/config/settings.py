"""
アプリケーション設定
"""
import os
from typing import Dict, Any
from dotenv import load_dotenv

# 環境変数を読み込み
load_dotenv()


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() == 'true'


class AppSettings:
    """アプリケーション設定クラス"""

    def __init__(self):
        """初期化"""
        # サンプラー設定
        self.sampler_settings = {
            'default_heuristic': os.getenv('SAMPLER_HEURISTIC', 'cgm'),
            'clamp_epsilon': float(os.getenv('SAMPLER_CLAMP_EPSILON', '1e-12')),
            'keep_column_order': _env_bool('SAMPLER_KEEP_COLUMN_ORDER', 'False')
        }

        # オラクル設定
        self.oracle_settings = {
            'enumeration_limit': int(os.getenv('ORACLE_ENUMERATION_LIMIT', '25')),
            'memo_budget': int(os.getenv('ORACLE_MEMO_BUDGET', '10000000'))
        }

        # 実行設定
        self.run_settings = {
            'sample_count': int(os.getenv('RUN_SAMPLE_COUNT', '1000')),
            'seed': int(os.getenv('RUN_SEED', '0')),
            'jobs': int(os.getenv('RUN_JOBS', '1'))
        }

        # ログ設定
        self.log_settings = {
            'log_level': os.getenv('LOG_LEVEL', 'INFO'),
            'log_file': os.getenv('LOG_FILE', ''),
            'max_log_size': int(os.getenv('MAX_LOG_SIZE', '10485760')),  # 10MB
            'backup_count': int(os.getenv('LOG_BACKUP_COUNT', '5'))
        }

        # 出力設定
        self.output_settings = {
            'results_database': os.getenv('RESULTS_DATABASE', '')
        }

    def _settings_map(self) -> Dict[str, Dict[str, Any]]:
        return {
            'sampler': self.sampler_settings,
            'oracle': self.oracle_settings,
            'run': self.run_settings,
            'log': self.log_settings,
            'output': self.output_settings
        }

    def get_setting(self, category: str, key: str, default: Any = None) -> Any:
        """設定値を取得"""
        settings_map = self._settings_map()
        if category in settings_map:
            return settings_map[category].get(key, default)
        return default

    def update_setting(self, category: str, key: str, value: Any) -> None:
        """設定値を更新"""
        settings_map = self._settings_map()
        if category in settings_map:
            settings_map[category][key] = value


# グローバル設定インスタンス
app_settings = AppSettings()
