"""
二値行列サンプラー エントリポイント
"""
import os
import sys

# プロジェクトルートをパスに追加
project_root = os.path.dirname(os.path.abspath(__file__))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from margin_sampler.cli import main  # noqa: E402

if __name__ == '__main__':
    sys.exit(main())
