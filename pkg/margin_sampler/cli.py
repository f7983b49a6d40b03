"""
コマンドラインのフロントエンド
"""
import argparse
import sys
from typing import Callable, Dict, List, Optional

from . import __version__
from .commands.estimation import cmd_check_uniformity, cmd_count, cmd_diagnose
from .commands.oracle import cmd_enumerate, cmd_exact_count, cmd_tv_distance
from .commands.sampling import cmd_evaluate, cmd_feasible, cmd_sample
from .config.logging_config import app_logger, logging_config
from .config.settings import app_settings
from .models.run import RunConfig
from .utils.error_handlers import EXIT_INTERNAL, AppError, exit_code_for, log_app_error

COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    'feasible': cmd_feasible,
    'sample': cmd_sample,
    'evaluate': cmd_evaluate,
    'count': cmd_count,
    'diagnose': cmd_diagnose,
    'check-uniformity': cmd_check_uniformity,
    'exact-count': cmd_exact_count,
    'enumerate': cmd_enumerate,
    'tv-distance': cmd_tv_distance,
}

HELP = {
    'feasible': "周辺和が実現可能か判定する",
    'sample': "提案分布から行列を生成する",
    'evaluate': "与えた行列の log Q(z) を評価する",
    'count': "重要度重みで行列の個数を推定する",
    'diagnose': "ヒューリスティックごとの重みの診断",
    'check-uniformity': "外部一様性チェック（rowgen / block / greedy）",
    'exact-count': "行列の個数を厳密に数える",
    'enumerate': "すべての行列を列挙する",
    'tv-distance': "提案分布と一様分布の全変動距離",
}


def _job_count(text: str) -> int:
    """--jobs は 1 以上か -1（全コア）"""
    value = int(text)
    if value < 1 and value != -1:
        raise argparse.ArgumentTypeError(f"ジョブ数は 1 以上か -1 です: {value}")
    return value


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--margins', dest='margins_path', metavar='FILE', help="周辺和ファイル")
    zeros = common.add_mutually_exclusive_group()
    zeros.add_argument('--zeros', dest='mask_path', metavar='FILE', help="構造的ゼロの位置ファイル（'i j'、1始まり）")
    zeros.add_argument('--zero-diagonal', action='store_true', help="対角を構造的ゼロにする")
    common.add_argument('--heuristic', default=None,
                        help="cgm | binomial | gmw | oneil（マスクがあれば構造的ゼロ版を自動選択）")
    common.add_argument('--n', dest='sample_count', type=int, default=None, metavar='N', help="標本数")
    common.add_argument('--seed', type=int, default=None, help="乱数シード")
    common.add_argument('--jobs', type=_job_count, default=None, help="並列ジョブ数（-1 で全コア）")
    common.add_argument('--out', default=None, metavar='DIR', help="出力ディレクトリ")
    common.add_argument('--keep-column-order', action='store_true', help="列を列和の降順に並べ替えない")
    common.add_argument('--unsafe-mask', action='store_true', help="1行・1列に複数の構造的ゼロを許可する")
    common.add_argument('--db', dest='db_path', default=None, metavar='PATH', help="結果台帳の SQLite ファイル")
    common.add_argument('--log-level', default=None, type=str.upper, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help="ログレベル")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='margin_sampler',
        description="周辺和を固定した二値行列の逐次重点サンプリング"
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest='command', required=True)
    common = _common_parser()

    for name in COMMANDS:
        sub = subparsers.add_parser(name, parents=[common], help=HELP[name])
        if name == 'sample':
            sub.add_argument('--format', dest='output_format', choices=['concat', 'per-file'], default='concat',
                             help="行列を1ファイルに連結するか1行列1ファイルにするか")
        if name == 'evaluate':
            sub.add_argument('--matrix', dest='matrix_path', metavar='FILE', help="行列ファイル（空行区切りで複数可）")
        if name == 'check-uniformity':
            sub.add_argument('--mode', choices=['rowgen', 'block', 'greedy'], default='rowgen')
            sub.add_argument('--L', dest='replicates', type=int, default=1, help="rowgen の反復数")
    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    """引数を設定に落とす。未指定の値は環境変数の設定から取る"""
    def pick(value, category, key, default):
        return value if value is not None else app_settings.get_setting(category, key, default)

    return RunConfig(
        command=args.command,
        margins_path=args.margins_path,
        mask_path=args.mask_path,
        zero_diagonal=args.zero_diagonal,
        heuristic=args.heuristic,
        sample_count=pick(args.sample_count, 'run', 'sample_count', 1000),
        seed=pick(args.seed, 'run', 'seed', 0),
        out=args.out,
        jobs=pick(args.jobs, 'run', 'jobs', 1),
        keep_column_order=args.keep_column_order or app_settings.get_setting('sampler', 'keep_column_order', False),
        unsafe_mask=args.unsafe_mask,
        db_path=args.db_path,
        mode=getattr(args, 'mode', None),
        replicates=getattr(args, 'replicates', 1),
        matrix_path=getattr(args, 'matrix_path', None),
        output_format=getattr(args, 'output_format', 'concat')
    )


def main(argv: Optional[List[str]] = None) -> int:
    """終了コード: 0 成功、1 実現不可能・構成失敗、2 使い方・解析エラー、3 内部エラー"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.log_level:
        logging_config.set_level(args.log_level)

    config = to_run_config(args)
    with logging_config.command_context(config.command):
        app_logger.debug(f"実行設定: {config.to_dict()}")
        try:
            return COMMANDS[config.command](config)
        except AppError as e:
            log_app_error(e)
            print(f"error: {e.message}", file=sys.stderr)
            return exit_code_for(e)
        except Exception as e:
            app_logger.exception(f"予期しないエラー: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INTERNAL


if __name__ == '__main__':
    sys.exit(main())
