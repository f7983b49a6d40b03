"""
コマンド共通の入力読み込みと出力
"""
import os
from typing import Dict, Optional, Tuple

from .. import __version__
from ..config.database import DatabaseConfig
from ..config.settings import app_settings
from ..models.margins import MarginPair
from ..models.mask import StructuralZeroMask
from ..models.profile import Heuristic
from ..models.run import RunConfig
from ..services.database_service import ResultsLedger
from ..services.enumeration_service import heuristic_for_mask
from ..utils.error_handlers import ValidationError
from ..utils.helpers import ensure_directory_exists, margins_hash
from ..utils.validators import Validators


def load_inputs(config: RunConfig) -> Tuple[MarginPair, Optional[StructuralZeroMask]]:
    """周辺和ファイルと（あれば）マスクを読み込む"""
    if not config.margins_path:
        raise ValidationError("--margins を指定してください", error_code="MISSING_MARGINS")
    mp = Validators.read_margins(config.margins_path)
    if config.mask_path and config.zero_diagonal:
        raise ValidationError("--zeros と --zero-diagonal は同時に指定できません", error_code="CONFLICTING_MASK")
    mask = None
    if config.mask_path:
        mask = Validators.read_mask(config.mask_path, mp.m, mp.n)
    elif config.zero_diagonal:
        mask = StructuralZeroMask.zero_diagonal(mp.m, mp.n)
    return mp, mask


def resolve_heuristic(config: RunConfig, mask: Optional[StructuralZeroMask]) -> Heuristic:
    """名前から選び、マスクがあれば構造的ゼロ版に切り替える"""
    name = config.heuristic or app_settings.get_setting('sampler', 'default_heuristic', 'cgm')
    return heuristic_for_mask(Heuristic.from_name(name), mask)


def sampler_options(config: RunConfig) -> Dict:
    return {
        'keep_column_order': config.keep_column_order,
        'unsafe_mask': config.unsafe_mask
    }


def run_header(config: RunConfig, mp: MarginPair, mask: Optional[StructuralZeroMask],
               heuristic: Optional[Heuristic] = None) -> Dict:
    """出力ヘッダ。これだけで実行を再現できる"""
    header = {
        'version': __version__,
        'command': config.command,
        'margins_hash': margins_hash(mp, mask),
        'm': mp.m,
        'n': mp.n,
        'mask': 'none' if mask is None else len(mask.positions),
        'seed': config.seed,
        'N': config.sample_count,
        'keep_column_order': config.keep_column_order
    }
    if heuristic is not None:
        header['heuristic'] = heuristic.value
    return header


def open_ledger(config: RunConfig) -> Optional[ResultsLedger]:
    """--db または RESULTS_DATABASE があれば台帳を開く"""
    path = config.db_path or app_settings.get_setting('output', 'results_database', '')
    if not path:
        return None
    return ResultsLedger(DatabaseConfig(path))


def write_text(directory: str, name: str, text: str) -> str:
    ensure_directory_exists(directory)
    path = os.path.join(directory, name)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
    return path
