"""
実現可能性の判定、標本生成、提案確率の評価
"""
import math

from ..config.logging_config import app_logger
from ..models.run import RunConfig
from ..services.dp_sampler_service import ProposalSampler, eval_matrix, feasible_with_mask
from ..services.margin_service import gale_ryser_feasible
from ..utils.error_handlers import EXIT_FAILED, EXIT_OK, ValidationError
from ..utils.formatters import Formatters
from ..utils.validators import Validators
from .common import load_inputs, resolve_heuristic, run_header, sampler_options, write_text


def cmd_feasible(config: RunConfig) -> int:
    """FEASIBLE / INFEASIBLE を表示する"""
    mp, mask = load_inputs(config)
    if mask is None:
        feasible = gale_ryser_feasible(mp)
    else:
        feasible = feasible_with_mask(mp, mask, unsafe_mask=config.unsafe_mask)
    print("FEASIBLE" if feasible else "INFEASIBLE")
    app_logger.info(f"実現可能性を判定しました: {mp.m}x{mp.n}, feasible={feasible}")
    return EXIT_OK if feasible else EXIT_FAILED


def cmd_sample(config: RunConfig) -> int:
    """N 個の行列と重みログ "index logQ" を出力する"""
    Validators.validate_integer_range(config.sample_count, "--n", min_value=1)
    if config.output_format not in ('concat', 'per-file'):
        raise ValidationError(f"不明な出力形式: {config.output_format}", error_code="UNKNOWN_FORMAT")

    mp, mask = load_inputs(config)
    heuristic = resolve_heuristic(config, mask)
    sampler = ProposalSampler(mp, heuristic, mask, **sampler_options(config))
    samples = sampler.sample_many(config.sample_count, config.seed, jobs=config.jobs)

    header = Formatters.format_header(run_header(config, mp, mask, heuristic))
    weight_log = "\n".join([header] + [Formatters.format_weight_line(s.index, s.log_q) for s in samples]) + "\n"
    matrices = [s.entries for s in samples]

    if not config.out:
        print(Formatters.format_matrices(matrices))
        print(weight_log, end="")
        return EXIT_OK

    if config.output_format == 'concat':
        write_text(config.out, "samples.txt", Formatters.format_matrices(matrices))
    else:
        width = len(str(len(samples) - 1))
        for s in samples:
            write_text(config.out, f"sample_{s.index:0{width}d}.txt", Formatters.format_matrix(s.entries) + "\n")
    path = write_text(config.out, "weights.txt", weight_log)
    print(Formatters.format_key_values({'samples': len(samples), 'weights': path}))
    return EXIT_OK


def cmd_evaluate(config: RunConfig) -> int:
    """与えた行列ごとに "index logQ" を表示する。台の外は -inf"""
    if not config.matrix_path:
        raise ValidationError("--matrix を指定してください", error_code="MISSING_MATRIX")
    mp, mask = load_inputs(config)
    heuristic = resolve_heuristic(config, mask)
    matrices = Validators.read_matrices(config.matrix_path)

    print(Formatters.format_header(run_header(config, mp, mask, heuristic)))
    outside = 0
    for k, z in enumerate(matrices):
        log_q = eval_matrix(mp, heuristic, mask, z, **sampler_options(config))
        if log_q == -math.inf:
            outside += 1
            print(f"{k} -inf")
        else:
            print(Formatters.format_weight_line(k, log_q))
    if outside:
        app_logger.warning(f"{outside}個の行列が提案分布の台の外にあります")
    return EXIT_OK
