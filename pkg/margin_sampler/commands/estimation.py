"""
数え上げ推定、重みの診断、外部一様性チェック
"""
from typing import List, Optional

import numpy as np

from ..config.logging_config import app_logger
from ..models.margins import MarginPair
from ..models.mask import StructuralZeroMask
from ..models.profile import Heuristic
from ..models.run import RunConfig
from ..models.weights import WeightSummary
from ..services.dp_sampler_service import ProposalSampler
from ..services.enumeration_service import heuristic_for_mask
from ..services.uniformity_service import (
    adversarial_block, adversarial_greedy, delta_max_experiment, delta_star
)
from ..services.weight_service import estimate_count, log_weights_from_samples
from ..utils.error_handlers import EXIT_OK, ShapeError, ValidationError
from ..utils.formatters import Formatters
from ..utils.helpers import margins_hash
from ..utils.validators import Validators
from .common import load_inputs, open_ledger, resolve_heuristic, run_header, sampler_options

BASE_HEURISTICS = (Heuristic.CGM, Heuristic.BINOMIAL, Heuristic.GMW, Heuristic.ONEIL)


def _summary_values(summary: WeightSummary) -> dict:
    return {
        'W_mean': Formatters.format_log_number(summary.log_mean),
        'log_W_mean': summary.log_mean,
        'S_W_mean': Formatters.format_log_number(summary.log_se),
        'log_S_W_mean': summary.log_se,
        'delta_hat': summary.delta_hat,
        'log_delta_hat': summary.log_delta,
        'cv2_hat': summary.cv2_hat
    }


def _run_summary(config: RunConfig, mp: MarginPair, mask: Optional[StructuralZeroMask],
                 heuristic: Heuristic) -> WeightSummary:
    Validators.validate_integer_range(config.sample_count, "--n", min_value=2)
    return estimate_count(mp, heuristic, mask, count=config.sample_count, seed=config.seed,
                          jobs=config.jobs, **sampler_options(config))


def cmd_count(config: RunConfig) -> int:
    """W̄ ± S_W̄ で N(r, c) を推定する"""
    mp, mask = load_inputs(config)
    heuristic = resolve_heuristic(config, mask)
    summary = _run_summary(config, mp, mask, heuristic)

    print(Formatters.format_header(run_header(config, mp, mask, heuristic)))
    print(f"W̄ ± S_W̄ = {Formatters.format_estimate(summary.log_mean, summary.log_se)}")
    print(f"Δ̂ = {Formatters.format_float(summary.delta_hat)}, ĉv² = {Formatters.format_float(summary.cv2_hat)}")
    print(Formatters.format_key_values(_summary_values(summary)))
    return EXIT_OK


def cmd_diagnose(config: RunConfig) -> int:
    """ヒューリスティックごとの Δ̂、ĉv²、W̄ の比較表"""
    mp, mask = load_inputs(config)
    if config.heuristic:
        heuristics = [resolve_heuristic(config, mask)]
    else:
        heuristics = [heuristic_for_mask(h, mask) for h in BASE_HEURISTICS]

    print(Formatters.format_header(run_header(config, mp, mask)))
    records: List[dict] = []
    for heuristic in heuristics:
        summary = _run_summary(config, mp, mask, heuristic)
        records.append({
            'heuristic': heuristic.value,
            'delta_hat': Formatters.format_float(summary.delta_hat),
            'cv2_hat': Formatters.format_float(summary.cv2_hat),
            'W_mean': Formatters.format_estimate(summary.log_mean, summary.log_se)
        })
        print(Formatters.format_key_values({
            f'{heuristic.value}.{key}': value for key, value in _summary_values(summary).items()
        }))
    print(Formatters.format_table(records))
    return EXIT_OK


def cmd_check_uniformity(config: RunConfig) -> int:
    """--mode rowgen は Δ̂_max、--mode block|greedy は Δ̂*"""
    mode = config.mode or 'rowgen'
    if mode == 'rowgen':
        return _check_rowgen(config)
    if mode in ('block', 'greedy'):
        return _check_adversarial(config, mode)
    raise ValidationError(f"不明なモード: {mode}（rowgen, block, greedy）", error_code="UNKNOWN_MODE")


def _ledger_callback(ledger, run_id: int):
    """反復ごとに台帳へ1行書く"""
    def record(ell, log_delta, log_q0, accumulator):
        ledger.record_replicate(run_id, ell + 1, log_delta, log_q0,
                                accumulator.log_min, accumulator.log_max)
    return record


def _check_rowgen(config: RunConfig) -> int:
    Validators.validate_integer_range(config.replicates, "--L", min_value=1)
    Validators.validate_integer_range(config.sample_count, "--n", min_value=0)
    mp, mask = load_inputs(config)
    if mask is not None:
        raise ValidationError("rowgen モードは構造的ゼロに対応していません", error_code="MASK_NOT_SUPPORTED")
    heuristic = resolve_heuristic(config, None)

    ledger = open_ledger(config)
    run_id = None
    on_replicate = None
    if ledger is not None:
        run_id = ledger.start_run('check-uniformity:rowgen', heuristic.value, config.seed,
                                  config.sample_count, margins_hash(mp))
        on_replicate = _ledger_callback(ledger, run_id)

    try:
        result = delta_max_experiment(mp.r, mp.n, config.replicates, config.sample_count, heuristic,
                                      seed=config.seed, jobs=config.jobs, on_replicate=on_replicate,
                                      keep_column_order=config.keep_column_order)
    except Exception:
        if ledger is not None:
            ledger.complete_run(run_id, status='failed')
        raise
    if ledger is not None:
        ledger.complete_run(run_id)

    header = run_header(config, mp, None, heuristic)
    header['L'] = config.replicates
    print(Formatters.format_header(header))
    print(Formatters.format_table([
        {'replicate': ell + 1, 'delta': Formatters.format_log_number(d), 'log_q0': Formatters.format_float(q)}
        for ell, (d, q) in enumerate(zip(result.log_deltas, result.log_q0))
    ]))
    print(Formatters.format_key_values({
        'delta_max': result.delta_max,
        'log_delta_max': result.log_delta_max
    }))
    return EXIT_OK


def _check_adversarial(config: RunConfig, mode: str) -> int:
    Validators.validate_integer_range(config.sample_count, "--n", min_value=1)
    mp, mask = load_inputs(config)
    if mask is not None:
        raise ValidationError("敵対的行列のチェックは構造的ゼロに対応していません", error_code="MASK_NOT_SUPPORTED")
    heuristic = resolve_heuristic(config, None)

    if mode == 'block':
        r1 = mp.r[0]
        if len(set(mp.r)) != 1 or len(set(mp.c)) != 1 or mp.c[0] != r1:
            raise ShapeError("block モードには r_i = c_j = r_1 の正則な周辺和が必要です")
        z_star = adversarial_block(mp.m, mp.n, r1)
    else:
        rows = np.argsort(-mp.rows, kind='stable')
        cols = np.argsort(-mp.cols, kind='stable')
        built = adversarial_greedy(mp.rows[rows], mp.cols[cols])
        z_star = np.empty_like(built)
        z_star[np.ix_(rows, cols)] = built

    sampler = ProposalSampler(mp, heuristic, **sampler_options(config))
    samples = sampler.sample_many(config.sample_count, config.seed, jobs=config.jobs)
    result = delta_star(z_star, sampler, log_weights_from_samples(samples))
    app_logger.info(f"Δ̂* を計算しました: mode={mode}, log Δ̂*={result.log_delta_star:.6g}")

    ledger = open_ledger(config)
    if ledger is not None:
        run_id = ledger.start_run(f'check-uniformity:{mode}', heuristic.value, config.seed,
                                  config.sample_count, margins_hash(mp))
        ledger.record_replicate(run_id, 1, result.log_delta_star, -result.log_weight_star)
        ledger.complete_run(run_id)

    print(Formatters.format_header(run_header(config, mp, None, heuristic)))
    print(f"Δ̂* = {Formatters.format_log_number(result.log_delta_star)}, "
          f"Δ̂ = {Formatters.format_log_number(result.log_delta_internal)}")
    print(Formatters.format_key_values({
        'delta_star': result.delta_star,
        'log_delta_star': result.log_delta_star,
        'delta_internal': result.delta_internal,
        'log_delta_internal': result.log_delta_internal,
        'log_weight_star': result.log_weight_star
    }))
    return EXIT_OK
