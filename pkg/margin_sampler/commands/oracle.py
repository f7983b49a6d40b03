"""
厳密数、Ω の列挙、全変動距離
"""
from ..config.logging_config import app_logger
from ..models.run import RunConfig
from ..services.oracle_service import (
    enumerate_omega, exact_count_dp, pathological_count, pathological_parameters, tv_report
)
from ..utils.error_handlers import EXIT_OK
from ..utils.formatters import Formatters
from .common import load_inputs, resolve_heuristic, sampler_options, write_text


def cmd_exact_count(config: RunConfig) -> int:
    mp, mask = load_inputs(config)
    family = pathological_parameters(mp) if mask is None else None
    if family is not None:
        count = pathological_count(family[0], family[1], mp.m, mp.n)
        method = 'closed-form'
    else:
        count = exact_count_dp(mp, mask)
        method = 'dp'
    print(f"N = {count.value}")
    print(Formatters.format_key_values({
        'N': count.value,
        'N_approx': Formatters.format_log_number(count.log),
        'log_N': count.log,
        'method': method
    }))
    return EXIT_OK


def cmd_enumerate(config: RunConfig) -> int:
    """Ω を列挙する。--out があれば omega.txt に書く"""
    mp, mask = load_inputs(config)
    omega = enumerate_omega(mp, mask)
    text = Formatters.format_matrices(omega) if omega else ""
    if config.out:
        path = write_text(config.out, "omega.txt", text)
        app_logger.info(f"Ω を書き出しました: {path}")
        print(Formatters.format_key_values({'count': len(omega), 'path': path}))
    else:
        print(text, end="")
        print(Formatters.format_key_values({'count': len(omega)}))
    return EXIT_OK


def cmd_tv_distance(config: RunConfig) -> int:
    mp, mask = load_inputs(config)
    heuristic = resolve_heuristic(config, mask)
    report = tv_report(mp, heuristic, mask, **sampler_options(config))
    print(Formatters.format_key_values({'heuristic': heuristic.value, **report}))
    return EXIT_OK
