"""
漸近的数え上げ近似 Ñ(r, c)、Ñ(r, c, a) とベルヌーイ確率プロファイル
"""
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln, logit

from ..config.logging_config import app_logger
from ..config.settings import app_settings
from ..models.margins import ColumnSupport, MarginPair
from ..models.mask import StructuralZeroMask
from ..models.profile import BernoulliProfile, Heuristic, MomentCache
from ..utils.error_handlers import EnumerationDomainError, ShapeError, ValidationError


def safe_div(num: float, den: float) -> float:
    """0/0 := 0"""
    if den == 0:
        return 0.0
    return num / den


def log_binom(n, k) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def log_factorial(x) -> np.ndarray:
    return gammaln(np.asarray(x, dtype=float) + 1)


def _check_domain(mp: MarginPair, mask: Optional[StructuralZeroMask] = None) -> None:
    xi = mask.xi if mask is not None else 0
    zeta = mask.zeta if mask is not None else 0
    if np.any(mp.rows > mp.n - xi) or np.any(mp.cols > mp.m - zeta):
        raise EnumerationDomainError(
            "行和が n (- ξ_i) を、または列和が m (- ζ_j) を超えています",
            details=mp.to_dict()
        )


def _check_mask(mp: MarginPair, mask: StructuralZeroMask) -> None:
    if mask is None:
        raise ValidationError("構造的ゼロ用の近似にはマスクが必要です", error_code="SZ_WITHOUT_MASK")
    if (mask.m, mask.n) != (mp.m, mp.n):
        raise ShapeError(f"マスクの形 {mask.m}x{mask.n} が周辺和 {mp.m}x{mp.n} と一致しません")


def _variance_scale(total: float, m: int, n: int) -> float:
    """mn / ([c]_1 (mn - [c]_1))"""
    return safe_div(m * n, total * (m * n - total))


def _nu(c: np.ndarray, m: int, n: int) -> float:
    total = float(c.sum())
    return _variance_scale(total, m, n) * float(((c - total / n) ** 2).sum())


def _mu(r: np.ndarray, c: np.ndarray, m: int, n: int) -> float:
    total = float(c.sum())
    return _variance_scale(total, m, n) * float(((r - total / m) ** 2).sum())


def _degenerate(total: float, m: int, n: int) -> bool:
    """全ゼロまたは全1の周辺和では指数補正を 0 とする"""
    return total == 0 or total == m * n


def log_ntilde_binomial(mp: MarginPair) -> float:
    """log [ C(mn, [c]_1)^{-1} Π C(n, r_i) Π C(m, c_j) ]"""
    _check_domain(mp)
    m, n = mp.m, mp.n
    r, c = mp.rows, mp.cols
    total = int(c.sum())
    return float(-log_binom(m * n, total) + log_binom(n, r).sum() + log_binom(m, c).sum())


def log_ntilde_cgm(mp: MarginPair) -> float:
    """二項近似に exp(-(1-μ)(1-ν)/2) を掛けたもの"""
    value = log_ntilde_binomial(mp)
    m, n = mp.m, mp.n
    r, c = mp.rows.astype(float), mp.cols.astype(float)
    if _degenerate(c.sum(), m, n):
        return value
    return value - 0.5 * (1.0 - _mu(r, c, m, n)) * (1.0 - _nu(c, m, n))


def _gmw_alphas(moments: MomentCache):
    c1, c2, c3 = moments[1], moments[2], moments[3]
    alpha1 = safe_div(c2, 2 * c1 ** 2) + safe_div(c2, 2 * c1 ** 3) + safe_div(c2 ** 2, 4 * c1 ** 4)
    alpha2 = -safe_div(c3, 3 * c1 ** 3) + safe_div(c2 ** 2, 2 * c1 ** 4)
    alpha3 = safe_div(c2, 4 * c1 ** 4) + safe_div(c3, 2 * c1 ** 4) - safe_div(c2 ** 2, 2 * c1 ** 5)
    return alpha1, alpha2, alpha3


def _log_multinomial_part(mp: MarginPair) -> float:
    """log [c]_1! - Σ log r_i! - Σ log c_j!"""
    return float(log_factorial(mp.cols.sum()) - log_factorial(mp.rows).sum() - log_factorial(mp.cols).sum())


def log_ntilde_gmw(mp: MarginPair) -> float:
    """疎な行列向けの近似"""
    _check_domain(mp)
    rm = MomentCache.from_sequence(mp.r)
    alpha1, alpha2, alpha3 = _gmw_alphas(MomentCache.from_sequence(mp.c))
    return _log_multinomial_part(mp) - alpha1 * rm[2] - alpha2 * rm[3] - alpha3 * rm[2] ** 2


def log_ntilde_oneil(mp: MarginPair) -> float:
    """指数部を -[r]_2 [c]_2 / (2 [c]_1^2) に置き換えた近似"""
    _check_domain(mp)
    rm = MomentCache.from_sequence(mp.r)
    cm = MomentCache.from_sequence(mp.c)
    return _log_multinomial_part(mp) - safe_div(rm[2] * cm[2], 2 * cm[1] ** 2)


def log_ntilde_binomial_sz(mp: MarginPair, mask: StructuralZeroMask) -> float:
    """log [ C(mn - [ζ]_1, [c]_1)^{-1} Π C(n - ξ_i, r_i) Π C(m - ζ_j, c_j) ]"""
    _check_mask(mp, mask)
    _check_domain(mp, mask)
    m, n = mp.m, mp.n
    r, c = mp.rows, mp.cols
    total = int(c.sum())
    return float(
        -log_binom(m * n - mask.zeta.sum(), total)
        + log_binom(n - mask.xi, r).sum()
        + log_binom(m - mask.zeta, c).sum()
    )


def log_ntilde_cgm_sz(mp: MarginPair, mask: StructuralZeroMask) -> float:
    """構造的ゼロ版: 指数部は -(1-μ)(1-ν)/2 - η"""
    value = log_ntilde_binomial_sz(mp, mask)
    m, n = mp.m, mp.n
    r, c = mp.rows.astype(float), mp.cols.astype(float)
    total = c.sum()
    if _degenerate(total, m, n):
        return value
    scale = _variance_scale(total, m, n)
    eta = scale * float(((r - total / m)[:, None] * (c - total / n)[None, :] * mask.a).sum())
    return value - 0.5 * (1.0 - _mu(r, c, m, n)) * (1.0 - _nu(c, m, n)) - eta


def log_ntilde_oneil_sz(mp: MarginPair, mask: StructuralZeroMask) -> float:
    """構造的ゼロ版: さらに -Σ a_ij r_i c_j / [c]_1"""
    _check_mask(mp, mask)
    value = log_ntilde_oneil(mp)
    _check_domain(mp, mask)
    r, c = mp.rows.astype(float), mp.cols.astype(float)
    return value - safe_div(float((r[:, None] * c[None, :] * mask.a).sum()), c.sum())


LOG_NTILDE = {
    Heuristic.CGM: log_ntilde_cgm,
    Heuristic.BINOMIAL: log_ntilde_binomial,
    Heuristic.GMW: log_ntilde_gmw,
    Heuristic.ONEIL: log_ntilde_oneil,
    Heuristic.CGM_SZ: log_ntilde_cgm_sz,
    Heuristic.BINOMIAL_SZ: log_ntilde_binomial_sz,
    Heuristic.ONEIL_SZ: log_ntilde_oneil_sz,
}


def heuristic_for_mask(h: Heuristic, mask: Optional[StructuralZeroMask]) -> Heuristic:
    """マスクがあれば対応する構造的ゼロ版を選ぶ（GMW はそのまま）"""
    if mask is None:
        return h.base
    return h.sz_variant or h


def forced_rows(mp: MarginPair, mask: Optional[StructuralZeroMask] = None):
    """
    第1列で値が決まる行。
    forced_zero: r_i = 0 または a_i1 = 1、forced_one: r_i = n - ξ_i（forced_zero でない行）
    """
    r = mp.rows
    if mask is None:
        first = np.zeros(mp.m, dtype=bool)
        room = np.full(mp.m, mp.n)
    else:
        first = mask.a[:, 0]
        room = mp.n - mask.xi
    forced_zero = (r == 0) | first
    forced_one = ~forced_zero & (r >= room)
    return forced_zero, forced_one


def bernoulli_profile(mp: MarginPair, h: Heuristic, mask: Optional[StructuralZeroMask] = None) -> BernoulliProfile:
    """
    第1列の各行が 1 を取る確率 p_i（対数オッズ）。
    値が決まる行は ±inf。残りの行は、決まった行の 1 を差し引いた r と c' = (c_2..c_n) で評価する。
    """
    h = Heuristic(h)
    if h.is_sz:
        _check_mask(mp, mask)
    if mask is not None and (mask.m, mask.n) != (mp.m, mp.n):
        raise ShapeError("マスクの形が周辺和と一致しません")
    xi = mask.xi if mask is not None else np.zeros(mp.m, dtype=np.int64)
    if np.any(mp.rows > mp.n - xi):
        raise EnumerationDomainError("行和が利用可能な列数を超えています", details=mp.to_dict())

    m, n = mp.m, mp.n
    forced_zero, forced_one = forced_rows(mp, mask)
    free = ~(forced_zero | forced_one)

    logodds = np.zeros(m)
    logodds[forced_zero] = -np.inf
    logodds[forced_one] = np.inf
    if not free.any():
        return BernoulliProfile(logodds)

    r = (mp.rows - forced_one).astype(float)
    c_rest = mp.cols[1:].astype(float)
    n_rest = n - 1
    rf = r[free]
    log_r = np.log(rf)

    if h in (Heuristic.BINOMIAL, Heuristic.BINOMIAL_SZ):
        room = n - (xi[free] if h.is_sz else 0)
        values = log_r - np.log(room - rf)

    elif h in (Heuristic.CGM, Heuristic.CGM_SZ):
        total = c_rest.sum()
        scale = _variance_scale(total, m, n_rest)
        beta = 0.5 * scale * (1.0 - _nu(c_rest, m, n_rest))
        room = n - (xi[free] if h.is_sz else 0)
        values = log_r - np.log(room - rf) + beta * (1.0 - 2.0 * (rf - total / m))
        if h.is_sz:
            # マスク項に 1/2 は掛けない: taylor_profile(log_ntilde_cgm_sz) と一致する
            a_rest = mask.a[free][:, 1:]
            centered = c_rest - safe_div(total, n_rest)
            values = values + scale * (a_rest * centered[None, :]).sum(axis=1)

    elif h is Heuristic.GMW:
        alpha1, alpha2, alpha3 = _gmw_alphas(MomentCache.from_sequence(c_rest))
        r2 = MomentCache.from_sequence(r)[2]
        gamma = 2 * alpha1 + 3 * alpha2 * (rf - 2) + 4 * alpha3 * (r2 - rf + 1)
        values = log_r + (rf - 1) * gamma

    elif h in (Heuristic.ONEIL, Heuristic.ONEIL_SZ):
        cm = MomentCache.from_sequence(c_rest)
        values = log_r + (rf - 1) * safe_div(cm[2], cm[1] ** 2)
        if h.is_sz:
            a_rest = mask.a[free][:, 1:]
            values = values + (a_rest * c_rest[None, :]).sum(axis=1) * safe_div(1.0, float(mp.cols.sum()))

    else:  # pragma: no cover
        raise ValidationError(f"未対応のヒューリスティック: {h}")

    logodds[free] = values
    return BernoulliProfile(logodds)


def taylor_profile(
    mp: MarginPair,
    log_n: Callable[..., float],
    mask: Optional[StructuralZeroMask] = None
) -> BernoulliProfile:
    """
    p_i = Ñ(r - 1^i, c') / (Ñ(r, c') + Ñ(r - 1^i, c'))、すなわち
    logit p_i = log Ñ(r - 1^i, c') - log Ñ(r, c')。
    mask を渡した場合 log_n(margins, mask') として呼ぶ。
    """
    m = mp.m
    forced_zero, forced_one = forced_rows(mp, mask)
    free = ~(forced_zero | forced_one)

    logodds = np.zeros(m)
    logodds[forced_zero] = -np.inf
    logodds[forced_one] = np.inf
    if not free.any():
        return BernoulliProfile(logodds)

    r = mp.rows - forced_one
    c_rest = mp.c[1:]
    rest_mask = mask.drop_first_column() if mask is not None else None

    def evaluate(rows) -> float:
        margins = MarginPair(tuple(rows), c_rest)
        if rest_mask is None:
            return float(log_n(margins))
        return float(log_n(margins, rest_mask))

    base = evaluate(r)
    for i in np.nonzero(free)[0]:
        decremented = r.copy()
        decremented[i] -= 1
        logodds[i] = evaluate(decremented) - base
    return BernoulliProfile(logodds)


def clamp_profile(profile: BernoulliProfile, support: ColumnSupport, eps: float = None) -> BernoulliProfile:
    """
    台が 0 と 1 の両方を許す行で p が 0 か 1 になっていれば [eps, 1 - eps] に収める。
    台に含まれる列が提案確率 0 にならないようにする。
    """
    eps = app_settings.get_setting('sampler', 'clamp_epsilon', 1e-12) if eps is None else eps
    both = support.allow_zero & support.allow_one
    x = profile.logodds.copy()
    low, high = float(logit(eps)), float(logit(1.0 - eps))
    hit = both & ~np.isfinite(x)
    if hit.any():
        app_logger.warning(f"確率 0/1 の行をクランプしました: {int(hit.sum())}行")
        x[hit] = np.clip(x[hit], low, high)
    return BernoulliProfile(x)
