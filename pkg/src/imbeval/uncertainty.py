"""Propagation of finite-sample TPR/FPR uncertainty into precision.

TPR and FPR measured on a finite test set are interval estimates, not
exact values.  Treating the two confidence intervals as a hard box (no
distributional assumption inside) induces, at every prevalence, a band of
attainable precision values.  This module computes that band, its maximal
width over all prevalences (in closed form and by independent numeric
search), the max-CV upper bound on that width, the companion-CV solver
(how precise must the second rate be, given the first, to meet a target
band width), percentile-bootstrap rate estimates, and Hoeffding-style
sample-size planning.

Because precision is monotone in the ratio fpr/tpr, the band edges are
attained at two corners of the box:

    upper(eta) uses (tpr + s_t, fpr - s_f)      lower(eta) uses (tpr - s_t, fpr + s_f)

Writing r1 = (fpr - s_f)/(tpr + s_t), r2 = (fpr + s_f)/(tpr - s_t) and
x = (1 - eta)/eta, the band width is 1/(1 + x*r1) - 1/(1 + x*r2), which is
maximized at x* = 1/sqrt(r1*r2) with value

    delta = (1 - sqrt(r1/r2)) / (1 + sqrt(r1/r2)).

delta never exceeds max(cv_tpr, cv_fpr), with equality exactly when the
two coefficients of variation agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, PreconditionError
from .metrics import OperatingPoint, PredictionRecord, adjusted_precision, check_prevalence

__all__ = [
    "RateEstimate",
    "PrecisionBand",
    "DeltaResult",
    "precision_band",
    "max_uncertainty_closed_form",
    "max_uncertainty_numeric",
    "max_cv_bound",
    "confidence_product_interval",
    "solve_companion_cv",
    "bootstrap_rate_estimate",
    "hoeffding_sample_size",
]

_CV_EQUAL_TOL = 1e-12


@dataclass(frozen=True)
class RateEstimate:
    """A rate point estimate with a confidence-interval half-width.

    `value` is the plug-in estimate, `half_width` the half-length of its
    confidence interval at level `confidence`.  The half-width may not
    exceed the value (the interval must not cross zero); the closed-form
    maximal-uncertainty results additionally require it to be strictly
    smaller, which those operations check themselves.
    """

    value: float
    half_width: float
    confidence: float = 0.95

    def __post_init__(self) -> None:
        if not (0.0 < self.value <= 1.0):
            raise PreconditionError(f"rate value must lie in (0, 1], got {self.value!r}")
        if not (0.0 <= self.half_width <= self.value):
            raise PreconditionError(
                f"half-width must lie in [0, value]; got {self.half_width!r} for value {self.value!r}"
            )
        if not (0.0 < self.confidence < 1.0):
            raise PreconditionError(f"confidence must lie in (0, 1), got {self.confidence!r}")

    @property
    def cv(self) -> float:
        """Coefficient of variation: half_width / value."""
        return self.half_width / self.value

    @property
    def lower(self) -> float:
        return self.value - self.half_width

    @property
    def upper(self) -> float:
        return self.value + self.half_width


@dataclass(frozen=True)
class PrecisionBand:
    """Attainable precision range at one prevalence, given boxed TPR/FPR.

    `degenerate_upper` flags the case fpr - s_f == 0 exactly, where the
    upper edge is 1 at every prevalence.
    """

    eta: float
    lower: float
    point: float
    upper: float
    degenerate_upper: bool = False

    def __post_init__(self) -> None:
        if not (self.lower <= self.point <= self.upper):
            raise PreconditionError("band must satisfy lower <= point <= upper")

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class DeltaResult:
    """Maximal band width over all prevalences, with the maximizer and corner ratios."""

    delta: float
    eta_star: float
    r1: float
    r2: float


def _corner_ratios(tpr: RateEstimate, fpr: RateEstimate) -> tuple[float, float]:
    for name, est in (("tpr", tpr), ("fpr", fpr)):
        if est.half_width >= est.value:
            raise PreconditionError(
                f"maximal-uncertainty bound inapplicable: {name} half-width "
                f"{est.half_width!r} is not smaller than the point estimate {est.value!r}"
            )
    r1 = fpr.lower / tpr.upper
    r2 = fpr.upper / tpr.lower
    return r1, r2


def _corner_precision(t: float, f: float, eta: float) -> float:
    # t may exceed 1 for wide tpr intervals; the ratio still lands in [0, 1].
    return t * eta / (t * eta + f * (1.0 - eta))


def precision_band(tpr: RateEstimate, fpr: RateEstimate, eta: float) -> PrecisionBand:
    """Precision band at prevalence `eta` for boxed rate estimates.

    The edges are the box corners (monotonicity of precision in fpr/tpr):
    the upper edge pairs the optimistic corner (tpr + s_t, fpr - s_f), the
    lower edge the pessimistic one (tpr - s_t, fpr + s_f).  When the fpr
    interval touches zero exactly the upper edge is 1 for every eta and the
    band is flagged degenerate instead of failing.
    """
    eta = check_prevalence(eta)
    point = adjusted_precision(OperatingPoint(tpr.value, fpr.value), eta)
    lower = _corner_precision(tpr.lower, fpr.upper, eta)
    upper = _corner_precision(tpr.upper, fpr.lower, eta)
    return PrecisionBand(
        eta=eta, lower=lower, point=point, upper=upper, degenerate_upper=fpr.lower == 0.0
    )


def max_uncertainty_closed_form(tpr: RateEstimate, fpr: RateEstimate) -> DeltaResult:
    """Closed-form maximal precision-band width and the prevalence attaining it.

    Requires half-widths strictly below the point estimates on both rates.
    """
    r1, r2 = _corner_ratios(tpr, fpr)
    s = math.sqrt(r1 / r2)
    delta = (1.0 - s) / (1.0 + s)
    root = math.sqrt(r1 * r2)
    eta_star = root / (1.0 + root)
    return DeltaResult(delta=delta, eta_star=eta_star, r1=r1, r2=r2)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def max_uncertainty_numeric(
    tpr: RateEstimate, fpr: RateEstimate, *, grid_size: int = 1000
) -> tuple[float, float]:
    """Maximal band width by direct search over prevalence.

    Seeds a golden-section refinement from a log-spaced grid over
    (1e-9, 1 - 1e-9); the maximizing prevalence can be far below any linear
    grid's resolution, hence the log spacing.  Serves as the independent
    cross-check of the closed form.
    """
    for name, est in (("tpr", tpr), ("fpr", fpr)):
        if est.half_width >= est.value:
            raise PreconditionError(
                f"maximal-uncertainty search inapplicable: {name} half-width "
                f"{est.half_width!r} is not smaller than the point estimate {est.value!r}"
            )
    up_t, up_f = tpr.upper, fpr.lower
    lo_t, lo_f = tpr.lower, fpr.upper

    def width(eta: float) -> float:
        return _corner_precision(up_t, up_f, eta) - _corner_precision(lo_t, lo_f, eta)

    etas = np.logspace(-9.0, math.log10(1.0 - 1e-9), grid_size)
    widths = _corner_precision(up_t, up_f, etas) - _corner_precision(lo_t, lo_f, etas)
    best = int(np.argmax(widths))
    a = float(etas[max(best - 1, 0)])
    b = float(etas[min(best + 1, grid_size - 1)])

    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    wc, wd = width(c), width(d)
    while b - a > 1e-15 + 1e-12 * b:
        if wc > wd:
            b, d, wd = d, c, wc
            c = b - _GOLDEN * (b - a)
            wc = width(c)
        else:
            a, c, wc = c, d, wd
            d = a + _GOLDEN * (b - a)
            wd = width(d)
    eta_star = 0.5 * (a + b)
    return width(eta_star), eta_star


def max_cv_bound(tpr: RateEstimate, fpr: RateEstimate) -> tuple[float, bool]:
    """Upper bound max(cv_tpr, cv_fpr) on the maximal band width.

    The second element reports whether the bound is tight, i.e. whether the
    two coefficients of variation agree (within 1e-12), which is exactly
    the equality case.
    """
    cv_t, cv_f = tpr.cv, fpr.cv
    return max(cv_t, cv_f), abs(cv_t - cv_f) <= _CV_EQUAL_TOL


def confidence_product_interval(
    tpr: RateEstimate, fpr: RateEstimate, eta: float
) -> tuple[float, float, float]:
    """Precision interval point +/- max(cv) holding at confidence alpha**2.

    Both rate intervals must carry the same confidence level alpha; since
    they are treated as independent events, the combined statement holds
    with probability at least alpha squared.  The interval is clamped to
    [0, 1].
    """
    if tpr.confidence != fpr.confidence:
        raise PreconditionError(
            f"rate estimates carry different confidence levels: "
            f"{tpr.confidence!r} vs {fpr.confidence!r}"
        )
    bound, _ = max_cv_bound(tpr, fpr)
    eta = check_prevalence(eta)
    point = adjusted_precision(OperatingPoint(tpr.value, fpr.value), eta)
    lower = max(0.0, point - bound)
    upper = min(1.0, point + bound)
    return lower, upper, tpr.confidence**2


def solve_companion_cv(known_cv: float, delta: float) -> float:
    """CV the second rate may have so the maximal band width equals `delta`.

    The three quantities are tied together by

        (1 - cv1)/(1 + cv1) * (1 - cv2)/(1 + cv2) = ((1 - delta)/(1 + delta))**2

    which is symmetric in the two CVs, so it does not matter whether the
    known one belongs to TPR or FPR.  A solution in [0, 1) exists iff
    (1 - known_cv)/(1 + known_cv) >= ((1 - delta)/(1 + delta))**2; in
    particular any known_cv <= delta qualifies.
    """
    if not (0.0 <= known_cv < 1.0):
        raise PreconditionError(f"known CV must lie in [0, 1), got {known_cv!r}")
    if not (0.0 < delta < 1.0):
        raise PreconditionError(f"target width must lie in (0, 1), got {delta!r}")
    k = ((1.0 - delta) / (1.0 + delta)) ** 2
    g_known = (1.0 - known_cv) / (1.0 + known_cv)
    if g_known < k:
        raise PreconditionError(
            f"target width {delta!r} unattainable: known CV {known_cv!r} already "
            f"forces a wider maximal band"
        )
    q = k / g_known
    return (1.0 - q) / (1.0 + q)


def bootstrap_rate_estimate(
    records: Sequence[PredictionRecord],
    threshold: float,
    which: str,
    *,
    replicates: int = 1000,
    alpha: float = 0.95,
    seed: int | np.random.SeedSequence = 0,
    workers: int = 1,
) -> RateEstimate:
    """Percentile-bootstrap estimate of TPR or FPR at a threshold.

    Resamples the relevant class (positives for tpr, negatives for fpr)
    with replacement; the half-width is half the length of the central-
    `alpha` percentile interval of the replicate rates, and the value is
    the plug-in estimate on the full sample.

    Each replicate draws from its own seed substream spawned from `seed`
    (an integer or a SeedSequence), so the result is identical for any
    `workers` count and across runs.
    """
    if which not in ("tpr", "fpr"):
        raise ValueError(f"which must be 'tpr' or 'fpr', got {which!r}")
    if replicates < 100:
        raise ValueError(f"need at least 100 replicates, got {replicates}")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    wanted = which == "tpr"
    class_scores = np.array([r.score for r in records if r.positive == wanted], dtype=float)
    if class_scores.size == 0:
        cls = "positive" if wanted else "negative"
        raise DataError(f"no {cls} records to bootstrap")

    hits = class_scores >= threshold
    value = float(hits.mean())
    if value == 0.0:
        raise PreconditionError(
            f"{which} plug-in estimate is 0 at threshold {threshold!r}; "
            f"an interval estimate with positive value is required"
        )

    n = class_scores.size
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(replicates)

    def one(child: np.random.SeedSequence) -> float:
        rng = np.random.default_rng(child)
        idx = rng.integers(0, n, size=n)
        return float(hits[idx].mean())

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rates = np.fromiter(pool.map(one, children), dtype=float, count=replicates)
    else:
        rates = np.fromiter((one(c) for c in children), dtype=float, count=replicates)

    q_lo, q_hi = np.quantile(rates, [(1.0 - alpha) / 2.0, (1.0 + alpha) / 2.0])
    half_width = float(q_hi - q_lo) / 2.0
    if half_width > value:
        raise PreconditionError(
            f"bootstrap interval half-width {half_width!r} exceeds the {which} "
            f"estimate {value!r}; the interval framework needs more data at this threshold"
        )
    return RateEstimate(value=value, half_width=half_width, confidence=alpha)


def hoeffding_sample_size(sigma: float, alpha: float) -> int:
    """Samples needed so a rate's two-sided Hoeffding interval has half-width `sigma`.

    Smallest n with 2*exp(-2*n*sigma**2) <= 1 - alpha.  Deliberately
    conservative: the bound is distribution-free and typically loose, so
    fewer samples often suffice in practice.
    """
    if sigma <= 0.0:
        raise PreconditionError(f"sigma must be positive, got {sigma!r}")
    if not (0.0 < alpha < 1.0):
        raise PreconditionError(f"alpha must lie in (0, 1), got {alpha!r}")
    return math.ceil(math.log(2.0 / (1.0 - alpha)) / (2.0 * sigma * sigma))
