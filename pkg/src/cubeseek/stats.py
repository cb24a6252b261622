"""Exponential and log-normal models of solver running times.

The exponential fit is rate = 1/(sample mean).  The log-normal fit uses
the moment estimators on log times, with the 1/N (not 1/(N-1))
normalisation for the shape parameter:

    alpha = mean(ln t_i),   beta = sqrt(mean((ln t_i - alpha)^2)).

Summaries cover mean, variance/SD, median, mode, the 68%/95% scatter
intervals, the 95% CI of the rate (exponential) and the Cox 95% interval
of the mean (log-normal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bench import DegenerateDataError, TimeDataset

Z95 = 1.96


@dataclass(frozen=True)
class ExpModel:
    rate: float          # 1/seconds
    n: int

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be > 0")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate


@dataclass(frozen=True)
class LogNormalModel:
    alpha: float
    beta: float
    n: int

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be > 0")

    @property
    def mean(self) -> float:
        return math.exp(self.alpha + self.beta**2 / 2.0)


@dataclass(frozen=True)
class SummaryReport:
    """Point estimates and intervals for one fitted model.

    Interval fields are None when the sample size cannot support them.
    """

    model: str
    params: dict
    n: int
    mean: float
    variance: float
    sd: float
    median: float
    mode: float | None
    mean_ci: tuple[float, float] | None
    delta_t: float | None
    rate_ci: tuple[float, float] | None = None
    delta_rate: float | None = None
    scatter68: tuple[float, float] | None = None
    scatter95: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        pair = lambda iv: list(iv) if iv is not None else None
        return {
            "model": self.model,
            "params": dict(self.params),
            "summary": {
                "n": self.n,
                "mean": self.mean,
                "variance": self.variance,
                "sd": self.sd,
                "median": self.median,
                "mode": self.mode,
                "mean_ci_95": pair(self.mean_ci),
                "delta_t": self.delta_t,
                "rate_ci_95": pair(self.rate_ci),
                "delta_rate": self.delta_rate,
                "scatter_68": pair(self.scatter68),
                "scatter_95": pair(self.scatter95),
            },
        }


def _times(data) -> np.ndarray:
    if isinstance(data, TimeDataset):
        return data.times()
    return np.asarray(data, dtype=float)


def fit_exponential(data) -> ExpModel:
    """Rate = 1/(sample mean); requires strictly positive times."""
    t = _times(data)
    if len(t) < 1:
        raise ValueError("need at least one time sample")
    if np.any(t <= 0):
        raise ValueError("times must be strictly positive")
    return ExpModel(rate=1.0 / float(t.mean()), n=len(t))


def fit_lognormal(data) -> LogNormalModel:
    """Moment estimators on ln t with the 1/N shape normalisation."""
    t = _times(data)
    if len(t) < 2:
        raise ValueError("need at least two time samples")
    if np.any(t <= 0):
        raise ValueError("times must be strictly positive")
    logs = np.log(t)
    alpha = float(logs.mean())
    beta = float(np.sqrt(np.mean((logs - alpha) ** 2)))
    if beta == 0.0:
        raise DegenerateDataError("all times are equal; log-normal shape would be zero")
    return LogNormalModel(alpha=alpha, beta=beta, n=len(t))


def exp_summary(model: ExpModel) -> SummaryReport:
    """Mean 1/rate, variance 1/rate^2, median ln2/rate, and the 95% CIs.

    rate_lower/upper = rate*(1 -+ 1.96/sqrt(N)); the mean CI is the
    reciprocal interval and delta_t its wider half-width.
    """
    lam, n = model.rate, model.n
    mean = 1.0 / lam
    rate_ci = mean_ci = delta_rate = delta_t = None
    if n >= 2:
        half = Z95 / math.sqrt(n)
        lam_lo, lam_hi = lam * (1.0 - half), lam * (1.0 + half)
        delta_rate = lam * half
        if lam_lo > 0:
            rate_ci = (lam_lo, lam_hi)
            mean_ci = (1.0 / lam_hi, 1.0 / lam_lo)
            delta_t = max(abs(mean - mean_ci[0]), abs(mean - mean_ci[1]))
    return SummaryReport(
        model="exponential",
        params={"rate": lam},
        n=n,
        mean=mean,
        variance=1.0 / lam**2,
        sd=1.0 / lam,
        median=math.log(2.0) / lam,
        mode=None,
        mean_ci=mean_ci,
        delta_t=delta_t,
        rate_ci=rate_ci,
        delta_rate=delta_rate,
    )


def lognormal_summary(model: LogNormalModel) -> SummaryReport:
    """Closed-form moments plus scatter intervals and the Cox mean interval.

    mean = e^(a + b^2/2), SD = mean*sqrt(e^(b^2) - 1), median = e^a,
    mode = e^(a - b^2); the 68%/95% scatter intervals are e^(a -+ b) and
    e^(a -+ 2b).  The Cox 95% interval exponentiates
    a + b^2/2 -+ 1.96*sqrt(b^2/N + b^4/(2(N-1))).
    """
    a, b, n = model.alpha, model.beta, model.n
    mean = math.exp(a + b * b / 2.0)
    sd = mean * math.sqrt(math.exp(b * b) - 1.0)
    mean_ci = delta_t = None
    if n >= 2:
        half = Z95 * math.sqrt(b * b / n + b**4 / (2.0 * (n - 1)))
        mean_ci = (math.exp(a + b * b / 2.0 - half), math.exp(a + b * b / 2.0 + half))
        delta_t = max(abs(mean - mean_ci[0]), abs(mean - mean_ci[1]))
    return SummaryReport(
        model="lognormal",
        params={"alpha": a, "beta": b},
        n=n,
        mean=mean,
        variance=sd * sd,
        sd=sd,
        median=math.exp(a),
        mode=math.exp(a - b * b),
        mean_ci=mean_ci,
        delta_t=delta_t,
        scatter68=(math.exp(a - b), math.exp(a + b)),
        scatter95=(math.exp(a - 2 * b), math.exp(a + 2 * b)),
    )


def normal_cdf(x: float) -> float:
    """Standard normal CDF via erf; absolute error below 1e-12."""
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def fast_run_probability(model, tau: float) -> float:
    """P(t <= tau) under a fitted model."""
    if tau <= 0:
        return 0.0
    if isinstance(model, ExpModel):
        return 1.0 - math.exp(-model.rate * tau)
    if isinstance(model, LogNormalModel):
        return normal_cdf((math.log(tau) - model.alpha) / model.beta)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def performance_report(models: dict, taus=(1.5,)) -> dict:
    """Mean-time ratios and fast-run probabilities across fitted models.

    models maps (algorithm, range_tag) to {"exponential": ExpModel,
    "lognormal": LogNormalModel} (either family may be missing).  Ratios
    are emitted for every ordered pair of algorithms within the same
    family and range.
    """
    if len(models) < 2:
        raise ValueError("need at least two models to compare")
    ratios = []
    probabilities = []
    keys = list(models.keys())
    families = ("exponential", "lognormal")
    for family in families:
        for (algo, rng_tag), fitted in models.items():
            m = fitted.get(family)
            if m is None:
                continue
            for tau in taus:
                probabilities.append({
                    "family": family,
                    "algorithm": algo,
                    "range": rng_tag,
                    "tau": tau,
                    "probability": fast_run_probability(m, tau),
                })
        for i, key_a in enumerate(keys):
            for key_b in keys:
                if key_a == key_b or key_a[1] != key_b[1]:
                    continue
                ma, mb = models[key_a].get(family), models[key_b].get(family)
                if ma is None or mb is None:
                    continue
                ratios.append({
                    "family": family,
                    "range": key_a[1],
                    "numerator": key_a[0],
                    "denominator": key_b[0],
                    "ratio": ma.mean / mb.mean,
                })
    return {"ratios": ratios, "fast_run_probabilities": probabilities}


def format_quantity(v: float) -> str:
    """Table print style: 3 decimals below 1, 2 up to 100, 1 above."""
    av = abs(v)
    if av < 1.0:
        return f"{v:.3f}"
    if av < 100.0:
        return f"{v:.2f}"
    return f"{v:.1f}"


def summary_table(reports: list[SummaryReport]) -> str:
    """Plain-text table of fitted models, one row per model."""
    cols = ["model", "alpha", "beta", "rate", "t_mean±δt", "mean CI 95%", "median", "mode"]
    rows = []
    for r in reports:
        fq = format_quantity
        ci = f"[{fq(r.mean_ci[0])}, {fq(r.mean_ci[1])}]" if r.mean_ci else "--"
        dt = fq(r.delta_t) if r.delta_t is not None else "--"
        rows.append([
            r.model,
            fq(r.params["alpha"]) if "alpha" in r.params else "--",
            fq(r.params["beta"]) if "beta" in r.params else "--",
            fq(r.params["rate"]) if "rate" in r.params else "--",
            f"{fq(r.mean)} ± {dt}",
            ci,
            fq(r.median),
            fq(r.mode) if r.mode is not None else "--",
        ])
    widths = [max(len(c), *(len(row[i]) for row in rows)) for i, c in enumerate(cols)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*cols)]
    lines.extend(fmt.format(*row) for row in rows)
    return "\n".join(lines)
