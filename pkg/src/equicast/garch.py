"""ARCH/GARCH conditional-volatility modeling.

Gaussian quasi-likelihood with the mean handled by demeaning, so only the
variance parameters are optimized.  The first max(p, q) variances are
pinned to the sample variance of the demeaned returns; this warm-up
convention changes the likelihood value and is relied on by the tests.

Estimation runs in an unconstrained reparameterization: log for omega and
a multinomial-logistic allocation of the stationarity budget across the
alpha/beta coefficients, which keeps every iterate strictly inside
sum(alpha) + sum(beta) <= 1 - 1e-6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter, lfiltic

from .errors import (
    DegenerateSeries,
    InvalidHorizon,
    InvalidParams,
    NoConvergence,
    NonFiniteLikelihood,
    SeriesTooShort,
    TooFewObservations,
)
from .timeseries import ReturnSeries

STATIONARITY_MARGIN = 1e-6
_MASS_CAP = 1.0 - STATIONARITY_MARGIN
_SIM_BURN_IN = 500


@dataclass(frozen=True)
class GarchSpec:
    """Model orders: p squared-return lags, q variance lags (q=0 is pure ARCH)."""

    p: int
    q: int = 0

    def __post_init__(self):
        if self.p < 1 or self.q < 0:
            raise InvalidParams(f"need p >= 1 and q >= 0, got ({self.p}, {self.q})")


@dataclass(frozen=True)
class GarchParams:
    omega: float
    alpha: np.ndarray
    beta: np.ndarray
    mu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=np.float64).reshape(-1))
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=np.float64).reshape(-1))

    @property
    def persistence(self) -> float:
        return float(np.sum(self.alpha) + np.sum(self.beta))

    def validate(self, spec: GarchSpec) -> "GarchParams":
        if len(self.alpha) != spec.p or len(self.beta) != spec.q:
            raise InvalidParams(
                f"expected {spec.p} alpha and {spec.q} beta coefficients, "
                f"got {len(self.alpha)} and {len(self.beta)}"
            )
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise InvalidParams("omega must be positive and finite")
        if np.any(self.alpha < 0) or np.any(self.beta < 0):
            raise InvalidParams("alpha and beta coefficients must be nonnegative")
        if not np.isfinite(self.mu):
            raise InvalidParams("mu must be finite")
        if self.persistence >= 1.0:
            raise InvalidParams(f"sum(alpha) + sum(beta) = {self.persistence:.6f} >= 1")
        return self


@dataclass(frozen=True)
class GarchFit:
    params: GarchParams
    spec: GarchSpec
    sigma_path: np.ndarray  # conditional volatility per training date
    log_likelihood: float
    converged: bool
    iterations: int

    def to_dict(self) -> dict:
        return {
            "omega": float(self.params.omega),
            "alpha": [float(a) for a in self.params.alpha],
            "beta": [float(b) for b in self.params.beta],
            "mu": float(self.params.mu),
            "log_likelihood": float(self.log_likelihood),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
        }

    @classmethod
    def from_dict(cls, d: dict, x=None) -> "GarchFit":
        spec = GarchSpec(p=len(d["alpha"]), q=len(d["beta"]))
        params = GarchParams(d["omega"], np.array(d["alpha"]), np.array(d["beta"]), d["mu"])
        sigma = np.zeros(0)
        if x is not None:
            sigma = np.sqrt(conditional_variance_path(x, params, spec))
        return cls(params, spec, sigma, d["log_likelihood"], d["converged"], d["iterations"])


def _values(x) -> np.ndarray:
    v = getattr(x, "values", x)
    return np.asarray(v, dtype=np.float64).ravel()


def _arch_drive(xsq: np.ndarray, omega: float, alpha: np.ndarray) -> np.ndarray:
    """u_t = omega + sum_i alpha_i * xsq_{t-i}, valid for t >= p."""
    conv = np.convolve(xsq, alpha)
    u = np.full(xsq.size, omega)
    p = alpha.size
    u[p:] += conv[p - 1 : xsq.size - 1]
    return u


def _variance_filter(u: np.ndarray, beta: np.ndarray, warmup: int, init: float) -> np.ndarray:
    """Apply sig2_t = u_t + sum_j beta_j sig2_{t-j} for t >= warmup.

    The first ``warmup`` entries are pinned to ``init``.
    """
    n = u.size
    sig2 = np.empty(n)
    sig2[:warmup] = init
    if n <= warmup:
        return sig2
    if beta.size == 0:
        sig2[warmup:] = u[warmup:]
        return sig2
    a = np.concatenate(([1.0], -beta))
    zi = lfiltic([1.0], a, y=np.full(beta.size, init))
    sig2[warmup:], _ = lfilter([1.0], a, u[warmup:], zi=zi)
    return sig2


def conditional_variance_path(x, params: GarchParams, spec: GarchSpec) -> np.ndarray:
    """Conditional variance per observation.

    The first max(p, q) entries are the sample variance (n-1 denominator)
    of the demeaned series; the recursion applies thereafter.
    """
    params.validate(spec)
    xd = _values(x) - params.mu
    m = max(spec.p, spec.q)
    if xd.size <= m:
        raise SeriesTooShort(f"need more than max(p, q) = {m} observations")
    init = float(np.var(xd, ddof=1))
    u = _arch_drive(xd * xd, params.omega, params.alpha)
    return _variance_filter(u, params.beta, m, init)


def negative_log_likelihood(x, params: GarchParams, spec: GarchSpec) -> float:
    """Gaussian quasi negative log-likelihood over the post-warm-up range."""
    xd = _values(x) - params.mu
    sig2 = conditional_variance_path(x, params, spec)
    m = max(spec.p, spec.q)
    s = sig2[m:]
    nll = 0.5 * float(np.sum(np.log(2.0 * np.pi) + np.log(s) + xd[m:] ** 2 / s))
    if not np.isfinite(nll):
        raise NonFiniteLikelihood(f"nll = {nll}")
    return nll


# ------------------------------------------------------- reparameterization

def to_unconstrained(params: GarchParams, spec: GarchSpec) -> np.ndarray:
    """Map (omega, alpha, beta) into the unconstrained optimizer space."""
    params.validate(spec)
    coefs = np.concatenate([params.alpha, params.beta])
    g = np.maximum(coefs / _MASS_CAP, 1e-12)
    slack = max(1.0 - g.sum(), 1e-12)
    return np.concatenate([[math.log(params.omega)], np.log(g / slack)])


def from_unconstrained(theta: np.ndarray, spec: GarchSpec, mu: float = 0.0) -> GarchParams:
    """Inverse of :func:`to_unconstrained` (up to coefficient clamping)."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.size != 1 + spec.p + spec.q:
        raise InvalidParams(f"expected {1 + spec.p + spec.q} parameters, got {theta.size}")
    omega = math.exp(float(np.clip(theta[0], -700.0, 700.0)))
    z = theta[1:]
    # softmax over (slack, coefs); slack absorbs the remaining budget
    zmax = max(0.0, float(np.max(z))) if z.size else 0.0
    ez = np.exp(z - zmax)
    denom = math.exp(-zmax) + ez.sum()
    g = ez / denom
    coefs = _MASS_CAP * g
    return GarchParams(omega, coefs[: spec.p], coefs[spec.p :], mu)


def nll_objective(x, theta: np.ndarray, spec: GarchSpec, mu: float = 0.0):
    """Negative log-likelihood and its analytic gradient in unconstrained space.

    Gradients flow through the full variance recursion: the sensitivity of
    sig2_t to each parameter satisfies the same linear filter as the
    variance itself, so each channel is one more lfilter pass.
    """
    xd = _values(x) - mu
    n = xd.size
    params = from_unconstrained(theta, spec, mu)
    p, q = spec.p, spec.q
    m = max(p, q)
    if n <= m:
        raise SeriesTooShort(f"need more than max(p, q) = {m} observations")

    xsq = xd * xd
    init = float(np.var(xd, ddof=1))
    u = _arch_drive(xsq, params.omega, params.alpha)
    sig2 = _variance_filter(u, params.beta, m, init)
    s = sig2[m:]
    if np.any(s <= 0):
        raise NonFiniteLikelihood("nonpositive variance in recursion")
    nll = 0.5 * float(np.sum(np.log(2.0 * np.pi) + np.log(s) + xsq[m:] / s))
    if not np.isfinite(nll):
        raise NonFiniteLikelihood(f"nll = {nll}")

    # dNLL/dsig2_t, nonzero on the scored range only
    w = np.zeros(n)
    w[m:] = 0.5 * (1.0 / s - xsq[m:] / (s * s))

    # Sensitivities of sig2 wrt each natural parameter share the beta filter.
    def sens(drive: np.ndarray) -> float:
        path = _variance_filter(drive, params.beta, m, 0.0)
        return float(np.dot(w, path))

    ones = np.ones(n)
    d_omega = sens(ones)
    d_alpha = np.empty(p)
    for i in range(1, p + 1):
        drive = np.zeros(n)
        drive[i:] = xsq[:-i]
        d_alpha[i - 1] = sens(drive)
    d_beta = np.empty(q)
    for j in range(1, q + 1):
        drive = np.zeros(n)
        drive[j:] = sig2[:-j]
        d_beta[j - 1] = sens(drive)

    # Chain rule through the reparameterization.
    grad = np.empty(theta.size)
    grad[0] = d_omega * params.omega
    if p + q:
        d_coef = np.concatenate([d_alpha, d_beta])
        g = np.concatenate([params.alpha, params.beta]) / _MASS_CAP
        # dg_l/dz_k = g_k (delta_lk - g_l)
        grad[1:] = _MASS_CAP * g * (d_coef - np.dot(d_coef, g))
    return nll, grad


# ------------------------------------------------------------------ fitting

def _initial_params(sample_var: float, spec: GarchSpec) -> GarchParams:
    alpha_mass = 0.10 if spec.q else 0.30
    beta_mass = 0.80 if spec.q else 0.0
    alpha = np.full(spec.p, alpha_mass / spec.p)
    beta = np.full(spec.q, beta_mass / spec.q) if spec.q else np.zeros(0)
    omega = sample_var * max(1.0 - alpha_mass - beta_mass, 0.05)
    return GarchParams(omega, alpha, beta)


def fit_garch(x, spec: GarchSpec, n_starts: int = 5, max_iter: int = 2000) -> GarchFit:
    """Constrained maximum-likelihood GARCH fit.

    The mean is fixed to the sample mean before variance fitting.  The
    optimizer is quasi-Newton (L-BFGS-B) with the analytic gradient of
    :func:`nll_objective`, restarted from ``n_starts`` deterministic
    perturbations of a moment-based initial point; the best final
    likelihood wins.
    """
    v = _values(x)
    n = v.size
    if n < 50 * (spec.p + spec.q):
        raise TooFewObservations(
            f"need at least 50 * (p + q) = {50 * (spec.p + spec.q)} observations, got {n}"
        )
    mu = float(np.mean(v))
    xd = v - mu
    sample_var = float(np.var(xd, ddof=1))
    if sample_var <= 0.0:
        raise DegenerateSeries("zero-variance series")

    base = to_unconstrained(_initial_params(sample_var, spec), spec)
    rng = np.random.default_rng(0)
    starts = [base]
    for _ in range(n_starts - 1):
        starts.append(base + rng.normal(scale=0.5, size=base.size))

    def objective(theta):
        try:
            return nll_objective(v, theta, spec, mu)
        except NonFiniteLikelihood:
            return 1e12, np.zeros_like(theta)

    best = None
    total_iters = 0
    for theta0 in starts:
        res = minimize(
            objective,
            theta0,
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": max_iter, "ftol": 1e-8, "gtol": 1e-6},
        )
        total_iters += int(res.nit)
        if not np.isfinite(res.fun):
            continue
        if best is None or res.fun < best.fun:
            best = res
    if best is None or best.fun >= 1e12:
        raise NoConvergence(total_iters, "all optimizer starts failed to produce a finite likelihood")

    params = from_unconstrained(best.x, spec, mu)
    sig2 = conditional_variance_path(v, params, spec)
    return GarchFit(
        params=params,
        spec=spec,
        sigma_path=np.sqrt(sig2),
        log_likelihood=-float(best.fun),
        converged=bool(best.success),
        iterations=int(best.nit),
    )


def forecast_volatility(fit: GarchFit, x, horizon: int) -> np.ndarray:
    """Multi-step conditional volatility forecast.

    Future squared returns are replaced by their conditional expectation
    (the variance forecast itself), so the path converges monotonically
    toward the unconditional level omega / (1 - sum(alpha) - sum(beta)).
    """
    if horizon < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {horizon}")
    params, spec = fit.params, fit.spec
    xd = _values(x) - params.mu
    n = xd.size
    sig2 = conditional_variance_path(x, params, spec)
    m2 = np.concatenate([xd * xd, np.zeros(horizon)])    # realized then expected squares
    s2 = np.concatenate([sig2, np.zeros(horizon)])
    for k in range(horizon):
        t = n + k
        value = params.omega
        for i in range(1, spec.p + 1):
            value += params.alpha[i - 1] * m2[t - i]
        for j in range(1, spec.q + 1):
            value += params.beta[j - 1] * s2[t - j]
        s2[t] = value
        m2[t] = value
    return np.sqrt(s2[n:])


def simulate_garch(params: GarchParams, spec: GarchSpec, n: int, seed: int) -> ReturnSeries:
    """Seeded GARCH simulation used as the estimation test oracle.

    Draws standard-normal innovations, runs the variance recursion from
    the unconditional level through a fixed burn-in, and returns the last
    ``n`` values as a return series.  Identical seeds give identical output.
    """
    params.validate(spec)
    if n < 1:
        raise InvalidParams(f"n must be >= 1, got {n}")
    uncond = params.omega / (1.0 - params.persistence)
    m = max(spec.p, spec.q)
    total = n + _SIM_BURN_IN
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(total + m)

    xsq = np.full(total + m, uncond)
    sig2 = np.full(total + m, uncond)
    x = np.zeros(total + m)
    alpha, beta, omega = params.alpha, params.beta, params.omega
    p, q = spec.p, spec.q
    for t in range(m, total + m):
        v = omega
        for i in range(1, p + 1):
            v += alpha[i - 1] * xsq[t - i]
        for j in range(1, q + 1):
            v += beta[j - 1] * sig2[t - j]
        sig2[t] = v
        x[t] = e[t] * math.sqrt(v)
        xsq[t] = x[t] * x[t]

    values = params.mu + x[-n:]
    dates = tuple(f"t{i:06d}" for i in range(n))
    return ReturnSeries(dates=dates, values=values, base_price=100.0, label="garch-sim")
