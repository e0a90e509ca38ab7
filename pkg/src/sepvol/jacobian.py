"""Diagonal-sector jacobians as functions of the ratio ``mu``.

Both closed forms are ratios whose numerator and denominator vanish to high
order at ``mu = 1`` (order 9 for the real case, 15 for the complex case), so
plain double-precision evaluation loses every significant digit well before
``mu`` reaches 1 and even produces spurious sign changes. The evaluator here
uses the closed form (in extended precision where needed) below a switch
point and an exact-rational Taylor series about ``mu = 1`` above it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy import integrate

from .series import TruncatedSeries

CASES = ("real", "complex")

# polynomials in mu, increasing powers
_REAL_P = [1, 0, 16, 0, 36, 0, 16, 0, 1]  # (mu^2+2)(mu^4+14mu^2+8)mu^2 + 1
_REAL_Q = [-5, 0, -32, 0, 0, 0, 32, 0, 5]  # 5mu^8 + 32mu^6 - 32mu^2 - 5
_CPLX_V1 = [-363, 0, -9947, 0, -48363, 0, -42875, 0, 42875, 0, 48363, 0, 9947, 0, 363]
_CPLX_V2 = [1, 0, 49, 0, 441, 0, 1225, 0, 1225, 0, 441, 0, 49, 0, 1]

POLE_ORDER = {"real": 9, "complex": 15}
EXACT_INTEGRAL = {
    "real": math.pi**2 / 2293760,
    "complex": 1.0 / 2018016000,
}


class NumericalError(ArithmeticError):
    """Quadrature or series construction failed."""


def _check_case(case: str) -> None:
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}, got {case!r}")


def _poly(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def closed_form_naive(case: str, mu):
    """Direct double-precision closed form; only for diagnostics."""
    _check_case(case)
    mu = np.asarray(mu, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if case == "real":
            num = mu**4 * (12 * _poly(_REAL_P, mu) * np.log(mu) - 5 * _poly(_REAL_Q, mu))
            return num / (1890 * (mu**2 - 1) ** 9)
        v = _poly(_CPLX_V1, mu) - 140 * _poly(_CPLX_V2, mu) * np.log(mu)
        return -(mu**7) * v / (1801800 * (mu**2 - 1) ** 15)


def closed_form_mp(case: str, mu, dps: int = 30):
    """Closed form as an ``mpf`` carrying about ``dps`` correct digits.

    The working precision is raised by the number of digits the removable
    singularity cancels at this ``mu``.
    """
    _check_case(case)
    x = 1.0 - float(mu) ** 2
    lost = POLE_ORDER[case] * max(0.0, -math.log10(abs(x))) if x else 0.0
    with mpmath.workdps(int(dps + lost + 5)):
        m = mpmath.mpf(mu)
        if case == "real":
            num = m**4 * (12 * _poly(_REAL_P, m) * mpmath.log(m) - 5 * _poly(_REAL_Q, m))
            val = num / (1890 * (m**2 - 1) ** 9)
        else:
            v = _poly(_CPLX_V1, m) - 140 * _poly(_CPLX_V2, m) * mpmath.log(m)
            val = -(m**7) * v / (1801800 * (m**2 - 1) ** 15)
    return +val


def _cancellation(case: str, mu: np.ndarray) -> np.ndarray:
    """Ratio of term magnitudes to the numerator; large means digits lost."""
    absc = lambda c: [abs(v) for v in c]  # noqa: E731
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.abs(np.log(mu))
        if case == "real":
            terms = 12 * _poly(_REAL_P, mu) * lg + 5 * _poly(absc(_REAL_Q), mu)
            num = 12 * _poly(_REAL_P, mu) * np.log(mu) - 5 * _poly(_REAL_Q, mu)
        else:
            terms = _poly(absc(_CPLX_V1), mu) + 140 * _poly(_CPLX_V2, mu) * lg
            num = _poly(_CPLX_V1, mu) - 140 * _poly(_CPLX_V2, mu) * np.log(mu)
        return np.where(num != 0, terms / np.abs(num), np.inf)


def closed_form(case: str, mu):
    """Closed form evaluated to full double accuracy.

    Points where double arithmetic would lose more than two digits to
    cancellation are recomputed with mpmath at a precision scaled to the
    order of the removable singularity.
    """
    _check_case(case)
    mu_arr = np.asarray(mu, dtype=float)
    out = np.array(closed_form_naive(case, mu_arr), dtype=float, ndmin=1)
    flat = mu_arr.reshape(-1)
    bad = np.flatnonzero(~(_cancellation(case, flat) <= 100.0))
    for k in bad:
        out[k] = float(closed_form_mp(case, float(flat[k])))
    out = out.reshape(mu_arr.shape)
    return float(out) if out.ndim == 0 else out


def _numerator_series(case: str, n: int) -> TruncatedSeries:
    """Numerator of the closed form (without its constant scale) in ``t = mu - 1``."""
    mu = TruncatedSeries([1, 1], n)
    log_mu = TruncatedSeries.log1p(n)

    def at_mu(coeffs):
        acc = TruncatedSeries([0], n)
        for c in reversed(coeffs):
            acc = acc * mu + c
        return acc

    if case == "real":
        return mu**4 * (12 * at_mu(_REAL_P) * log_mu - 5 * at_mu(_REAL_Q))
    return -(mu**7) * (at_mu(_CPLX_V1) - 140 * at_mu(_CPLX_V2) * log_mu)


def series_remainder(case: str, degree: int = 100) -> list[Fraction]:
    """Numerator coefficients below the pole order (all zero when consistent)."""
    _check_case(case)
    k = POLE_ORDER[case]
    return _numerator_series(case, degree + 1 + k).divide_by_power(k)[1]


@lru_cache(maxsize=16)
def series_about_one(case: str, degree: int = 100) -> tuple[Fraction, ...]:
    """Exact Taylor coefficients of the jacobian in ``t = mu - 1``.

    The numerator is expanded with ``log(1 + t)`` as a series, divided by
    ``t^k`` (``k`` the pole order, after checking the dropped coefficients
    are exactly zero) and then by ``(2 + t)^k`` via the binomial series.
    """
    _check_case(case)
    if degree < 20:
        raise ValueError("series degree must be at least 20")
    k = POLE_ORDER[case]
    quotient, remainder = _numerator_series(case, degree + 1 + k).divide_by_power(k)
    if any(remainder):
        raise NumericalError(f"numerator of the {case} jacobian does not vanish to order {k} at mu = 1")
    scale = Fraction(1, 1890) if case == "real" else Fraction(1, 1801800)
    # (mu^2 - 1)^k = t^k 2^k (1 + t/2)^k
    inv = TruncatedSeries.binomial(Fraction(1, 2), -k, degree + 1)
    jac = quotient * inv * (scale / 2**k)
    return tuple(jac.coeffs[: degree + 1])


@dataclass(frozen=True)
class JacobianEvaluator:
    """Piecewise jacobian: closed form up to ``switch_point``, series above."""

    case: str = "real"
    switch_point: float = 0.95
    series_degree: int = 100
    coeffs: tuple[Fraction, ...] = field(init=False, repr=False, compare=False)
    _float_coeffs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_case(self.case)
        if not 0.0 < self.switch_point < 1.0:
            raise ValueError("switch_point must lie in (0, 1)")
        coeffs = series_about_one(self.case, self.series_degree)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_float_coeffs", np.array([float(c) for c in coeffs]))

    def series(self, mu):
        """Truncated Taylor series in double precision."""
        t = np.asarray(mu, dtype=float) - 1.0
        acc = np.zeros_like(t)
        for c in self._float_coeffs[::-1]:
            acc = acc * t + c
        return acc

    def series_mp(self, mu, dps: int = 50):
        """Series evaluated with exact coefficients at ``dps`` digits."""
        with mpmath.workdps(dps):
            t = mpmath.mpf(mu) - 1
            acc = mpmath.mpf(0)
            for c in reversed(self.coeffs):
                acc = acc * t + mpmath.mpf(c.numerator) / c.denominator
            return acc

    def __call__(self, mu):
        mu_arr = np.asarray(mu, dtype=float)
        if np.any(mu_arr <= 0) or np.any(mu_arr > 1):
            raise ValueError("jacobian is evaluated on 0 < mu <= 1; fold larger mu with mu -> 1/mu")
        near = mu_arr > self.switch_point
        out = np.empty(mu_arr.shape)
        if np.any(near):
            out[near] = self.series(mu_arr[near])
        if np.any(~near):
            out[~near] = closed_form(self.case, mu_arr[~near])
        return float(out) if out.ndim == 0 else out


def jac_eval(ev: JacobianEvaluator, mu):
    return ev(mu)


def _quad(fn, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(fn, lo, hi, epsabs=1e-16, epsrel=1e-12, limit=200)
        except integrate.IntegrationWarning as exc:
            raise NumericalError(f"quadrature on [{lo}, {hi}] did not converge: {exc}") from exc
    return val


def integral_check(case: str, lo: float = 0.0, hi: float = 1.0, ev: JacobianEvaluator | None = None) -> float:
    """Adaptive Gauss-Kronrod integral of the jacobian over ``[lo, hi]``."""
    ev = ev or JacobianEvaluator(case)
    if ev.case != case:
        raise ValueError("evaluator case mismatch")
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError(f"integration range [{lo}, {hi}] not inside [0, 1]")
    sp = ev.switch_point
    fn_low = lambda m: closed_form(case, m) if m > 0 else 0.0  # noqa: E731
    return _quad(fn_low, lo, min(hi, sp)) + _quad(ev.series, max(lo, sp), hi)


def naive_sign_changes(case: str, lo: float = 0.5, hi: float = 0.9999, n: int = 200001) -> np.ndarray:
    """Locations where the double-precision closed form changes sign.

    The true jacobian is positive on (0, 1); any sign change reported here
    is a cancellation artifact.
    """
    mu = np.linspace(lo, hi, n)
    v = closed_form_naive(case, mu)
    s = np.sign(v)
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    return 0.5 * (mu[idx] + mu[idx + 1])
