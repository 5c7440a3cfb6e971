"""Closed forms for the two-variable power-kernel expansion.

Everything here evaluates gamma-product formulas: the expansion
coefficients of |s-t|^(2 nu) sgn^eps(s-t) in products of ultraspherical
polynomials, the sheared plus-part integrals and their sign variants, the
projection identity linking the two, classical specializations (Selberg,
Warnaar, Tarasov-Varchenko, Dotsenko-Fateev, Mehta), the trigonometric and
Hermite limit forms, and the sup-norm tail machinery used to pick
truncation orders.  All gamma ratios run in log space with separate sign
tracking; a gamma pole in a denominator produces an exact zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln as _gammaln

from .orthopoly import (
    gauss_gegenbauer_rule,
    gegenbauer_all,
    gegenbauer_endpoint,
    gegenbauer_norm_sq,
    u_prefactor,
)
from .specfun import DomainError, gamma_ratio, hyp2f1, pochhammer, rgamma

LN2 = math.log(2.0)
LNPI = math.log(math.pi)

#: Search cap for truncation orders.
MAX_ORDER = 2000


class HypothesisError(DomainError):
    """The series convergence hypothesis 2 nu > lambda + mu + 4 fails."""


@dataclass(frozen=True)
class ExpansionParams:
    """Kernel parameters: |s-t|^(2 nu) sgn^eps(s-t) expanded in the
    lam/mu ultraspherical bases."""

    lam: float
    mu: float
    nu: float
    eps: int = 0

    def __post_init__(self):
        if self.lam <= 0.0 or self.mu <= 0.0 or self.nu <= 0.0:
            raise DomainError("requires lam, mu, nu > 0")
        if self.eps not in (0, 1):
            raise DomainError("eps must be 0 or 1")

    @property
    def series_hypothesis_ok(self) -> bool:
        return 2.0 * self.nu > self.lam + self.mu + 4.0

    def require_hypothesis(self, force: bool = False) -> None:
        if not force and not self.series_hypothesis_ok:
            raise HypothesisError(
                f"series needs 2*nu > lam + mu + 4 "
                f"(2*{self.nu} <= {self.lam} + {self.mu} + 4); pass force to override"
            )


@dataclass(frozen=True)
class CoeffTable:
    params: ExpansionParams
    L: int
    M: int
    values: np.ndarray
    parity_zeroed: bool = True


@dataclass(frozen=True)
class SeriesEvalResult:
    value: float
    order_used: tuple
    tail_bound: float


def expansion_coeff(lam: float, mu: float, nu: float, ell: int, m: int) -> float:
    """Coefficient of C_ell(s) C_m(t) in the two-variable power expansion.

    (-1)^m (lam+ell)(mu+m) Gamma(lam+mu+2nu+1) Gamma(lam) Gamma(mu)
    Gamma(2nu+1) divided by 2^(2nu) and the four gammas at
    nu+1+(lam+mu)/2 +- (lam+ell)/2 +- (mu+m)/2.  A pole in any denominator
    gamma gives an exact zero, which is what truncates polynomial kernels.
    """
    if lam <= 0.0 or mu <= 0.0 or nu <= 0.0:
        raise DomainError("requires lam, mu, nu > 0")
    if ell < 0 or m < 0:
        raise DomainError("indices must be nonnegative")
    base = nu + 1.0 + (lam + mu) / 2.0
    p, q = (lam + ell) / 2.0, (mu + m) / 2.0
    return (
        (lam + ell)
        * (mu + m)
        * gamma_ratio(
            (lam + mu + 2.0 * nu + 1.0, lam, mu, 2.0 * nu + 1.0),
            (base + p + q, base + p - q, base - p + q, base - p - q),
            scale_log=-2.0 * nu * LN2,
            sign=-1.0 if m % 2 else 1.0,
        )
    )


def _is_pole(x: np.ndarray) -> np.ndarray:
    r = np.round(x)
    return (x < 0.5) & (r <= 0.0) & (np.abs(x - r) <= 1e-10)


def _sign_gamma(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, 1.0, np.where(np.floor(-x) % 2 == 0, -1.0, 1.0))


def coeff_grid(params: ExpansionParams, L: int, M: int) -> np.ndarray:
    """Dense (L+1) x (M+1) coefficient grid without the parity mask.

    Vectorized counterpart of expansion_coeff; identical pole snapping.
    """
    lam, mu, nu = params.lam, params.mu, params.nu
    ell = np.arange(L + 1)[:, None]
    m = np.arange(M + 1)[None, :]
    base = nu + 1.0 + (lam + mu) / 2.0
    p = (lam + ell) / 2.0
    q = (mu + m) / 2.0
    lognum = (
        _gammaln(lam + mu + 2.0 * nu + 1.0)
        + _gammaln(lam)
        + _gammaln(mu)
        + _gammaln(2.0 * nu + 1.0)
        - 2.0 * nu * LN2
    )
    out = np.full((L + 1, M + 1), lognum)
    sign = np.where(m % 2 == 0, 1.0, -1.0) * np.ones((L + 1, M + 1))
    dead = np.zeros((L + 1, M + 1), dtype=bool)
    for arg in (base + p + q, base + p - q, base - p + q, base - p - q):
        arg = np.broadcast_to(arg, out.shape)
        dead |= _is_pole(arg)
        safe = np.where(dead, 1.0, arg)
        out -= _gammaln(safe)
        sign *= _sign_gamma(safe)
    vals = sign * np.exp(out) * (lam + ell) * (mu + m)
    vals[dead] = 0.0
    return vals


def coeff_table(params: ExpansionParams, L: int, M: int) -> CoeffTable:
    """Coefficient table with entries of the wrong parity zeroed."""
    vals = coeff_grid(params, L, M)
    ell = np.arange(L + 1)[:, None]
    m = np.arange(M + 1)[None, :]
    vals = np.where((ell + m) % 2 == params.eps, vals, 0.0)
    return CoeffTable(params, L, M, vals)


def kernel_value(params: ExpansionParams, s, t):
    """|s-t|^(2 nu) sgn^eps(s-t) evaluated pointwise, with sgn(0) = 0."""
    d = np.asarray(s, dtype=float) - np.asarray(t, dtype=float)
    val = np.abs(d) ** (2.0 * params.nu)
    if params.eps:
        val = val * np.sign(d)
    return val if np.ndim(val) else float(val)


def series_eval_grid(
    params: ExpansionParams, s, t, L: int, M: int, force: bool = False
) -> np.ndarray:
    """Partial expansion sum on the tensor grid s x t."""
    params.require_hypothesis(force)
    table = coeff_table(params, L, M)
    cs = gegenbauer_all(params.lam, L, np.atleast_1d(s))
    ct = gegenbauer_all(params.mu, M, np.atleast_1d(t))
    return cs.T @ table.values @ ct


def series_eval(
    params: ExpansionParams, s: float, t: float, L: int, M: int, force: bool = False
) -> SeriesEvalResult:
    """Partial expansion sum at one point, with a rigorous sup-norm tail bound.

    The bound sums |coefficient| times the endpoint values of both
    polynomials over the discarded index set, so it dominates the true
    truncation error everywhere on the square.
    """
    value = float(series_eval_grid(params, [s], [t], L, M, force=force)[0, 0])
    bound = tail_bound(params, L, M) if params.series_hypothesis_ok else math.inf
    return SeriesEvalResult(value, (L, M), bound)


def _term_sup_grid(params: ExpansionParams, L: int, M: int) -> np.ndarray:
    """|b_{l,m}| C_l(1) C_m(1) with the parity mask applied."""
    lam, mu = params.lam, params.mu
    vals = np.abs(coeff_grid(params, L, M))
    ell = np.arange(L + 1)
    m = np.arange(M + 1)
    ce = np.exp(_gammaln(ell + 2.0 * lam) - _gammaln(ell + 1.0) - _gammaln(2.0 * lam))
    cm = np.exp(_gammaln(m + 2.0 * mu) - _gammaln(m + 1.0) - _gammaln(2.0 * mu))
    vals = vals * ce[:, None] * cm[None, :]
    mask = (ell[:, None] + m[None, :]) % 2 == params.eps
    return np.where(mask, vals, 0.0)


def tail_bound(params: ExpansionParams, L: int, M: int, window: int = 32) -> float:
    """Upper bound on the sup norm of the discarded expansion tail.

    Sums |coefficient| C(1) C(1) exactly over the discarded part of a
    square window of side max(L, M) + window; everything outside the window
    lies on anti-diagonals ell + m > W and is bounded by an
    integral-comparison extrapolation of the anti-diagonal band sums, whose
    decay is the n^(lam - N)-type majorant direction.  The extrapolated
    part carries a safety factor of two.
    """
    W = max(L, M) + window
    T = _term_sup_grid(params, W, W)
    ell = np.arange(W + 1)
    discard = (ell[:, None] > L) | (ell[None, :] > M)
    finite = float(T[discard].sum())

    bands = np.bincount(
        (ell[:, None] + ell[None, :]).ravel(), weights=T.ravel(), minlength=2 * W + 1
    )
    s_hi = W if (W - params.eps) % 2 == 0 else W - 1
    s_lo = s_hi - 2
    b_hi, b_lo = float(bands[s_hi]), float(bands[s_lo])
    if b_hi == 0.0:
        rest = 0.0  # bands terminated: polynomial kernel
    elif b_lo <= b_hi or s_lo <= 0:
        rest = math.inf
    else:
        q = math.log(b_lo / b_hi) / math.log(s_hi / s_lo)
        rest = math.inf if q <= 1.0 else b_hi * s_hi / (q - 1.0)
    return finite + 2.0 * rest


def truncation_order(params: ExpansionParams, tol: float) -> tuple:
    """Smallest square order on the search ladder whose tail bound is < tol."""
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    params.require_hypothesis()
    candidates = [(0, 1)] if params.eps == 1 else [(0, 0)]
    n = 1
    while n <= MAX_ORDER:
        candidates.append((n, n))
        n += 1 if n < 64 else (4 if n < 256 else (16 if n < 1024 else 64))
    for L, M in candidates:
        if tail_bound(params, L, M) < tol:
            return (L, M)
    raise DomainError(f"tail bound cannot reach {tol} by order {MAX_ORDER}")


def plus_part_integral(
    lam: float, mu: float, nu: float, ell: int, m: int, x: float
) -> float:
    """Closed form of int int (s - x t)_+^(2 nu) u_ell(s) u_m(t) ds dt,
    with u the normalized weighted ultraspherical polynomials.

    Equals (-1)^m pi^2 Gamma(2nu+1) x^m 2F1(-nu+(ell+m)/2,
    -lam-nu+(m-ell)/2; mu+m+1; x^2) over 2^(2nu+1)
    Gamma(nu-(ell+m)/2+1) Gamma(mu+m+1) Gamma(lam+nu+(ell-m)/2+1).
    """
    if lam <= -0.5 or mu <= -0.5 or nu <= 0.0:
        raise DomainError("requires lam, mu > -1/2 and nu > 0")
    if not -1.0 <= x <= 1.0:
        raise DomainError("requires -1 <= x <= 1")
    if ell < 0 or m < 0:
        raise DomainError("indices must be nonnegative")
    coef = gamma_ratio(
        (2.0 * nu + 1.0,),
        (nu - (ell + m) / 2.0 + 1.0, mu + m + 1.0, lam + nu + (ell - m) / 2.0 + 1.0),
        scale_log=2.0 * LNPI - (2.0 * nu + 1.0) * LN2,
        sign=-1.0 if m % 2 else 1.0,
    )
    if coef == 0.0:
        return 0.0
    f = hyp2f1(-nu + (ell + m) / 2.0, -lam - nu + (m - ell) / 2.0, mu + m + 1.0, x * x)
    return coef * x**m * f.value


SHEAR_KINDS = ("plus", "minus", "abs", "abssgn")


def sheared_integral(
    kind: str, lam: float, mu: float, nu: float, ell: int, m: int, x: float
) -> float:
    """Sign variants of the sheared kernel integral.

    minus flips by (-1)^(ell+m); abs keeps only even ell+m (factor
    1+(-1)^(ell+m)); abssgn keeps only odd (factor 1-(-1)^(ell+m)).
    """
    if kind not in SHEAR_KINDS:
        raise DomainError(f"unknown variant {kind!r}")
    parity = -1.0 if (ell + m) % 2 else 1.0
    if kind == "abs" and parity < 0:
        return 0.0
    if kind == "abssgn" and parity > 0:
        return 0.0
    base = plus_part_integral(lam, mu, nu, ell, m, x)
    if kind == "plus":
        return base
    if kind == "minus":
        return parity * base
    return 2.0 * base


def projection_integral(params: ExpansionParams, ell: int, m: int) -> float:
    """Closed form of the kernel's projection onto C_ell(s) C_m(t) under the
    product weight: (1+(-1)^(ell+m+eps))/2 times coefficient times both
    squared norms."""
    if (ell + m + params.eps) % 2:
        return 0.0
    return (
        expansion_coeff(params.lam, params.mu, params.nu, ell, m)
        * gegenbauer_norm_sq(params.lam, ell)
        * gegenbauer_norm_sq(params.mu, m)
    )


def plus_base_integral(a: float, b: float, c: float, x: float) -> float:
    """Closed form of int int (s - x t)_+^(2c-1) (1-s^2)^(a-1) (1-t^2)^(b-1).

    sqrt(pi) Gamma(a) Gamma(b) Gamma(c) / (2 Gamma(a+c) Gamma(b+1/2)) times
    2F1(-c+1/2, -a-c+1; b+1/2; x^2).
    """
    if a <= 0.0 or b <= 0.0 or c <= 0.5:
        raise DomainError("requires a, b > 0 and c > 1/2")
    if not -1.0 <= x <= 1.0:
        raise DomainError("requires -1 <= x <= 1")
    coef = gamma_ratio(
        (a, b, c),
        (a + c, b + 0.5),
        scale_log=0.5 * LNPI - LN2,
    )
    return coef * hyp2f1(0.5 - c, 1.0 - a - c, b + 0.5, x * x).value


def moment_of_plus_integral(
    lam: float, mu: float, nu: float, beta: float, ell: int, m: int
) -> float:
    """Closed form of int_0^1 x^(2 mu + m + 1) (1-x^2)^beta B(x) dx where
    B(x) is plus_part_integral at shear x."""
    if beta <= -1.0:
        raise DomainError("requires beta > -1")
    return gamma_ratio(
        (2.0 * nu + 1.0, beta + 1.0, lam + mu + 2.0 * nu + beta + 2.0),
        (
            nu - (ell + m) / 2.0 + 1.0,
            lam + nu + (ell - m) / 2.0 + 1.0,
            mu + nu + beta + (m - ell) / 2.0 + 2.0,
            lam + mu + nu + beta + (m + ell) / 2.0 + 2.0,
        ),
        scale_log=2.0 * LNPI - (2.0 * nu + 2.0) * LN2,
        sign=-1.0 if m % 2 else 1.0,
    )


def shear_averaged_projection(
    lam: float, mu: float, nu: float, b: float, ell: int, m: int
) -> float:
    """Closed form of the triple integral of |s - t sqrt(y)|^(2 nu)
    C_ell(s) C_m(t) against the y^(mu+m/2) (1-y)^b and product weights.

    Defined for even ell + m; the odd case is a domain error.
    """
    if (ell + m) % 2:
        raise DomainError("requires ell + m even")
    if lam <= -0.5 or mu <= -0.5 or nu <= 0.0 or b <= -1.0:
        raise DomainError("requires lam, mu > -1/2, nu > 0, b > -1")
    half = (ell + m) // 2
    const = math.sqrt(math.pi) * (-1.0) ** ((m - ell) // 2) / (
        math.factorial(ell) * math.factorial(m)
    )
    poch = (
        pochhammer(2.0 * lam, ell)
        * pochhammer(2.0 * mu, m)
        * pochhammer(-nu, half)
    )
    return const * poch * gamma_ratio(
        (lam + 0.5, mu + 0.5, nu + 0.5, lam + mu + 2.0 * nu + b + 2.0, b + 1.0),
        (
            lam + mu + nu + b + half + 2.0,
            lam + nu + (ell - m) / 2.0 + 1.0,
            mu + nu + b - (ell - m) / 2.0 + 2.0,
        ),
    )


@lru_cache(maxsize=32)
def _cosine_matrix(rho: float, parity: int, K: int) -> np.ndarray:
    """Reciprocal gamma products over the lattice [-K, K]^2 with the
    parity mask applied."""
    idx = np.arange(-K, K + 1)
    ell = idx[:, None]
    m = idx[None, :]
    out = np.zeros((2 * K + 1, 2 * K + 1))
    mask = (ell - m - parity) % 2 == 0
    logsum = np.zeros_like(out)
    sign = np.ones_like(out)
    dead = np.zeros_like(out, dtype=bool)
    for ds in (1.0, -1.0):
        for es in (1.0, -1.0):
            arg = 1.0 + 0.5 * (rho + ds * ell + es * m)
            dead |= _is_pole(arg)
            safe = np.where(dead, 1.0, arg)
            logsum += _gammaln(safe)
            sign *= _sign_gamma(safe)
    vals = sign * np.exp(-logsum)
    vals[dead | ~mask] = 0.0
    out[:] = vals
    return out


def cosine_expansion(rho: float, parity: int, phi: float, psi: float, K: int) -> float:
    """Truncated bilateral expansion of |cos(phi) + cos(psi)|^rho
    sgn^parity(cos(phi) + cos(psi)).

    Sums 2^(-rho) Gamma(rho+1)^2 cos(l phi) cos(m psi) over the four-gamma
    reciprocal products for all integer |l|, |m| <= K with l = m + parity
    mod 2, without folding the lattice.
    """
    if rho <= 0.0:
        raise DomainError("requires rho > 0")
    if parity not in (0, 1):
        raise DomainError("parity must be 0 or 1")
    if K < 0:
        raise DomainError("K must be nonnegative")
    mat = _cosine_matrix(rho, parity, K)
    idx = np.arange(-K, K + 1)
    cl = np.cos(idx * phi)
    cm = np.cos(idx * psi)
    pref = gamma_ratio((rho + 1.0, rho + 1.0), (), scale_log=-rho * LN2)
    return pref * float(cl @ mat @ cm)


def hermite_kernel_integral(nu: float, ell: int, m: int, x: float) -> float:
    """Closed form of int int |s - x t|^(2 nu) e^(-s^2-t^2) H_ell(s) H_m(t).

    (-nu)_((ell+m)/2) (-1)^((ell-m)/2) 2^(ell+m) sqrt(pi) Gamma(nu+1/2)
    (x^2+1)^(nu-(ell+m)/2) x^m, for even ell + m.
    """
    if (ell + m) % 2:
        raise DomainError("requires ell + m even")
    if nu <= 0.0:
        raise DomainError("requires nu > 0")
    half = (ell + m) // 2
    return (
        pochhammer(-nu, half)
        * (-1.0) ** ((ell - m) // 2)
        * 2.0 ** (ell + m)
        * math.sqrt(math.pi)
        * gamma_ratio((nu + 0.5,), ())
        * (x * x + 1.0) ** (nu - half)
        * x**m
    )


def weighted_power_mass(lam: float, mu: float, nu: float) -> float:
    """Closed form of int int |s-t|^(2 nu) (1-s^2)^(lam-1/2) (1-t^2)^(mu-1/2)."""
    return gamma_ratio(
        (lam + 0.5, mu + 0.5, nu + 0.5, lam + mu + 2.0 * nu + 1.0),
        (lam + nu + 1.0, mu + nu + 1.0, lam + mu + nu + 1.0),
        scale_log=0.5 * LNPI,
    )


def identity_rhs(name: str, params: dict) -> float:
    """Right side of a named classical identity.

    Names: selberg2(lam, nu), warnaar(lam, mu), tarasov_varchenko(lam, nu),
    dotsenko_fateev(lam, mu), mehta2(nu), lm0(lam, mu, nu).
    """
    if name == "lm0":
        return weighted_power_mass(params["lam"], params["mu"], params["nu"])
    if name == "selberg2":
        lam, nu = params["lam"], params["nu"]
        return gamma_ratio(
            (lam + 0.5, lam + 0.5, lam + nu + 0.5, lam + nu + 0.5, 1.0 + 2.0 * nu),
            (2.0 * lam + 1.0 + nu, 2.0 * lam + 2.0 * nu + 1.0, 1.0 + nu),
            scale_log=(4.0 * lam + 2.0 * nu) * LN2,
        )
    if name == "warnaar":
        lam, mu = params["lam"], params["mu"]
        return gamma_ratio(
            (lam + 0.5, 0.5 - mu, mu + 0.5, mu + 0.5),
            (lam + 1.0 - mu, mu + 1.0 - lam, lam + mu + 1.0),
        )
    if name == "tarasov_varchenko":
        lam, nu = params["lam"], params["nu"]
        return gamma_ratio(
            (lam + 0.5, 1.5 + lam + 2.0 * nu),
            (2.0 + 2.0 * lam + 2.0 * nu,),
            scale_log=(2.0 * lam + 2.0 * nu + 1.0) * LN2,
        ) / (1.0 + 2.0 * nu)
    if name == "dotsenko_fateev":
        lam, mu = params["lam"], params["mu"]
        return gamma_ratio(
            (lam + 0.5, lam + 0.5, mu + 0.5, mu + 0.5),
            (2.0 * lam, 2.0 * mu),
            scale_log=(2.0 * lam + 2.0 * mu - 1.0) * LN2,
        ) / (1.0 - lam - mu)
    if name == "mehta2":
        nu = params["nu"]
        return gamma_ratio((1.0 + 2.0 * nu,), (1.0 + nu,))
    raise DomainError(f"unknown identity {name!r}")


def fit_coefficients(f, lam: float, nmax: int, order: int | None = None) -> np.ndarray:
    """Expansion coefficients of f in the lam basis by Gaussian projection."""
    rule = gauss_gegenbauer_rule(lam, order if order is not None else nmax + 48)
    fv = np.asarray(f(rule.nodes), dtype=float)
    cs = gegenbauer_all(lam, nmax, rule.nodes)
    raw = cs @ (rule.weights * fv)
    norms = np.array([gegenbauer_norm_sq(lam, n) for n in range(nmax + 1)])
    return raw / norms


def coefficient_bound(lam: float, n: int, n_deriv: int, deriv_norm: float) -> float:
    """Decay bound |a_n| <= deriv_norm / (2^N (lam)_N ||C_(n-N)^(lam+N)||)
    for n >= N, the chain that powers uniform convergence."""
    if n < n_deriv:
        raise DomainError("bound applies for n >= n_deriv")
    denom = (
        2.0**n_deriv
        * pochhammer(lam, n_deriv)
        * math.sqrt(gegenbauer_norm_sq(lam + n_deriv, n - n_deriv))
    )
    return deriv_norm / denom


def sup_decay_majorant(lam: float, n: int, n_deriv: int) -> float:
    """The n^(lam - N) shape controlling |a_n| ||C_n||_inf for n >= N."""
    if n < max(n_deriv, 1):
        raise DomainError("majorant applies for n >= max(N, 1)")
    return float(n) ** (lam - n_deriv)
