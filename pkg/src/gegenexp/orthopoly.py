"""Ultraspherical and Hermite polynomials plus Gaussian quadrature rules.

Polynomial evaluation uses the stable three-term recurrences; nodes and
weights come from the symmetric-tridiagonal (Golub-Welsch) eigenproblem
built on the Jacobi-weight recurrence coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .specfun import DomainError, gamma_ratio, pochhammer

LN2 = math.log(2.0)
LNPI = math.log(math.pi)


def _check_lambda(lam: float) -> None:
    if lam <= -0.5 or lam == 0.0:
        raise DomainError(
            f"ultraspherical parameter must satisfy lam > -1/2 and lam != 0, got {lam!r}"
        )


def gegenbauer(lam: float, n: int, x):
    """Ultraspherical polynomial C_n^lam(x) for scalar or array x.

    Recurrence: n C_n = 2 (n + lam - 1) x C_{n-1} - (n + 2 lam - 2) C_{n-2},
    seeded with C_0 = 1 and C_1 = 2 lam x.
    """
    _check_lambda(lam)
    if n < 0:
        raise DomainError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * lam * x
    for k in range(2, n + 1):
        prev, cur = cur, (2.0 * (k + lam - 1.0) * x * cur - (k + 2.0 * lam - 2.0) * prev) / k
    return cur if cur.ndim else float(cur)


def gegenbauer_all(lam: float, nmax: int, x) -> np.ndarray:
    """All degrees at once: array of shape (nmax+1,) + shape(x)."""
    _check_lambda(lam)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 2.0 * lam * x
    for k in range(2, nmax + 1):
        out[k] = (2.0 * (k + lam - 1.0) * x * out[k - 1] - (k + 2.0 * lam - 2.0) * out[k - 2]) / k
    return out


def gegenbauer_endpoint(lam: float, n: int) -> float:
    """C_n^lam(1) = (2 lam)_n / n!, the sup of |C_n^lam| on [-1, 1]."""
    _check_lambda(lam)
    if n <= 32:
        return pochhammer(2.0 * lam, n) / math.factorial(n)
    return gamma_ratio((n + 2.0 * lam,), (2.0 * lam, n + 1.0))


def gegenbauer_norm_sq(lam: float, n: int) -> float:
    """Squared L2 norm of C_n^lam under the weight (1-x^2)^(lam-1/2).

    Equals 2^(1-2 lam) pi Gamma(n+2 lam) / (n! (n+lam) Gamma(lam)^2).
    """
    _check_lambda(lam)
    if n < 0:
        raise DomainError("degree must be nonnegative")
    return gamma_ratio(
        (n + 2.0 * lam,),
        (n + 1.0, lam, lam),
        scale_log=(1.0 - 2.0 * lam) * LN2 + LNPI,
    ) / (n + lam)


def u_prefactor(lam: float, n: int) -> float:
    """Normalization 2^(2 lam - 1) n! Gamma(lam) / Gamma(2 lam + n)."""
    return gamma_ratio((n + 1.0, lam), (2.0 * lam + n,), scale_log=(2.0 * lam - 1.0) * LN2)


def u_weighted(lam: float, n: int, s):
    """Weighted, normalized polynomial u_n^lam(s).

    u_n^lam(s) = 2^(2 lam - 1) n! Gamma(lam) / Gamma(2 lam + n)
                 * (1 - s^2)^(lam - 1/2) * C_n^lam(s).
    For lam < 1/2 the weight is singular at s = +-1.
    """
    if lam <= -0.5:
        raise DomainError(f"u_weighted requires lam > -1/2, got {lam!r}")
    s = np.asarray(s, dtype=float)
    w = np.power(np.maximum(1.0 - s * s, 0.0), lam - 0.5)
    val = u_prefactor(lam, n) * w * gegenbauer(lam, n, s)
    return val if np.ndim(val) else float(val)


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x).

    H_{n+1} = 2 x H_n - 2 n H_{n-1}, with H_0 = 1 and H_1 = 2x.
    """
    if n < 0:
        raise DomainError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * x
    for k in range(1, n):
        prev, cur = cur, 2.0 * x * cur - 2.0 * k * prev
    return cur if cur.ndim else float(cur)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a Gaussian rule; immutable and shareable."""

    nodes: np.ndarray
    weights: np.ndarray
    lam: float | None
    order: int

    def integrate(self, f) -> float:
        return float(self.weights @ f(self.nodes))


def _jacobi_coefficients(alpha: float, beta: float, n: int):
    """Recurrence coefficients of monic polynomials orthogonal under
    (1-x)^alpha (1+x)^beta on [-1, 1], plus the total weight mass mu0."""
    s = alpha + beta
    a = np.zeros(n)
    b = np.zeros(n)
    a[0] = (beta - alpha) / (s + 2.0)
    mu0 = gamma_ratio((alpha + 1.0, beta + 1.0), (s + 2.0,), scale_log=(s + 1.0) * LN2)
    if n > 1:
        b[1] = 4.0 * (alpha + 1.0) * (beta + 1.0) / ((s + 2.0) ** 2 * (s + 3.0))
        k = np.arange(1, n)
        two = 2.0 * k + s
        a[1:] = (beta * beta - alpha * alpha) / (two * (two + 2.0))
        if n > 2:
            k = np.arange(2, n)
            two = 2.0 * k + s
            b[2:] = (
                4.0 * k * (k + alpha) * (k + beta) * (k + s)
                / (two * two * (two + 1.0) * (two - 1.0))
            )
    return a, b, mu0


@lru_cache(maxsize=512)
def gauss_jacobi_rule(alpha: float, beta: float, order: int) -> QuadratureRule:
    """Gaussian rule for int_{-1}^{1} f(x) (1-x)^alpha (1+x)^beta dx.

    Exact for polynomial f of degree <= 2 order - 1; alpha, beta > -1.
    """
    if alpha <= -1.0 or beta <= -1.0:
        raise DomainError("Jacobi exponents must exceed -1")
    if order < 1:
        raise DomainError("order must be >= 1")
    a, b, mu0 = _jacobi_coefficients(alpha, beta, order)
    if order == 1:
        return QuadratureRule(np.array([a[0]]), np.array([mu0]), None, 1)
    jac = np.diag(a) + np.diag(np.sqrt(b[1:]), 1) + np.diag(np.sqrt(b[1:]), -1)
    nodes, vecs = np.linalg.eigh(jac)
    weights = mu0 * vecs[0, :] ** 2
    return QuadratureRule(nodes, weights, None, order)


@lru_cache(maxsize=256)
def gauss_gegenbauer_rule(lam: float, order: int) -> QuadratureRule:
    """Gaussian rule for int_{-1}^{1} f(x) (1-x^2)^(lam-1/2) dx.

    Nodes are symmetrized about 0 so parity holds exactly.
    """
    if lam <= -0.5:
        raise DomainError(f"weight exponent requires lam > -1/2, got {lam!r}")
    base = gauss_jacobi_rule(lam - 0.5, lam - 0.5, order)
    nodes = 0.5 * (base.nodes - base.nodes[::-1])
    weights = 0.5 * (base.weights + base.weights[::-1])
    return QuadratureRule(nodes, weights, lam, order)


@lru_cache(maxsize=64)
def gauss_hermite_rule(order: int) -> QuadratureRule:
    """Gaussian rule for int f(x) exp(-x^2) dx over the real line."""
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    return QuadratureRule(nodes, weights, None, order)


def gauss_legendre_rule(order: int) -> QuadratureRule:
    return gauss_jacobi_rule(0.0, 0.0, order)
