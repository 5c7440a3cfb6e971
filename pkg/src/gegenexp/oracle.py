"""Independent numerical ground truth for the weighted singular integrals.

The kernels |s - x t|^p (and their one-sided parts) are integrated against
endpoint-weighted polynomial factors by iterated Gaussian quadrature: the
inner axis is split at the kernel line s = x t into pieces whose two
algebraic endpoints (the split point and the interval end) are folded
exactly into composite Jacobi rules on graded dyadic panels; the outer axis
uses the same graded composite rules.  Nothing here evaluates a closed form,
so agreement with the expansion module is a genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .orthopoly import gauss_hermite_rule, gauss_jacobi_rule, gegenbauer, hermite
from .specfun import DomainError

KERNELS = ("none", "plus", "minus", "abs", "abssgn")


class OracleConvergenceError(RuntimeError):
    """Refinement exhausted without meeting the requested target."""

    def __init__(self, message: str, value: float, est_error: float):
        super().__init__(message)
        self.value = value
        self.est_error = est_error


@dataclass(frozen=True)
class QuadratureSpec:
    """Description of a weighted kernel integral over [-1,1]^dimension.

    The integrand is K(s - x t) * (1-s^2)^ws * (1-t^2)^wt * P(s) * Q(t)
    where K is selected by `kernel` with exponent `kernel_exponent` and
    (ws, wt) = weight_exponents.  With extra_axis = (alpha, beta), a third
    variable y weighted by y^alpha (1-y)^beta on [0, 1] replaces the shear
    x by sqrt(y) (dimension 3).  A triangle restriction keeps only {s < t}
    or {t < s}, splitting at s = t.
    """

    dimension: int = 2
    kernel: str = "none"
    kernel_exponent: float = 0.0
    x_shear: float = 0.0
    weight_exponents: tuple = (0.0, 0.0)
    polynomial_factors: tuple = (None, None)
    extra_axis: tuple | None = None
    triangle: str | None = None
    prefactor: float = 1.0
    tol: float = 1e-8

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise DomainError(f"unknown kernel {self.kernel!r}")
        if self.kernel != "none" and self.kernel_exponent <= -1.0:
            raise DomainError(
                f"kernel exponent must exceed -1, got {self.kernel_exponent!r}"
            )
        for w in self.weight_exponents:
            if w <= -1.0:
                raise DomainError(f"endpoint exponent must exceed -1, got {w!r}")
        if self.dimension not in (1, 2, 3):
            raise DomainError("dimension must be 1, 2 or 3")
        if self.dimension == 1 and (self.kernel != "none" or self.triangle):
            raise DomainError("dimension 1 supports neither kernels nor triangles")
        if self.dimension == 3 and self.extra_axis is None:
            raise DomainError("dimension 3 requires extra_axis")
        if self.triangle not in (None, "s<t", "t<s"):
            raise DomainError(f"unknown triangle restriction {self.triangle!r}")


@dataclass(frozen=True)
class QuadResult:
    value: float
    est_error: float
    evaluations: int


def _poly(factor, arr):
    if factor is None:
        return np.ones_like(arr)
    kind = factor[0]
    if kind == "gegenbauer":
        _, lam, n = factor
        return gegenbauer(lam, n, arr)
    if kind == "hermite":
        _, n = factor
        return hermite(n, arr)
    if kind == "monomial":
        _, n = factor
        return np.asarray(arr, dtype=float) ** n
    raise DomainError(f"unknown polynomial factor {factor!r}")


@lru_cache(maxsize=512)
def _unit_rule(a0: float, a1: float, levels: int, order: int):
    """Composite rule: int_0^1 u^a0 (1-u)^a1 g(u) du ~= sum w_j g(u_j).

    Graded dyadic panels toward both endpoints.  The panel touching an
    endpoint folds that endpoint's exponent into a Gauss-Jacobi rule; all
    other algebraic factors are absorbed into the weights numerically, which
    is accurate because panel width never exceeds its distance to the other
    singular endpoint.
    """
    cuts = [0.5 * 2.0**-k for k in range(levels, -1, -1)]
    legendre = gauss_jacobi_rule(0.0, 0.0, order)
    pieces = []
    for a_here, a_far, flip in ((a0, a1, False), (a1, a0, True)):
        lo = 0.0
        for hi in cuts:
            h = hi - lo
            if lo == 0.0:
                base = gauss_jacobi_rule(0.0, a_here, order)
                u = lo + h * 0.5 * (1.0 + base.nodes)
                w = base.weights * (0.5 * h) ** (1.0 + a_here) * (1.0 - u) ** a_far
            else:
                u = lo + h * 0.5 * (1.0 + legendre.nodes)
                w = legendre.weights * (0.5 * h) * u**a_here * (1.0 - u) ** a_far
            pieces.append((1.0 - u, w) if flip else (u, w))
            lo = hi
    nodes = np.concatenate([p[0] for p in pieces])
    weights = np.concatenate([p[1] for p in pieces])
    return nodes, weights


def _interval_rule(a: float, b: float, exp_a: float, exp_b: float, levels: int, order: int):
    """Rule for int_a^b (u-a)^exp_a (b-u)^exp_b g(u) du = sum w g(u)."""
    u, w = _unit_rule(exp_a, exp_b, levels, order)
    h = b - a
    return a + h * u, w * h ** (1.0 + exp_a + exp_b)


def _level_params(level: int):
    """(panel order, grading levels) for a refinement level."""
    return 16 + 6 * level, 26 + 4 * level


def _eval_2d(spec: QuadratureSpec, x: float, level: int, size: tuple | None = None):
    """One resolution level of the 1D/2D kernel integral."""
    order, levels = size if size is not None else _level_params(level)
    ws, wt = spec.weight_exponents
    ps, pt = spec.polynomial_factors
    p = spec.kernel_exponent

    if spec.dimension == 1:
        u, w = _interval_rule(-1.0, 1.0, ws, ws, levels, order)
        return spec.prefactor * float(w @ _poly(ps, u)), u.size

    tn, tw = _interval_rule(-1.0, 1.0, wt, wt, levels, order)
    tw = tw * _poly(pt, tn)
    evals = tn.size

    if spec.kernel == "none" and spec.triangle is None:
        sn, sw = _interval_rule(-1.0, 1.0, ws, ws, levels, order)
        return spec.prefactor * float(tw.sum() * (sw @ _poly(ps, sn))), evals + sn.size

    split_exp = p if spec.kernel != "none" else 0.0
    u, uw = _unit_rule(split_exp, ws, levels, order)

    if spec.triangle is None:
        s0 = x * tn
        want_plus = spec.kernel in ("plus", "abs", "abssgn")
        want_minus = spec.kernel in ("minus", "abs", "abssgn")
    else:
        s0 = tn  # restriction splits at s = t
        want_plus = spec.triangle == "t<s"
        want_minus = spec.triangle == "s<t"

    total = 0.0
    if want_plus:
        h = (1.0 - s0)[:, None]
        s = s0[:, None] + h * u[None, :]
        fac = h ** (1.0 + split_exp + ws) * uw[None, :]
        smooth = (1.0 + s) ** ws * _poly(ps, s)
        total += float(tw @ (fac * smooth).sum(axis=1))
        evals += s.size
    if want_minus:
        h = (1.0 + s0)[:, None]
        s = s0[:, None] - h * u[None, :]
        fac = h ** (1.0 + split_exp + ws) * uw[None, :]
        smooth = (1.0 - s) ** ws * _poly(ps, s)
        sgn = -1.0 if spec.kernel == "abssgn" else 1.0
        total += sgn * float(tw @ (fac * smooth).sum(axis=1))
        evals += s.size
    return spec.prefactor * total, evals


def _eval_3d(spec: QuadratureSpec, level: int):
    """Outer integral over the extra axis of 2D values at shear sqrt(y).

    Substituting y = x^2 turns the weight y^alpha (1-y)^beta dy into
    2 x^(2 alpha + 1) (1-x)^beta (1+x)^beta dx on [0, 1]; the 2D value as a
    function of the shear x is smooth there, so a short composite rule in x
    suffices.
    """
    alpha, beta_ = spec.extra_axis
    order_out = 16 + 8 * level
    xn, xw = _interval_rule(0.0, 1.0, 2.0 * alpha + 1.0, beta_, 3, order_out)
    inner2d = QuadratureSpec(
        dimension=2,
        kernel=spec.kernel,
        kernel_exponent=spec.kernel_exponent,
        weight_exponents=spec.weight_exponents,
        polynomial_factors=spec.polynomial_factors,
        tol=spec.tol,
    )
    # The 2D stage is spectrally accurate at modest size; only the outer
    # rule needs refining, which keeps the node product bounded.
    inner_size = (12 + 2 * level, 16 + 2 * level)
    total = 0.0
    evals = 0
    for x, w in zip(xn, xw):
        v, e = _eval_2d(inner2d, float(x), level, size=inner_size)
        total += w * (1.0 + x) ** beta_ * v
        evals += e
    return spec.prefactor * 2.0 * total, evals


def _eval_level(spec: QuadratureSpec, level: int):
    if spec.dimension == 3:
        return _eval_3d(spec, level)
    return _eval_2d(spec, spec.x_shear, level)


def refine_until(spec: QuadratureSpec, target: float, max_level: int = 5) -> QuadResult:
    """Refine grading and order until two consecutive levels agree to target.

    Raises OracleConvergenceError (carrying the best value) when max_level
    is exhausted first.
    """
    if target <= 0.0:
        raise DomainError("target must be positive")
    prev = None
    evals = 0
    for level in range(max_level + 1):
        value, e = _eval_level(spec, level)
        evals += e
        if prev is not None and abs(value - prev) < target:
            return QuadResult(value, max(abs(value - prev), 4e-16 * abs(value)), evals)
        prev = value
    raise OracleConvergenceError(
        f"no convergence to {target} within {max_level} refinements",
        value=prev,
        est_error=float("nan"),
    )


def integrate(spec: QuadratureSpec) -> QuadResult:
    """Evaluate the spec to its own tolerance; see refine_until."""
    return refine_until(spec, spec.tol, max_level=5)


def integrate_hermite_2d(nu: float, x: float, ell: int, m: int, level: int = 1) -> QuadResult:
    """int over R^2 of |s - x t|^(2 nu) e^(-s^2-t^2) H_ell(s) H_m(t) ds dt.

    Outer axis by Gauss-Hermite; the inner axis is split at s = x t with the
    kernel exponent folded into graded Jacobi panels, truncated where the
    Gaussian factor falls below ~1e-35.
    """
    if nu <= 0.0:
        raise DomainError("requires nu > 0")

    def run(lvl: int):
        gh = gauss_hermite_rule(128 + 64 * lvl)
        order, levels = _level_params(lvl)
        u, uw = _unit_rule(2.0 * nu, 0.0, levels, order)
        s0 = x * gh.nodes
        reach = np.abs(s0) + 9.0
        total = 0.0
        evals = 0
        outer = gh.weights * hermite(m, gh.nodes)
        for sgn in (+1.0, -1.0):
            s = s0[:, None] + sgn * reach[:, None] * u[None, :]
            fac = reach[:, None] ** (1.0 + 2.0 * nu) * uw[None, :]
            smooth = np.exp(-s * s) * hermite(ell, s)
            total += float(outer @ (fac * smooth).sum(axis=1))
            evals += s.size
        return total, evals

    v0, e0 = run(level)
    v1, e1 = run(level + 1)
    return QuadResult(v1, max(abs(v1 - v0), 4e-16 * abs(v1)), e0 + e1)


def convolution_profile(exp_s: float, exp_t: float, u: float, level: int = 1) -> float:
    """G(u) = int (1-s^2)^exp_s (1-(s-u)^2)^exp_t ds over the overlap.

    The overlap interval carries one algebraic endpoint from each factor;
    the remaining two algebraic points lie outside it.
    """
    if abs(u) >= 2.0:
        return 0.0
    order, levels = _level_params(level)
    lo, hi = max(-1.0, u - 1.0), min(1.0, u + 1.0)
    if u >= 0.0:
        # endpoints: s = u-1 from the shifted factor, s = 1 from the first
        s, w = _interval_rule(lo, hi, exp_t, exp_s, levels, order)
        smooth = (1.0 + s) ** exp_s * (1.0 - s + u) ** exp_t
    else:
        s, w = _interval_rule(lo, hi, exp_s, exp_t, levels, order)
        smooth = (1.0 - s) ** exp_s * (1.0 + s - u) ** exp_t
    return float(w @ smooth)


def regularized_inverse_square(exp_s: float, exp_t: float) -> QuadResult:
    """Finite-part value of the inverse-square diagonal-kernel integral.

    Analytic continuation to kernel exponent -2 of
    int int |s-t|^p (1-s^2)^exp_s (1-t^2)^exp_t ds dt, computed through the
    (even) convolution profile G with Taylor subtraction at u = 0:

        FP = 2 int_0^1 (G(u) - G(0)) / u^2 du
             + 2 int_1^2 G(u) / u^2 du  -  2 G(0).

    Requires exp_s + exp_t > 0 so the subtracted remainder is integrable.
    The raw integral itself diverges for every parameter choice; this value
    is the one reached by meromorphic continuation in the kernel exponent.
    """
    sigma = exp_s + exp_t
    if sigma <= 0.0:
        raise DomainError("finite part needs weight exponents summing above 0")

    def run(level: int, levels_near: int):
        def g(point: float) -> float:
            return convolution_profile(exp_s, exp_t, point, level=level + 2)

        g0 = g(0.0)
        order, _ = _level_params(level + 1)
        # Grading depth near u = 0 trades the |u|^(sigma-1) remainder against
        # u^-2 amplification of cancellation noise in G(u) - G(0).
        u_in, w_in = _interval_rule(0.0, 1.0, 0.0, 0.0, levels_near, order)
        u_out, w_out = _interval_rule(1.0, 2.0, 0.0, 0.0, 20, order)
        vals_in = np.array([g(ui) for ui in u_in])
        vals_out = np.array([g(ui) for ui in u_out])
        total = -2.0 * g0
        total += 2.0 * float(w_in @ ((vals_in - g0) / (u_in * u_in)))
        total += 2.0 * float(w_out @ (vals_out / (u_out * u_out)))
        return total, u_in.size + u_out.size + 1

    v0, e0 = run(0, 12)
    v1, e1 = run(1, 15)
    return QuadResult(v1, max(abs(v1 - v0), 4e-16 * abs(v1)), e0 + e1)
