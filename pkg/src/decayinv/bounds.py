"""Norm-controlled inversion bounds with full audit trails.

Every bound evaluator returns a BoundReport carrying the input norms, all
named intermediate quantities, and (when a measurement is supplied or
computable) the measured inverse norm with a satisfied flag.  Products of
large factors are assembled in log space and reported as inf, never as
silent overflow.
"""

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.special import zeta

from .errors import NumericalError, ParameterError, RangeError, SingularityError
from .lattice import invert_truncated, operator_norm_l2, symbol_range
from .norms import banded_error, cv_norm, jaffard_norm
from .weights import Weight, log_phi_r_from_log

_MAXLOG = math.log(np.finfo(float).max)


@dataclass
class BoundReport:
    bound_name: str
    inputs: dict
    intermediates: dict
    bound_value: float
    measured_value: Optional[float] = None
    satisfied: Optional[bool] = None

    def to_dict(self):
        return asdict(self)


def _report(name, inputs, intermediates, bound, measured=None):
    sat = None if measured is None else bool(measured <= bound)
    return BoundReport(bound_name=name, inputs=inputs,
                       intermediates=intermediates, bound_value=bound,
                       measured_value=measured, satisfied=sat)


def _exp_or_inf(log_value):
    return math.exp(log_value) if log_value <= _MAXLOG else math.inf


def weighted_geometric_series(q, r, rel_tol=1e-12, chunk=4096, cap=50_000_000):
    """sum_{k>=0} (1+k)^r q^k by direct summation.

    Terminates when a rigorous geometric bound on the remainder falls
    below rel_tol times the partial sum; returns (value, terms_used).
    """
    if not 0.0 <= q < 1.0:
        raise ParameterError("need 0 <= q < 1")
    if r < 0:
        raise ParameterError("need r >= 0")
    if q == 0.0:
        return 1.0, 1
    total = 0.0
    k0 = 0
    while k0 <= cap:
        ks = np.arange(k0, k0 + chunk, dtype=float)
        total += float(((1.0 + ks) ** r * q ** ks).sum())
        k0 += chunk
        # (1+k0+j)^r <= (1+k0)^r e^{rj/(1+k0)} turns the remainder geometric
        growth = q * math.exp(r / (1.0 + k0))
        if growth < 1.0:
            tail = (1.0 + k0) ** r * q ** k0 / (1.0 - growth)
            if tail <= rel_tol * total:
                return total, k0
    raise NumericalError(f"series did not settle within {cap} terms (q={q})")


def integral_test_bracket(gamma, r):
    """Two-sided integral-test estimate for sum_{k>=0}(1+k)^r e^{-gamma k}:
    [e^gamma Gamma(r+1) gamma^{-r-1}, twice that]."""
    if gamma <= 0:
        raise ParameterError("bracket needs gamma > 0")
    if r < 0:
        raise ParameterError("bracket needs r >= 0")
    lo = math.exp(gamma) * math.gamma(r + 1.0) * gamma ** (-r - 1.0)
    return lo, 2.0 * lo


def gamma_r(r):
    """The sup-form comparison constant 2^{r+1}(r+1)/(r-1), finite for r > 1."""
    if r <= 1:
        raise ParameterError("gamma_r needs r > 1")
    return 2.0 ** (r + 1) * (r + 1.0) / (r - 1.0)


def condition_data(A, method="auto", rcond_floor=1e-12):
    """(kappa, norm_A_op, norm_Ainv_op) for the window section.

    Symbol-tagged matrices use the multiplier range (exact full-lattice
    values); otherwise power iteration plus dense inversion.
    """
    use_symbol = A.symbol is not None and method in ("auto", "symbol")
    if method == "symbol" and A.symbol is None:
        raise ParameterError("matrix carries no symbol")
    if use_symbol:
        lo, hi = symbol_range(A.symbol)
        if lo <= rcond_floor * hi:
            raise SingularityError(
                f"symbol range reaches {lo:.3e}; not invertible", rcond=lo / hi)
        na, nainv = hi, 1.0 / lo
    else:
        na = operator_norm_l2(A)
        nainv = operator_norm_l2(invert_truncated(A, rcond_floor))
    return na * nainv, na, nainv


def condition_kappa(A, method="auto"):
    """kappa = ||A||_op * ||A^{-1}||_op."""
    kappa, _, _ = condition_data(A, method)
    return kappa


@dataclass
class SeriesFactor:
    value: float
    series: float
    beta: float
    gamma: float
    bracket_low: float
    bracket_high: float
    bracket_ok: bool
    terms: int


def ell_r(norm_ainv_op, kappa, r, rel_tol=1e-12):
    """8 ||A^{-1}|| sum_k (1-beta)^k (1+k)^r with beta = 1/(24 kappa + 1).

    The integral-test bracket for the series (at gamma = log 1/(1-beta))
    is attached as data; bracket_ok records whether the sum fell inside.
    """
    if norm_ainv_op <= 0:
        raise ParameterError("need a positive inverse norm")
    if kappa < 1.0 - 1e-9:
        raise ParameterError(f"kappa = {kappa} < 1 is not a condition number")
    if r <= 0:
        raise ParameterError("need r > 0")
    beta = 1.0 / (24.0 * kappa + 1.0)
    q = 1.0 - beta
    gam = -math.log1p(-beta)
    series, terms = weighted_geometric_series(q, r, rel_tol)
    lo, hi = integral_test_bracket(gam, r)
    return SeriesFactor(value=8.0 * norm_ainv_op * series, series=series,
                        beta=beta, gamma=gam, bracket_low=lo, bracket_high=hi,
                        bracket_ok=bool(lo <= series <= hi), terms=terms)


@dataclass
class SupFactor:
    value: float
    sup_term: float
    argmax_k: int
    beta: float
    gamma_r: float


def ell_tilde_r(norm_ainv_op, kappa, r):
    """gamma_r ||A^{-1}|| max_k (1-beta)^k (1+k)^r, maximized exactly.

    The map k -> (1+k)^r (1-beta)^k is unimodal with real argmax at
    r/log(1/(1-beta)) - 1, so checking the two neighbors suffices.
    """
    if norm_ainv_op <= 0:
        raise ParameterError("need a positive inverse norm")
    if kappa < 1.0 - 1e-9:
        raise ParameterError(f"kappa = {kappa} < 1 is not a condition number")
    g = gamma_r(r)
    beta = 1.0 / (24.0 * kappa + 1.0)
    q = 1.0 - beta
    L = -math.log1p(-beta)
    kstar = r / L - 1.0
    cand = {0, max(0, math.floor(kstar)), max(0, math.floor(kstar)) + 1,
            max(0, math.ceil(kstar))}
    best_k, best = 0, 0.0
    for k in sorted(cand):
        v = (1.0 + k) ** r * q ** k
        if v > best:
            best, best_k = v, k
    return SupFactor(value=g * norm_ainv_op * best, sup_term=best,
                     argmax_k=best_k, beta=beta, gamma_r=g)


def phi_Ar(A, r, t, method="auto", margin=0, norm_a_alg=None, ell_value=None,
           norm_ainv_op=None, kcap=10 ** 15):
    """Minimal k >= 1 with max(2*3^r k^{-r} ||A||_Cr ell_r, 2 E_k ||A^{-1}||) <= t.

    Both criteria are nonincreasing in k, so the first is solved by its
    closed-form threshold (adjusted for float boundaries) and the second
    by doubling plus bisection on the banded-approximation error.
    """
    if not 0.0 < t <= 0.5:
        raise ParameterError("t must lie in (0, 1/2]")
    if r <= 0:
        raise ParameterError("need r > 0")
    if norm_a_alg is None:
        norm_a_alg = cv_norm(A, Weight.poly(r), method, margin)
    if norm_ainv_op is None or ell_value is None:
        kappa, _, nainv = condition_data(A, method)
        norm_ainv_op = nainv if norm_ainv_op is None else norm_ainv_op
        if ell_value is None:
            ell_value = ell_r(norm_ainv_op, kappa, r).value

    c1 = 2.0 * 3.0 ** r * norm_a_alg * ell_value
    if c1 <= t:
        k1 = 1
    else:
        log_k = (math.log(c1) - math.log(t)) / r
        if log_k > math.log(kcap):
            raise NumericalError(
                f"decay criterion needs k > {kcap}: c1 = {c1:.3e}, t = {t}")
        k1 = max(1, math.ceil(math.exp(log_k)))
        while k1 > 1 and c1 * (k1 - 1.0) ** (-r) <= t:
            k1 -= 1
        while c1 * float(k1) ** (-r) > t:
            k1 += 1

    def tail_ok(k):
        return 2.0 * banded_error(A, k, method, margin) * norm_ainv_op <= t

    if tail_ok(1):
        k2 = 1
    else:
        hi = 2
        while not tail_ok(hi):
            hi *= 2
            if hi > kcap:
                raise NumericalError(
                    f"banded-tail criterion unmet below {kcap}: "
                    f"E at cap = {banded_error(A, kcap, method, margin):.3e}")
        lo = hi // 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if tail_ok(mid):
                hi = mid
            else:
                lo = mid
        k2 = hi
    return max(k1, k2)


def baskakov_bound_Cr(A, r, t=0.5, t_grid=None, method="auto", margin=0,
                      inverse=None):
    """Geometric-factor bound 2/(1-t) * ell_r * Phi (1+Phi)^r on ||A^{-1}||_Cr.

    Default t = 1/2 gives 4 ell_r Phi (1+Phi)^r; an optional grid over
    (0, 1/2] refines by taking the smallest evaluation.
    """
    if r <= 0:
        raise ParameterError("need r > 0")
    kappa, na_op, nainv_op = condition_data(A, method)
    el = ell_r(nainv_op, kappa, r)
    na_alg = cv_norm(A, Weight.poly(r), method, margin)
    ts = list(t_grid) if t_grid is not None else [t]
    best = None
    for tv in ts:
        phi = phi_Ar(A, r, tv, method, margin, norm_a_alg=na_alg,
                     ell_value=el.value, norm_ainv_op=nainv_op)
        log_b = (math.log(2.0 / (1.0 - tv)) + math.log(el.value)
                 + math.log(phi) + r * math.log1p(phi))
        if best is None or log_b < best[0]:
            best = (log_b, tv, phi)
    log_bound, t_used, phi = best
    bound = _exp_or_inf(log_bound)
    inv = inverse if inverse is not None else invert_truncated(A)
    measured = cv_norm(inv, Weight.poly(r), "auto", margin)
    return _report(
        "baskakov_Cr",
        {"norm_A_alg": na_alg, "norm_A_op": na_op, "norm_Ainv_op": nainv_op,
         "r": r, "auxiliary": {"t": t_used, "margin": margin}},
        {"kappa": kappa, "beta": el.beta, "ell_r": el.value,
         "series": el.series, "bracket_low": el.bracket_low,
         "bracket_high": el.bracket_high, "bracket_ok": el.bracket_ok,
         "Phi": phi, "log_bound": log_bound},
        bound, measured)


def baskakov_bound_Jr(A, r, method="auto", margin=0, inverse=None):
    """4 ell~_r (2 + (2*3^r ||A||_Jr ell~_r)^{1/(r-1)})^r on ||A^{-1}||_Jr."""
    if r <= 1:
        raise ParameterError("need r > 1")
    kappa, na_op, nainv_op = condition_data(A, method)
    elt = ell_tilde_r(nainv_op, kappa, r)
    na_j = jaffard_norm(A, r, method, margin)
    log_x = (math.log(2.0 * 3.0 ** r) + math.log(na_j)
             + math.log(elt.value)) / (r - 1.0)
    if log_x <= _MAXLOG:
        log_inner = math.log(2.0 + math.exp(log_x))
    else:
        log_inner = log_x
    log_bound = math.log(4.0) + math.log(elt.value) + r * log_inner
    bound = _exp_or_inf(log_bound)
    inv = inverse if inverse is not None else invert_truncated(A)
    measured = jaffard_norm(inv, r, "auto", margin)
    return _report(
        "baskakov_Jr",
        {"norm_A_alg": na_j, "norm_A_op": na_op, "norm_Ainv_op": nainv_op,
         "r": r, "auxiliary": {"margin": margin}},
        {"kappa": kappa, "beta": elt.beta, "gamma_r": elt.gamma_r,
         "ell_tilde_r": elt.value, "sup_argmax_k": elt.argmax_k,
         "log_bound": log_bound},
        bound, measured)


def constant_Cr_numeric(r):
    """128 * 50^r * 64^{1/r} * Gamma(r+1)^{1+1/r}; exact 409600 at r = 1."""
    if r <= 0:
        raise ParameterError("need r > 0")
    log_c = (math.log(128.0) + r * math.log(50.0) + math.log(64.0) / r
             + (1.0 + 1.0 / r) * math.lgamma(r + 1.0))
    if log_c > _MAXLOG:
        raise RangeError(f"constant overflows floats at r = {r}",
                         log_value=log_c)
    return 128.0 * 50.0 ** r * 64.0 ** (1.0 / r) * math.gamma(r + 1.0) ** (1.0 + 1.0 / r)


def _normalize_constant_mode(mode):
    m = str(mode).lower()
    if m in ("numeric", "numeric_cr", "numeric_jr"):
        return "numeric"
    if m in ("symbolic", "symbolic_cr", "symbolic_jr"):
        return "symbolic"
    raise ParameterError(f"unknown constant mode {mode!r}")


def explicit_bound_Cr(norm_A_Cr, norm_A_op, norm_Ainv_op, r,
                      constant_mode="numeric_Cr", measured=None):
    """Closed bound C_r ||A||_Cr^{1+1/r} ||A||^{2r+2/r+3} ||A^{-1}||^{2r+2/r+5}.

    Symbolic mode sets the constant to 1 (pure rate report).  The
    simplified single-norm form ||A||_Cr^{2r+3/r+4} ||A^{-1}||^{2r+2/r+5}
    is attached alongside.
    """
    if min(norm_A_Cr, norm_A_op, norm_Ainv_op) <= 0:
        raise ParameterError("norms must be positive")
    if r <= 0:
        raise ParameterError("need r > 0")
    if norm_A_op * norm_Ainv_op < 1.0 - 1e-9:
        raise ParameterError("||A|| ||A^{-1}|| >= 1 is violated")
    mode = _normalize_constant_mode(constant_mode)
    C = constant_Cr_numeric(r) if mode == "numeric" else 1.0
    e_alg = 1.0 + 1.0 / r
    e_op = 2.0 * r + 2.0 / r + 3.0
    e_inv = 2.0 * r + 2.0 / r + 5.0
    log_bound = (math.log(C) + e_alg * math.log(norm_A_Cr)
                 + e_op * math.log(norm_A_op) + e_inv * math.log(norm_Ainv_op))
    log_simple = (math.log(C) + (2.0 * r + 3.0 / r + 4.0) * math.log(norm_A_Cr)
                  + e_inv * math.log(norm_Ainv_op))
    return _report(
        "explicit_Cr",
        {"norm_A_alg": norm_A_Cr, "norm_A_op": norm_A_op,
         "norm_Ainv_op": norm_Ainv_op, "r": r,
         "auxiliary": {"constant_mode": mode}},
        {"C_r": C, "exponent_alg": e_alg, "exponent_op": e_op,
         "exponent_inv": e_inv, "rate_exponent": e_inv,
         "simplified_bound": _exp_or_inf(log_simple),
         "simplified_exponent_alg": 2.0 * r + 3.0 / r + 4.0,
         "log_bound": log_bound},
        _exp_or_inf(log_bound), measured)


def derived_constant_Jr_log(r):
    """log of the bookkeeping constant for the factored J_r bound.

    Assembled from gamma_r, the beta <= 1/25 envelope of the sup factor
    ((25/24)(25r/e)^r at kappa >= 1), and the operator-norm embedding
    ||A||_op <= (2 zeta(r) - 1) ||A||_Jr.
    """
    if r <= 1:
        raise ParameterError("need r > 1")
    g = gamma_r(r)
    log_G = math.log(g) + math.log(25.0 / 24.0) + r * (math.log(25.0 * r) - 1.0)
    x0 = 2.0 * 3.0 ** r * g / (2.0 * zeta(r) - 1.0)
    mu = 1.0 + 2.0 * x0 ** (-1.0 / (r - 1.0))
    return (math.log(4.0) + r * math.log(mu)
            + (r / (r - 1.0)) * math.log(2.0 * 3.0 ** r)
            + (2.0 + 1.0 / (r - 1.0)) * log_G)


def derived_constant_Jr(r):
    return _exp_or_inf(derived_constant_Jr_log(r))


def explicit_bound_Jr(norm_A_Jr, norm_A_op, norm_Ainv_op, r,
                      constant_mode="numeric_Jr", measured=None):
    """Factored bound C~_r ||A||_Jr^{1+1/(r-1)} ||A||^{2r+1+1/(r-1)}
    ||A^{-1}||^{2r+3+2/(r-1)}, plus the single-norm power form with
    C = ||A||_Jr and exponent 2r+2+2/(r-1)."""
    if min(norm_A_Jr, norm_A_op, norm_Ainv_op) <= 0:
        raise ParameterError("norms must be positive")
    if r <= 1:
        raise ParameterError("need r > 1")
    mode = _normalize_constant_mode(constant_mode)
    e_alg = 1.0 + 1.0 / (r - 1.0)
    e_op = 2.0 * r + 1.0 + 1.0 / (r - 1.0)
    e_inv = 2.0 * r + 3.0 + 2.0 / (r - 1.0)
    log_C = derived_constant_Jr_log(r) if mode == "numeric" else 0.0
    log_bound = (log_C + e_alg * math.log(norm_A_Jr)
                 + e_op * math.log(norm_A_op) + e_inv * math.log(norm_Ainv_op))
    # single-norm form: every ||A||_op replaced via the zeta embedding
    log_Cth = log_C + (e_op * math.log(2.0 * zeta(r) - 1.0)
                       if mode == "numeric" else 0.0)
    log_thm = (log_Cth + (e_alg + e_op) * math.log(norm_A_Jr)
               + e_inv * math.log(norm_Ainv_op))
    return _report(
        "explicit_Jr",
        {"norm_A_alg": norm_A_Jr, "norm_A_op": norm_A_op,
         "norm_Ainv_op": norm_Ainv_op, "r": r,
         "auxiliary": {"constant_mode": mode}},
        {"C_tilde_r": _exp_or_inf(log_C), "exponent_alg": e_alg,
         "exponent_op": e_op, "exponent_inv": e_inv,
         "rate_exponent": e_inv, "power_form_exponent_alg": e_alg + e_op,
         "power_form_bound": _exp_or_inf(log_thm), "log_bound": log_bound},
        _exp_or_inf(log_bound), measured)


def dd_domain_bound(norm_ainv_ambient, seminorm_a_dd, k, measured=None):
    """||a^{-1}||^2 |a| max(k, (q^k - 1)/(q - 1)) with q = ||a^{-1}|| |a|.

    The simplified overestimate 2 ||a^{-1}||^{k+1} |a|^k is attached when
    q > max(2, k).  q = 1 is the geometric-sum limit, value k.
    """
    if min(norm_ainv_ambient, seminorm_a_dd) <= 0:
        raise ParameterError("inputs must be positive")
    if k < 1 or k != int(k):
        raise ParameterError("k must be a positive integer")
    k = int(k)
    q = norm_ainv_ambient * seminorm_a_dd
    if abs(q - 1.0) <= 1e-12:
        gsum = float(k)
    else:
        log_qk = k * math.log(q)
        if log_qk > _MAXLOG:
            gsum = math.inf
        else:
            gsum = (q ** k - 1.0) / (q - 1.0)
    bound = norm_ainv_ambient ** 2 * seminorm_a_dd * max(float(k), gsum)
    simplified = None
    if q > max(2.0, float(k)):
        simplified = _exp_or_inf((k + 1.0) * math.log(norm_ainv_ambient)
                                 + k * math.log(seminorm_a_dd) + math.log(2.0))
    return _report(
        "derivation_domain",
        {"norm_A_alg": seminorm_a_dd, "norm_A_op": None,
         "norm_Ainv_op": norm_ainv_ambient, "r": None, "auxiliary": {"k": k}},
        {"q": q, "geometric_sum": gsum, "simplified_bound": simplified,
         "rate_exponent": k + 1.0},
        bound, measured)


def besov_bound(norm_ainv_ambient, norm_a_besov, r, p=1,
                fitted_constant=None, measured=None):
    """C ||a^{-1}||^2 ||a||_besov (q^{floor(r)+1} - 1)/(q - 1), q = product.

    The leading constant is unknown; C defaults to 1 (rate report) and a
    calibration fit may be passed in.  floor(r) = 0 recovers the
    first-order rule ||a^{-1}||^2 ||a||_besov exactly.
    """
    if min(norm_ainv_ambient, norm_a_besov) <= 0:
        raise ParameterError("inputs must be positive")
    if r <= 0:
        raise ParameterError("need r > 0")
    C = 1.0 if fitted_constant is None else float(fitted_constant)
    n = math.floor(r) + 1
    q = norm_ainv_ambient * norm_a_besov
    if abs(q - 1.0) <= 1e-12:
        gsum = float(n)
    else:
        gsum = (q ** n - 1.0) / (q - 1.0)
    bound = C * norm_ainv_ambient ** 2 * norm_a_besov * gsum
    return _report(
        "besov_control",
        {"norm_A_alg": norm_a_besov, "norm_A_op": None,
         "norm_Ainv_op": norm_ainv_ambient, "r": r, "auxiliary": {"p": p}},
        {"q": q, "floor_r": n - 1, "geometric_sum": gsum, "constant": C,
         "constant_fitted": fitted_constant is not None,
         "first_order": r < 1, "rate_exponent": float(n + 1)},
        bound, measured)


def bessel_rate_bound(norm_ainv_ambient, norm_a_bessel, r,
                      fitted_constant=None, measured=None):
    """Cubic-rate report C ||a^{-1}||^3 ||a||_P^2 for fractional r < 1."""
    if min(norm_ainv_ambient, norm_a_bessel) <= 0:
        raise ParameterError("inputs must be positive")
    if not 0 < r < 1:
        raise ParameterError("need 0 < r < 1")
    C = 1.0 if fitted_constant is None else float(fitted_constant)
    bound = C * norm_ainv_ambient ** 3 * norm_a_bessel ** 2
    return _report(
        "bessel_control",
        {"norm_A_alg": norm_a_bessel, "norm_A_op": None,
         "norm_Ainv_op": norm_ainv_ambient, "r": r, "auxiliary": {}},
        {"constant": C, "constant_fitted": fitted_constant is not None,
         "rate_exponent": 3.0},
        bound, measured)


def dales_davie_bound(norm_ainv_ambient, a_m=None, mode="general",
                      gevrey_r=None, mcap=400, measured=None):
    """Inversion bound in the normalized regime ||a||_DD <= 1, delta = 1/||a^{-1}||.

    general mode sums delta^{-1} + sum_m delta^{-m-1} A_m^m with the actual
    terms past the crossover index m_delta (first A_m < delta/2); if no
    crossover occurs within the supplied range the report is inconclusive
    (bound inf).  gevrey mode evaluates the closed form
    delta^{-1} phi_{r-1}(1/delta).
    """
    if norm_ainv_ambient <= 0:
        raise ParameterError("need a positive inverse norm")
    delta = 1.0 / norm_ainv_ambient
    log_idelta = math.log(norm_ainv_ambient)
    inter = {"delta": delta, "mode": mode}
    if mode == "gevrey":
        if gevrey_r is None or gevrey_r <= 1:
            raise ParameterError("gevrey mode needs gevrey_r > 1")
        log_bound = log_idelta + log_phi_r_from_log(log_idelta, gevrey_r - 1.0)
        inter.update({"gevrey_r": gevrey_r, "log_bound": log_bound})
        return _report(
            "dales_davie",
            {"norm_A_alg": 1.0, "norm_A_op": None,
             "norm_Ainv_op": norm_ainv_ambient, "r": gevrey_r,
             "auxiliary": {"normalized": True}},
            inter, _exp_or_inf(log_bound), measured)
    if mode != "general":
        raise ParameterError(f"unknown mode {mode!r}")
    if a_m is None:
        raise ParameterError("general mode needs the A_m sequence")
    seq = list(a_m)
    if any(v < 0 for v in seq):
        raise ParameterError("A_m values must be nonnegative")
    log_total = log_idelta
    m_delta = None
    used = 0
    for m, Am in enumerate(seq, start=1):
        lt = (m + 1.0) * log_idelta + (m * math.log(Am) if Am > 0 else -math.inf)
        log_total = float(np.logaddexp(log_total, lt))
        used = m
        if m_delta is None and Am < delta / 2.0:
            m_delta = m
        if m_delta is not None and lt < log_total + math.log(1e-16):
            break
        if m >= mcap:
            break
    inter.update({"m_delta": m_delta, "terms_used": used,
                  "inconclusive": m_delta is None, "log_bound": log_total})
    bound = math.inf if m_delta is None else _exp_or_inf(log_total)
    return _report(
        "dales_davie",
        {"norm_A_alg": 1.0, "norm_A_op": None,
         "norm_Ainv_op": norm_ainv_ambient, "r": None,
         "auxiliary": {"normalized": True}},
        inter, bound, measured)


def superpoly_bound(delta, r, s_choice=1.0, measured=None):
    """Two-layer composition: polynomial-stage inversion at s = s_choice
    (rate exponent 2s + 2/s + 5, equal to 9 at the optimal s = 1) feeding
    the gevrey Dales-Davie bound C0 delta^{-e} phi_{r-1}(C1 delta^{-e})."""
    if not 0 < delta <= 1:
        raise ParameterError("need 0 < delta <= 1")
    if r <= 1:
        raise ParameterError("need r > 1")
    if s_choice <= 0:
        raise ParameterError("need s_choice > 0")
    s = float(s_choice)
    e_s = 2.0 * s + 2.0 / s + 5.0
    Cs = constant_Cr_numeric(s)
    log_inner = math.log(Cs) + e_s * math.log(1.0 / delta)
    log_bound = log_inner + log_phi_r_from_log(log_inner, r - 1.0)
    return _report(
        "superpoly",
        {"norm_A_alg": 1.0, "norm_A_op": None, "norm_Ainv_op": 1.0 / delta,
         "r": r, "auxiliary": {"s": s}},
        {"exponent": e_s, "C0": Cs, "C1": Cs, "log_inner": log_inner,
         "log_bound": log_bound, "delta": delta},
        _exp_or_inf(log_bound), measured)
