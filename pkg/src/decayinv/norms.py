"""Decay-profile norms and iterated-derivation seminorms.

Window routes read the dense entries; symbol routes sum the exact
coefficient sequence over the whole lattice.  Large iterated sums are
accumulated in log space.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import ParameterError
from .lattice import LatticeMatrix, operator_norm_l2
from .quotient import compositions
from .weights import Weight

_NEG_INF = float("-inf")


def _wants_symbol(A, method):
    if method == "symbol":
        if A.symbol is None:
            raise ParameterError("matrix carries no symbol")
        return True
    if method == "window":
        return False
    if method == "auto":
        return A.symbol is not None
    raise ParameterError(f"unknown method {method!r}")


def side_diag_sup(A, margin=0):
    """Decay profile d(m) = max_l |A(l, l-m)| on the margin-shrunk window.

    Returns (offsets, d) with offsets running over the representable range.
    """
    n = A.n
    if 2 * margin >= n:
        raise ParameterError("margin empties the window")
    E = A.entries[margin:n - margin, margin:n - margin]
    k = E.shape[0]
    offs = np.arange(-(k - 1), k)
    d = np.array([np.abs(np.diagonal(E, offset=-m)).max() for m in offs])
    return offs, d


def _symbol_parts(A):
    """Exact |c(m)| on the finite support, plus geometric tail parameters
    and the nonnegative offsets already covered exactly."""
    sym = A.symbol
    exact = {m: abs(sym.coefficient(m)) for m in sym.coeffs}
    geo = sym.geometric
    if geo is None:
        return exact, None, None, frozenset()
    excl = frozenset(m for m in sym.coeffs if m >= 0)
    return exact, abs(geo.scale), abs(geo.ratio), excl


def _geom_sum_weighted(scale, rho, weight, excl, rel_tol=1e-16):
    """sum over m >= 0, m not in excl, of scale rho^m v(m)."""
    if scale == 0.0:
        return 0.0
    total = 0.0
    m0 = 0
    chunk = 4096
    while True:
        ms = np.arange(m0, m0 + chunk)
        t = scale * rho ** ms.astype(float) * weight.value(ms)
        if excl and m0 <= max(excl):
            keep = ~np.isin(ms, list(excl))
            t = t * keep
        s = float(t.sum())
        total += s
        m0 += chunk
        if s <= rel_tol * max(total, 1e-300) and (t[-1] <= t[0] or s == 0.0):
            return total
        if m0 > 10_000_000:
            raise ParameterError("weighted geometric sum failed to localize")


def cv_norm(A, weight, method="auto", margin=0):
    """Weighted decay norm: sum_m d(m) v(m)."""
    if _wants_symbol(A, method):
        exact, scale, rho, excl = _symbol_parts(A)
        if scale is not None and weight.kind == "table":
            raise ParameterError("table weight cannot cover an infinite symbol")
        total = sum(av * float(weight.value(m)) for m, av in exact.items())
        if scale is not None:
            total += _geom_sum_weighted(scale, rho, weight, excl)
        return total
    offs, d = side_diag_sup(A, margin)
    return float((d * weight.value(offs)).sum())


def _geom_sup_candidates(log_peak_shift, rho, excl, extra=4):
    """Candidate offsets for the sup of m |-> rho^m * poly(m) skipping excl."""
    if rho == 0.0:
        base = {0}
    else:
        mstar = max(0.0, log_peak_shift / (-math.log(rho)) - 1.0)
        lo = max(0, math.floor(mstar) - len(excl) - extra)
        hi = math.ceil(mstar) + len(excl) + extra
        base = set(range(lo, hi + 1)) | {0}
    if excl:
        base |= {m + 1 for m in excl} | {max(0, m - 1) for m in excl}
    return sorted(m for m in base if m not in excl)


def jaffard_norm(A, r, method="auto", margin=0):
    """Polynomial off-diagonal sup norm: sup_m d(m) (1+|m|)^r."""
    if r < 0:
        raise ParameterError("jaffard_norm needs r >= 0")
    if _wants_symbol(A, method):
        exact, scale, rho, excl = _symbol_parts(A)
        best = max((av * (1.0 + abs(m)) ** r for m, av in exact.items()),
                   default=0.0)
        if scale is not None and scale > 0:
            for m in _geom_sup_candidates(r, rho, excl):
                best = max(best, scale * rho ** m * (1.0 + m) ** r)
        return best
    offs, d = side_diag_sup(A, margin)
    return float((d * (1.0 + np.abs(offs)) ** r).max())


def banded_error(A, k, method="auto", margin=0):
    """Truncation tail E_k = sum_{|m| >= k+1} d(m)."""
    if k < 0:
        raise ParameterError("banded_error needs k >= 0")
    if _wants_symbol(A, method):
        exact, scale, rho, excl = _symbol_parts(A)
        total = sum(av for m, av in exact.items() if abs(m) >= k + 1)
        if scale is not None:
            total += scale * rho ** (k + 1) / (1.0 - rho)
            total -= sum(scale * rho ** m for m in excl if m >= k + 1)
        return max(total, 0.0)
    offs, d = side_diag_sup(A, margin)
    return float(d[np.abs(offs) >= k + 1].sum())


def _normalize_ambient(ambient):
    if ambient == "c0":
        return ("c0", None)
    if ambient == "operator":
        return ("operator", None)
    if isinstance(ambient, tuple) and len(ambient) == 2 and ambient[0] == "jaffard":
        s = float(ambient[1])
        if s < 0:
            raise ParameterError("jaffard ambient needs s >= 0")
        return ("jaffard", s)
    raise ParameterError(f"unknown ambient {ambient!r}")


def ambient_norm(A, ambient="c0", method="auto", margin=0):
    kind, s = _normalize_ambient(ambient)
    if kind == "c0":
        return cv_norm(A, Weight.poly(0.0), method, margin)
    if kind == "jaffard":
        return jaffard_norm(A, s, method, margin)
    return operator_norm_l2(A)


def dk_norm_log(A, k, ambient="c0", method="auto", margin=0):
    """log of the ambient norm of D^k A; -inf when the norm is zero."""
    kind, s = _normalize_ambient(ambient)
    if kind == "operator":
        om = A.offsets().astype(float)
        M = (om ** k) * A.entries if k > 0 else A.entries
        top = np.abs(M).max()
        if top == 0.0:
            return _NEG_INF
        v = operator_norm_l2(LatticeMatrix(A.window, M / top, "general"))
        return math.log(top) + (math.log(v) if v > 0 else _NEG_INF)

    if _wants_symbol(A, method):
        exact, scale, rho, excl = _symbol_parts(A)
        logs = []
        for m, av in exact.items():
            if av == 0.0 or (k > 0 and m == 0):
                continue
            t = math.log(av) + k * math.log(abs(m)) if k > 0 else math.log(av)
            if kind == "jaffard":
                t += s * math.log1p(abs(m))
            logs.append(t)
        if scale is not None and scale > 0 and rho > 0:
            lr = math.log(rho)
            lscale = math.log(scale)
            shift = k + (s if kind == "jaffard" else 0.0)
            peak = shift / (-lr) + 1.0
            cap = int(peak + 60 + 10 * math.sqrt(peak))
            ms = np.arange(0 if k == 0 else 1, cap + 1, dtype=float)
            term = lscale + ms * lr
            if k > 0:
                term = term + k * np.log(ms)
            if kind == "jaffard":
                term = term + s * np.log1p(ms)
            if excl:
                keep = ~np.isin(ms.astype(int), list(excl))
                ms, term = ms[keep], term[keep]
            if term.size:
                logs.append(float(term.max()) if kind == "jaffard"
                            else float(logsumexp(term)))
        if not logs:
            return _NEG_INF
        return max(logs) if kind == "jaffard" else float(logsumexp(np.array(logs)))

    offs, d = side_diag_sup(A, margin)
    mask = d > 0
    if k > 0:
        mask &= offs != 0
    if not mask.any():
        return _NEG_INF
    om = np.abs(offs[mask]).astype(float)
    base = np.log(d[mask])
    if k > 0:
        base = base + k * np.log(om)
    if kind == "jaffard":
        return float((base + s * np.log1p(om)).max())
    return float(logsumexp(base))


def dd_seminorm(A, K, ambient="c0", method="auto", margin=0):
    """|A|_{D(D^K)} = sum_{m=1..K} ||D^m A|| / m!"""
    if K < 1:
        raise ParameterError("dd_seminorm needs K >= 1")
    logs = [dk_norm_log(A, m, ambient, method, margin) - float(gammaln(m + 1))
            for m in range(1, K + 1)]
    logs = [x for x in logs if x > _NEG_INF]
    if not logs:
        return 0.0
    return float(np.exp(logsumexp(np.array(logs))))


@dataclass
class DalesDavieValue:
    value: float
    log_value: float
    kmax_used: int
    converged: bool
    tail_ratio: float


def dales_davie_norm(A, seq, ambient="c0", method="auto", margin=0,
                     tol=1e-14, kcap=160):
    """sum_k ||D^k A|| / M_k with the sequence's normalization.

    For unbounded sequences the series is cut once three consecutive terms
    fall below tol relative to the partial sum; if that never happens
    within kcap the result is flagged converged=False.
    """
    hard = seq.kmax
    kmax = min(kcap, hard) if hard is not None else kcap
    logs = []
    total_log = _NEG_INF
    quiet = 0
    used = 0
    last_term = _NEG_INF
    for k in range(0, kmax + 1):
        lt = dk_norm_log(A, k, ambient, method, margin) - seq.log_M(k)
        used = k
        last_term = lt
        if lt > _NEG_INF:
            logs.append(lt)
            total_log = float(logsumexp(np.array(logs)))
        if total_log > _NEG_INF and lt < total_log + math.log(tol):
            quiet += 1
            if quiet >= 3 and k >= 8:
                break
        else:
            quiet = 0
    complete = hard is not None and used >= kmax
    converged = complete or quiet >= 3
    tail_ratio = math.exp(last_term - total_log) if total_log > _NEG_INF else 0.0
    value = math.exp(total_log) if total_log < 709.0 else float("inf")
    return DalesDavieValue(value=value, log_value=total_log, kmax_used=used,
                           converged=bool(converged), tail_ratio=tail_ratio)


def a_m_bruteforce(seq, m, kmax=15):
    """A_m from the definition: sup over orders k <= kmax and ordered
    compositions of k into m parts of (k!/M_k) prod M_{k_j}/k_j!, m-th root."""
    if m < 1:
        raise ParameterError("a_m needs m >= 1")
    hard = seq.kmax
    cap = min(kmax, hard) if hard is not None else kmax
    if cap < m:
        raise ParameterError(f"kmax {kmax} too small for m = {m}")
    best = _NEG_INF
    for k in range(m, cap + 1):
        base = float(gammaln(k + 1)) - seq.log_M(k)
        for parts in compositions(k, m):
            t = base
            for kj in parts:
                t += seq.log_M(kj) - float(gammaln(kj + 1))
            if t > best:
                best = t
    return math.exp(best / m)


def a_m_gevrey(r, m):
    """Closed form for gevrey(r): A_m = (m!)^{(1-r)/m}."""
    if r < 1:
        raise ParameterError("gevrey needs r >= 1")
    if m < 1:
        raise ParameterError("a_m needs m >= 1")
    return math.exp((1.0 - r) * float(gammaln(m + 1)) / m)
