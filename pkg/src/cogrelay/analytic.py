"""Closed-form primary-outage probabilities, exact and high-SNR asymptotic.

Two topologies:

* direct link present: the slot is halved, both hops run at 2R, and the
  destination MRC-combines the direct and beamformed branches.  Outage
  splits into nu1 (K >= 2 relays cooperated but the combined SINR still
  missed the threshold) and nu2 (K < 2 and the direct link alone failed).
* no direct link: the slot splits zeta/(1-zeta); with K < 2 the primary
  packet is lost outright, with K >= 2 only the beamformed branch counts.

Everything is expressed through thresholds Q = (2^rate - 1)/gamma, the
per-relay decoding probability L = exp(-Q_broadcast), and the interference
variable phi = gamma_s * |h_v_pd|^2 ~ Exponential(mean gamma_s).  All
series below are arranged as sums of positive terms (or complements taken
only when they cost at most one bit), so the same code is accurate from
nu ~ 1 down to the deep high-SNR tail.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from math import comb, exp, expm1, factorial, lgamma, log
from typing import Callable

from scipy import integrate, special

from .channel import decoding_set_pmf
from .config import Case, SystemConfig, snr_threshold

_log = logging.getLogger(__name__)

# float64 factorial limit: 170! is finite, 171! overflows
_MAX_ORDER = 170


class InvalidCase(Exception):
    """Operation called for the wrong topology case."""


class QuadratureFailure(Exception):
    """Adaptive phi-averaging could not reach the requested tolerance."""


@dataclass(frozen=True)
class OutageBreakdown:
    nu1: float    # outage with K >= 2 (combined/relayed signal undecodable)
    nu2: float    # outage with K < 2 (plus direct-link failure in case 1)
    nu: float     # nu1 + nu2 clipped into [0, 1]


def _breakdown(nu1: float, nu2: float) -> OutageBreakdown:
    total = nu1 + nu2
    nu = min(max(total, 0.0), 1.0)
    if nu != total:
        _log.debug("clipped nu1+nu2 = %r to %r", total, nu)
    return OutageBreakdown(nu1=nu1, nu2=nu2, nu=nu)


# --- integer-order incomplete gamma functions ---------------------------


def _check_order(n: int) -> int:
    if n != int(n) or n < 1:
        raise ValueError(f"order must be an integer >= 1, got {n}")
    if n > _MAX_ORDER:
        raise ValueError(f"order {n} exceeds float factorial range ({_MAX_ORDER})")
    return int(n)


def upper_incomplete_gamma(m_plus_1: int, s: float) -> float:
    """U(n, s) = integral_s^inf R^(n-1) e^-R dR at integer order n = m_plus_1.

    Exact finite form U(n, s) = e^-s * sum_{i<n} (n-1)!/i! s^i; every term
    positive, so no cancellation at any (n, s).
    """
    n = _check_order(m_plus_1)
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    # run the e^-s factor inside the terms so nothing overflows transiently
    term = factorial(n - 1) * exp(-s) if s <= 700 else exp(lgamma(n) - s)
    total = term
    for i in range(1, n):
        term *= s / i
        total += term
    return total


def lower_incomplete_gamma(m_plus_1: int, s: float) -> float:
    """L(n, s) = integral_0^s R^(n-1) e^-R dR, the complement of U(n, s).

    For s < n+1 the complement (n-1)! - U(n, s) would cancel badly, so a
    positive Kummer-type series is used instead:
    L(n, s) = s^n e^-s sum_k s^k / (n (n+1) ... (n+k)).
    """
    n = _check_order(m_plus_1)
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    if s == 0.0:
        return 0.0
    if s >= n + 1:
        # U is at most ~half the full Gamma here; at worst one bit cancels
        return factorial(n - 1) - upper_incomplete_gamma(n, s)
    prefactor = exp(n * log(s) - s)
    term = 1.0 / n
    total = term
    k = n + 1
    while True:
        term *= s / k
        total += term
        k += 1
        if term <= 1e-17 * total:
            return prefactor * total


def poisson_tail(n: int, x: float) -> float:
    """Pr{Poisson(x) >= n} = Pr{Gamma(n, 1) <= x}, robust at any magnitude."""
    if n <= 0:
        return 1.0
    if x <= 0.0:
        return 0.0
    return float(special.gammainc(n, x))


def _moment_one_plus_phi(n: int, gamma_s: float) -> float:
    """E[(1+phi)^n] for phi ~ Exponential(mean gamma_s).

    Equals sum_{j<=n} n!/(n-j)! gamma_s^j (exponential raw moments); e.g.
    n=1 -> 1 + gamma_s, n=2 -> 1 + 2 gamma_s + 2 gamma_s^2.
    """
    term = 1.0
    total = 1.0
    for j in range(1, n + 1):
        term *= (n - j + 1) * gamma_s
        total += term
    return total


# --- phi-averaged Gamma CDF (the Eq.-(30)-type inner sum, regrouped) -----


def _expected_poisson_tail(n: int, c: float, gamma_s: float) -> float:
    """A(c) = E_phi[ Pr{Gamma(n,1) <= c(1+phi)} ], phi ~ Exponential(gamma_s).

    Expanding the Gamma CDF as a Poisson tail and integrating term-by-term
    gives A(c) = sum_{m>=n} G_m with

        G_m = (1+c*gamma_s)^-1 * a^m * e^-c * sum_{i<=m} z^i/i!,
        a = c*gamma_s/(1+c*gamma_s),  z = c + 1/gamma_s.

    The partial sum below n is evaluated first; if it is small the
    complement 1 - partial costs nothing, otherwise the positive tail
    series is summed directly with remainder bound a^{m+1} e^{1/gamma_s}.
    """
    if n <= 0:
        return 1.0
    if c <= 0.0:
        return 0.0
    if gamma_s < 1.0 / 700.0:
        # interference indistinguishable from zero at float precision
        return poisson_tail(n, c)
    cg = c * gamma_s
    a = cg / (1.0 + cg)
    base = 1.0 / (1.0 + cg)
    z = c + 1.0 / gamma_s
    t = exp(-c)                 # t_i = e^-c z^i / i!
    if t == 0.0:
        return 1.0              # c > ~745: threshold dwarfs any order n here
    P = t                       # P_m = e^-c sum_{i<=m} z^i/i!
    apow = 1.0                  # a^m
    partial = 0.0
    for m in range(n):
        partial += base * apow * P
        apow *= a
        t *= z / (m + 1)
        P += t
    if partial < 0.5:
        return 1.0 - partial
    emax = exp(1.0 / gamma_s)   # upper bound on all P_m
    tail = 0.0
    m = n
    while True:
        tail += base * apow * P
        apow *= a
        t *= z / (m + 1)
        P += t
        m += 1
        if apow * emax <= 1e-16 * tail:
            return tail


# --- case 1: direct link + MRC ------------------------------------------


def _threshold_q(cfg: SystemConfig) -> float:
    return snr_threshold(cfg.forward_rate()) / cfg.gamma_p


def _nu_small_k(cfg: SystemConfig, pmf) -> float:
    """nu2: probability that K < 2 and (case 1 only) the direct link fails."""
    p_lt2 = pmf[0] + pmf[1] if cfg.M > 2 else 1.0
    if cfg.case is Case.DIRECT_LINK:
        return p_lt2 * -expm1(-_threshold_q(cfg))
    return p_lt2


def _case1_bracket(K: int, Q: float, phi: float) -> float:
    """Pr{direct < Q and Gamma(K-1,1) < (Q - direct)(1+phi)} for direct ~ Exp(1).

    Expanding the Gamma CDF termwise gives
        bracket = sum_{m >= K-1} W_m,
        W_m = e^-Q Q (X^m/m!) V(m, s),  X = Q(1+phi),  s = Q*phi,
    with V(m, s) = integral_0^1 u^m e^-su du.  Each W_m also regroups as
        W_m = (e^-Q/phi) ((1+phi)/phi)^m Pr{Poisson(s) >= m+1},
    which is the stable factorization once s >= m+2.  The complement
    Lbar - sum_{m <= K-2} W_m is preferred whenever it keeps at least half
    of Lbar = 1 - e^-Q (no meaningful cancellation there).
    """
    if Q <= 0.0:
        return 0.0
    lbar = -expm1(-Q)

    def term(m: int, u_m: float) -> float:
        s = Q * phi
        if s >= m + 2:
            # log form keeps e^-Q * ((1+phi)/phi)^m overflow-free jointly
            scale = exp(-Q + m * log(1.0 + 1.0 / phi) - log(phi))
            return scale * poisson_tail(m + 1, s)
        # V(m, s) by its positive series: e^-s/(m+1) * (1 + s/(m+2) + ...)
        v = 1.0 / (m + 1)
        total_v = v
        i = m + 2
        while True:
            v *= s / i
            total_v += v
            i += 1
            if v <= 1e-17 * total_v:
                break
        return u_m * exp(-s) * total_v

    # U_m = e^-Q Q X^m / m!, tracked multiplicatively for the series branch
    X = Q * (1.0 + phi)
    u_m = exp(-Q) * Q
    partial = 0.0
    for m in range(K - 1):
        partial += term(m, u_m)
        u_m *= X / (m + 1)
    complement = lbar - partial
    if complement >= 0.5 * lbar:
        return max(complement, 0.0)

    # positive tail from m = K-1; terms decay once X/(m+1) < 1
    acc = 0.0
    m = K - 1
    u_m = exp(-Q + m * log(X) + log(Q) - lgamma(m + 1))
    while True:
        acc += term(m, u_m)
        u_m *= X / (m + 1)
        m += 1
        rho = X / (m + 1)
        if rho < 1.0 and u_m / (m + 1) <= (1.0 - rho) * 1e-16 * acc:
            return acc


def _case1_nu1_given_phi(cfg: SystemConfig, phi: float) -> float:
    Q = _threshold_q(cfg)
    pmf = decoding_set_pmf(cfg)
    return sum(pmf[K] * _case1_bracket(K, Q, phi) for K in range(2, cfg.M))


def case1_outage_given_phi(cfg: SystemConfig, phi: float) -> OutageBreakdown:
    """Outage probabilities conditioned on the interference level phi."""
    if cfg.case is not Case.DIRECT_LINK:
        raise InvalidCase("case1_outage_given_phi needs cfg.case = DIRECT_LINK")
    pmf = decoding_set_pmf(cfg)
    return _breakdown(_case1_nu1_given_phi(cfg, phi), _nu_small_k(cfg, pmf))


def average_over_phi(fn: Callable[[float], float], gamma_s: float,
                     rel_tol: float = 1e-8) -> float:
    """E[fn(phi)] over phi ~ Exponential(mean gamma_s).

    Substitutes phi = gamma_s*t and integrates fn(gamma_s*t) e^-t on [0, T]
    by adaptive Gauss-Kronrod, doubling T from 30 until two successive
    truncations agree to rel_tol (the e^-30 tail is already < 1e-12).
    """
    T = 30.0
    prev = None
    while T <= 3840.0:
        res = integrate.quad(lambda t: fn(gamma_s * t) * exp(-t), 0.0, T,
                             epsabs=0.0, epsrel=rel_tol / 10.0, limit=200,
                             full_output=1)
        val, err = res[0], res[1]
        clean = len(res) == 3 and err <= rel_tol * max(abs(val), 1e-300)
        if clean and prev is not None and abs(val - prev) <= rel_tol * abs(val):
            return val
        prev = val if clean else None
        T *= 2.0
    raise QuadratureFailure(
        f"phi-average did not converge to rel_tol={rel_tol} by T={T / 2}")


def case1_outage(cfg: SystemConfig) -> OutageBreakdown:
    """Primary outage with a direct link, averaged over the interference phi."""
    if cfg.case is not Case.DIRECT_LINK:
        raise InvalidCase("case1_outage needs cfg.case = DIRECT_LINK")
    pmf = decoding_set_pmf(cfg)
    nu2 = _nu_small_k(cfg, pmf)
    if _threshold_q(cfg) == 0.0:
        return _breakdown(0.0, nu2)
    nu1 = average_over_phi(lambda phi: _case1_nu1_given_phi(cfg, phi), cfg.gamma_s)
    return _breakdown(nu1, nu2)


def case1_outage_highsnr(cfg: SystemConfig) -> float:
    """Leading Q^(M-1) term of the case-1 outage as gamma_p grows."""
    if cfg.case is not Case.DIRECT_LINK:
        raise InvalidCase("case1_outage_highsnr needs cfg.case = DIRECT_LINK")
    Q = _threshold_q(cfg)
    bracket = sum(
        comb(cfg.M - 1, K) * _moment_one_plus_phi(K - 1, cfg.gamma_s) / factorial(K)
        for K in range(2, cfg.M)
    )
    return (bracket + (cfg.M - 1)) * Q ** (cfg.M - 1)


# --- case 2: no direct link ----------------------------------------------


def case2_outage_given_phi(cfg: SystemConfig, phi: float) -> OutageBreakdown:
    """Outage probabilities without a direct link, conditioned on phi."""
    if cfg.case is not Case.NO_DIRECT_LINK:
        raise InvalidCase("case2_outage_given_phi needs cfg.case = NO_DIRECT_LINK")
    x_zeta = snr_threshold(cfg.forward_rate()) * (1.0 + phi) / cfg.gamma_p
    pmf = decoding_set_pmf(cfg)
    nu1 = sum(pmf[K] * poisson_tail(K - 1, x_zeta) for K in range(2, cfg.M))
    return _breakdown(nu1, _nu_small_k(cfg, pmf))


def case2_outage(cfg: SystemConfig) -> OutageBreakdown:
    """Primary outage without a direct link, averaged over phi in closed form."""
    if cfg.case is not Case.NO_DIRECT_LINK:
        raise InvalidCase("case2_outage needs cfg.case = NO_DIRECT_LINK")
    q_zeta = _threshold_q(cfg)
    pmf = decoding_set_pmf(cfg)
    nu1 = sum(
        pmf[K] * _expected_poisson_tail(K - 1, q_zeta, cfg.gamma_s)
        for K in range(2, cfg.M)
    )
    return _breakdown(nu1, _nu_small_k(cfg, pmf))


def case2_outage_highsnr(cfg: SystemConfig) -> float:
    """Leading Q^(M-2) term of the case-2 outage as gamma_p grows.

    Keeps every decoding-set size: the K-relay branch contributes
    C(M-1,K) Q_b^{M-1-K} Q_f^{K-1} E[(1+phi)^{K-1}]/(K-1)! and K < 2
    contributes (M-1) Q_b^{M-2}, with Q_b and Q_f the broadcast- and
    forward-phase thresholds.  Every term carries gamma^-(M-2).
    """
    if cfg.case is not Case.NO_DIRECT_LINK:
        raise InvalidCase("case2_outage_highsnr needs cfg.case = NO_DIRECT_LINK")
    q_b = snr_threshold(cfg.broadcast_rate()) / cfg.gamma_p
    q_f = snr_threshold(cfg.forward_rate()) / cfg.gamma_p
    total = (cfg.M - 1) * q_b ** (cfg.M - 2)
    for K in range(2, cfg.M):
        total += (
            comb(cfg.M - 1, K)
            * q_b ** (cfg.M - 1 - K)
            * q_f ** (K - 1)
            * _moment_one_plus_phi(K - 1, cfg.gamma_s)
            / factorial(K - 1)
        )
    return total


# --- case dispatchers -----------------------------------------------------


def outage_probability(cfg: SystemConfig) -> OutageBreakdown:
    if cfg.case is Case.DIRECT_LINK:
        return case1_outage(cfg)
    if cfg.case is Case.NO_DIRECT_LINK:
        return case2_outage(cfg)
    raise InvalidCase(f"unknown case {cfg.case!r}")


def outage_highsnr(cfg: SystemConfig) -> float:
    if cfg.case is Case.DIRECT_LINK:
        return case1_outage_highsnr(cfg)
    if cfg.case is Case.NO_DIRECT_LINK:
        return case2_outage_highsnr(cfg)
    raise InvalidCase(f"unknown case {cfg.case!r}")
