"""Hot numeric loops.

Every kernel exists twice: an explicit loop (compiled with numba when
available) and a vectorised numpy version.  The module-level names
``power_sum``, ``em_correction``, ``abel_plana``, ``dirichlet_sum``, ``gaussian_comb_sum`` and
``gaussian_line_sum`` point to the compiled loops when numba is active and to
the numpy versions otherwise.  Both are kept importable under the ``*_loop`` /
``*_numpy`` names for benchmarking and cross-checking.

All complex powers use the principal branch ``w**-s = exp(-s*log(w))``.
"""

import math

import numpy as np

from ._accel import HAVE_NUMBA, njit


# ---------------------------------------------------------------------------
# sum_{m=0}^{M-1} (m + a)^{-s}


def _power_sum_loop(a, s, M):
    # Kahan-compensated; the real and imaginary parts are compensated separately
    # because numba has no compensated complex accumulator.
    sr = 0.0
    si = 0.0
    cr = 0.0
    ci = 0.0
    for m in range(M):
        t = np.exp(-s * np.log(m + a))
        yr = t.real - cr
        tr = sr + yr
        cr = (tr - sr) - yr
        sr = tr
        yi = t.imag - ci
        ti = si + yi
        ci = (ti - si) - yi
        si = ti
    return complex(sr, si)


def _power_sum_numpy(a, s, M):
    if M <= 0:
        return 0j
    w = np.arange(M, dtype=np.float64) + a
    return complex(np.sum(np.exp(-s * np.log(w.astype(np.complex128)))))


# ---------------------------------------------------------------------------
# Euler-Maclaurin tail after the direct sum:
#   (M+a)^{1-s}/(s-1) + (M+a)^{-s}/2 + sum_k B_2k/(2k)! (s)_{2k-1} (M+a)^{-s-2k+1}
# Returns (value, |last Bernoulli term|).


def _em_correction_loop(a, s, M, bern):
    w = M + a
    logw = np.log(w)
    head = np.exp((1.0 - s) * logw) / (s - 1.0) + 0.5 * np.exp(-s * logw)
    total = 0j
    last = 0.0
    poch = s  # (s)_{2k-1}
    winv2 = 1.0 / (w * w)
    pw = np.exp(-(s + 1.0) * logw)  # (M+a)^{-s-1}
    for k in range(1, bern.shape[0] + 1):
        term = bern[k - 1] * poch * pw
        total += term
        last = abs(term)
        poch = poch * (s + 2 * k - 1) * (s + 2 * k)
        pw = pw * winv2
    return head + total, last


def _em_correction_numpy(a, s, M, bern):
    w = complex(M + a)
    logw = np.log(w)
    head = np.exp((1.0 - s) * logw) / (s - 1.0) + 0.5 * np.exp(-s * logw)
    K = len(bern)
    k = np.arange(1, K + 1)
    # (s)_{2k-1} = s (s+1) ... (s+2k-2)
    factors = s + np.arange(0, 2 * K - 1)
    poch = np.cumprod(factors)[0::2]
    powers = np.exp(-(s + 2 * k - 1) * logw)
    terms = np.asarray(bern) * poch * powers
    return complex(head + np.sum(terms)), float(abs(terms[-1]))


# ---------------------------------------------------------------------------
# Abel-Plana integral  i * int_0^inf [(a+it)^{-s} - (a-it)^{-s}] / (e^{2 pi t} - 1) dt
# on fixed quadrature nodes (Re a >= 1 keeps the integrand analytic in a strip
# of half-width 1 around the positive axis).


def _abel_plana_loop(a, s, nodes, weights):
    total = 0j
    for i in range(nodes.shape[0]):
        t = nodes[i]
        num = np.exp(-s * np.log(a + 1j * t)) - np.exp(-s * np.log(a - 1j * t))
        total += weights[i] * num / math.expm1(2.0 * math.pi * t)
    return 1j * total


def _abel_plana_numpy(a, s, nodes, weights):
    t = np.asarray(nodes)
    num = np.exp(-s * np.log(a + 1j * t)) - np.exp(-s * np.log(a - 1j * t))
    return complex(1j * np.sum(np.asarray(weights) * num / np.expm1(2.0 * np.pi * t)))


# ---------------------------------------------------------------------------
# sum_{m>=1} x^m m^{s-1}, stopped once the certified tail is below tol * |sum|


def _dirichlet_sum_loop(x, s, tol, max_terms, min_terms, tail_factor):
    # tail_factor bounds (remaining tail) / |last term| once m >= min_terms
    total = 0j
    xm = 1.0 + 0j
    for m in range(1, max_terms + 1):
        xm = xm * x
        term = xm * np.exp((s - 1.0) * math.log(m))
        total += term
        if m >= min_terms and abs(term) * tail_factor <= tol * abs(total):
            return total, m
    return total, max_terms


def _dirichlet_sum_numpy(x, s, tol, max_terms, min_terms, tail_factor):
    # Block-wise so short series stay cheap.
    total = 0j
    start = 1
    block = 64
    logx = np.log(complex(x))
    while start <= max_terms:
        stop = min(start + block, max_terms + 1)
        m = np.arange(start, stop, dtype=np.float64)
        terms = np.exp(m * logx + (s - 1.0) * np.log(m))
        partial = total + np.cumsum(terms)
        done = (np.abs(terms) * tail_factor <= tol * np.abs(partial)) & (m >= min_terms)
        hit = np.flatnonzero(done)
        if hit.size:
            i = int(hit[0])
            return complex(partial[i]), start + i
        total = complex(partial[-1])
        start = stop
        block *= 2
    return total, max_terms


# ---------------------------------------------------------------------------
# sum_{m=m_lo}^{m_hi} w^m exp(-(m P - t0)^2 / (2 sigma^2))


def _gaussian_comb_sum_loop(w, period, t0, sigma, m_lo, m_hi):
    total = 0j
    inv = 1.0 / (2.0 * sigma * sigma)
    for m in range(m_lo, m_hi + 1):
        d = m * period - t0
        total += w ** m * math.exp(-d * d * inv)
    return total


def _gaussian_comb_sum_numpy(w, period, t0, sigma, m_lo, m_hi):
    if m_hi < m_lo:
        return 0j
    m = np.arange(m_lo, m_hi + 1, dtype=np.float64)
    d = m * period - t0
    phase = np.exp(m * np.log(complex(w)))
    return complex(np.sum(phase * np.exp(-d * d / (2.0 * sigma * sigma))))


# ---------------------------------------------------------------------------
# sum_{p=p_lo}^{p_hi} exp(z t0 + z^2 sigma^2 / 2),  z = -2 i pi (p + c) / P


def _gaussian_line_sum_loop(c, period, t0, sigma, p_lo, p_hi):
    total = 0j
    for p in range(p_lo, p_hi + 1):
        nu = (p + c) / period
        x = 2.0 * math.pi * nu
        # z = -i x: z t0 = -i x t0, z^2 = -x^2
        total += math.exp(-0.5 * x * x * sigma * sigma) * complex(math.cos(x * t0), -math.sin(x * t0))
    return total


def _gaussian_line_sum_numpy(c, period, t0, sigma, p_lo, p_hi):
    if p_hi < p_lo:
        return 0j
    p = np.arange(p_lo, p_hi + 1, dtype=np.float64)
    x = 2.0 * np.pi * (p + c) / period
    return complex(np.sum(np.exp(-0.5 * x * x * sigma * sigma - 1j * x * t0)))


if HAVE_NUMBA:
    power_sum = njit(_power_sum_loop)
    em_correction = njit(_em_correction_loop)
    abel_plana = njit(_abel_plana_loop)
    dirichlet_sum = njit(_dirichlet_sum_loop)
    gaussian_comb_sum = njit(_gaussian_comb_sum_loop)
    gaussian_line_sum = njit(_gaussian_line_sum_loop)
else:
    power_sum = _power_sum_numpy
    em_correction = _em_correction_numpy
    abel_plana = _abel_plana_numpy
    dirichlet_sum = _dirichlet_sum_numpy
    gaussian_comb_sum = _gaussian_comb_sum_numpy
    gaussian_line_sum = _gaussian_line_sum_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"
