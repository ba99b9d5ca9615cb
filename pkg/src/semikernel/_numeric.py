"""Pure numpy implementations of the hot special-function kernels.

These are the reference versions of the routines in ``_ckernels.pyx``; the
compiled module mirrors them loop-for-loop.  Everything here works on float64
arrays and returns arrays of the same shape.
"""
import math

import numpy as np

AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))

# branch boundaries
SERIES_MAX = 2.0
TABLE_LO = -9.0
TABLE_HI = 8.0
TABLE_STEP = 0.125
TAYLOR_TERMS = 24
ASYM_TERMS = 60
BESSEL_SERIES_MAX = 8.0
BESSEL_ASYM_MIN = 25.0

_SQRT_PI = math.sqrt(math.pi)


def _asym_coefficients(n):
    u = np.empty(n)
    v = np.empty(n)
    u[0] = v[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v[k] = -(6 * k + 1) / (6 * k - 1) * u[k]
    return u, v


ASYM_U, ASYM_V = _asym_coefficients(ASYM_TERMS)


# ----------------------------------------------------------------------------
# Airy: Maclaurin branch

def airy_series(t):
    """Maclaurin series for (Ai, Ai').  Accurate for |t| <~ 5."""
    t = np.asarray(t, dtype=float)
    t3 = t * t * t
    a = np.ones_like(t)
    b = t.copy()
    dfa = 0.5 * t * t
    dgb = np.ones_like(t)
    f = a.copy()
    g = b.copy()
    fp = dfa.copy()
    gp = dgb.copy()
    for k in range(1, 400):
        a = a * t3 / ((3 * k - 1) * (3 * k))
        b = b * t3 / ((3 * k) * (3 * k + 1))
        dgb = dgb * t3 / ((3 * k) * (3 * k - 2))
        f += a
        g += b
        gp += dgb
        if k >= 2:
            dfa = dfa * t3 / ((3 * k - 3) * (3 * k - 1))
            fp += dfa
        small = np.abs(a) + np.abs(b) + np.abs(dfa) + np.abs(dgb)
        if np.all(small <= 1e-17 * (np.abs(f) + np.abs(g) + np.abs(fp) + np.abs(gp))):
            break
    return AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp


# ----------------------------------------------------------------------------
# Airy: asymptotic branches

def airy_asymptotic(t):
    """Large-|t| expansions, truncated at the smallest term.

    Decaying exponential form for t > 0, trigonometric form for t < 0.
    """
    t = np.asarray(t, dtype=float)
    ai = np.zeros_like(t)
    aip = np.zeros_like(t)
    pos = t > 0
    if np.any(pos):
        ai[pos], aip[pos] = _asym_positive(t[pos])
    neg = ~pos
    if np.any(neg):
        ai[neg], aip[neg] = _asym_negative(t[neg])
    return ai, aip


def _truncated_sum(coef, zinv, alternate=True, start=0, stride=1):
    """Sum coef[start::stride] * zinv**k with optimal truncation, elementwise."""
    total = np.zeros_like(zinv)
    prev = np.full_like(zinv, np.inf)
    live = np.ones(zinv.shape, dtype=bool)
    zpow = np.ones_like(zinv) if start == 0 else zinv.copy()
    step = zinv**stride
    sign = 1.0
    for idx in range(start, ASYM_TERMS, stride):
        term = sign * coef[idx] * zpow
        live &= np.abs(term) < prev
        total = np.where(live, total + term, total)
        prev = np.abs(term)
        zpow = zpow * step
        if alternate:
            sign = -sign
        if not np.any(live):
            break
    return total


def _asym_positive(x):
    zeta = (2.0 / 3.0) * x * np.sqrt(x)
    zinv = 1.0 / zeta
    su = _truncated_sum(ASYM_U, zinv)
    sv = _truncated_sum(ASYM_V, zinv)
    e = np.exp(-zeta) / (2.0 * _SQRT_PI)
    q = x**0.25
    return e / q * su, -e * q * sv


def _asym_negative(t):
    x = -t
    zeta = (2.0 / 3.0) * x * np.sqrt(x)
    zinv = 1.0 / zeta
    ue = _truncated_sum(ASYM_U, zinv, start=0, stride=2)
    uo = _truncated_sum(ASYM_U, zinv, start=1, stride=2)
    ve = _truncated_sum(ASYM_V, zinv, start=0, stride=2)
    vo = _truncated_sum(ASYM_V, zinv, start=1, stride=2)
    c = np.cos(zeta - math.pi / 4)
    s = np.sin(zeta - math.pi / 4)
    q = x**0.25
    ai = (c * ue + s * uo) / (_SQRT_PI * q)
    aip = q * (s * ve - c * vo) / _SQRT_PI
    return ai, aip


# ----------------------------------------------------------------------------
# Airy: Taylor expansion about tabulated nodes (middle band)

def _taylor_coefficients(t0, y0, yp0, nterms):
    """Coefficients of y(t0 + d) for y'' = t y."""
    c = np.zeros(nterms)
    c[0] = y0
    c[1] = yp0
    for n in range(nterms - 2):
        prev = c[n - 1] if n >= 1 else 0.0
        c[n + 2] = (t0 * c[n] + prev) / ((n + 1) * (n + 2))
    return c


def _taylor_step(t0, y0, yp0, d, nterms=48):
    c = _taylor_coefficients(t0, y0, yp0, nterms)
    powers = d ** np.arange(nterms)
    y = float(np.dot(c, powers))
    dp = float(np.dot(c[1:] * np.arange(1, nterms), powers[:-1]))
    return y, dp


def build_airy_table(step=TABLE_STEP, lo=TABLE_LO, hi=TABLE_HI):
    """Ai and Ai' on an equispaced node grid covering [lo, hi].

    Negative nodes are obtained by stepping the ODE outward from the Maclaurin
    values at 0 (oscillatory side, stable); positive nodes by stepping inward
    from the asymptotic value at ``hi`` (decaying side, stable only in that
    direction).
    """
    nodes = np.arange(lo, hi + 0.5 * step, step)
    ai = np.empty_like(nodes)
    aip = np.empty_like(nodes)
    i0 = int(round(-lo / step))
    ai[i0], aip[i0] = AI0, AIP0
    for i in range(i0, 0, -1):
        ai[i - 1], aip[i - 1] = _taylor_step(nodes[i], ai[i], aip[i], -step)
    a_hi, ap_hi = _asym_positive(np.array([hi]))
    ai[-1], aip[-1] = a_hi[0], ap_hi[0]
    for i in range(len(nodes) - 1, i0 + 1, -1):
        ai[i - 1], aip[i - 1] = _taylor_step(nodes[i], ai[i], aip[i], -step)
    return nodes, ai, aip


TABLE_NODES, TABLE_AI, TABLE_AIP = build_airy_table()


def airy_taylor(t):
    """Taylor expansion about the nearest table node; valid on [TABLE_LO, TABLE_HI]."""
    t = np.asarray(t, dtype=float)
    idx = np.clip(np.rint((t - TABLE_LO) / TABLE_STEP).astype(int), 0, len(TABLE_NODES) - 1)
    t0 = TABLE_NODES[idx]
    d = t - t0
    # coefficient recursion carried elementwise
    c_prev = np.zeros_like(t)
    c0 = TABLE_AI[idx].copy()
    c1 = TABLE_AIP[idx].copy()
    y = c0 + c1 * d
    yp = c1.copy()
    dn = d.copy()  # d**(n+1) for n = 0
    dnm1 = np.ones_like(t)  # d**n
    cm1, cn, cn1 = c_prev, c0, c1
    for n in range(TAYLOR_TERMS - 2):
        cn2 = (t0 * cn + cm1) / ((n + 1) * (n + 2))
        dnm1 = dn
        dn = dn * d
        y += cn2 * dn
        yp += (n + 2) * cn2 * dnm1
        cm1, cn, cn1 = cn, cn1, cn2
    return y, yp


# ----------------------------------------------------------------------------
# Airy: dispatcher

def airy(t):
    """Return (Ai(t), Ai'(t)) for a float array."""
    t = np.asarray(t, dtype=float)
    if t.ndim == 0:
        a, ap = airy(t.reshape(1))
        return a.reshape(()), ap.reshape(())
    ai = np.empty_like(t)
    aip = np.empty_like(t)
    ser = np.abs(t) <= SERIES_MAX
    tab = ~ser & (t >= TABLE_LO) & (t <= TABLE_HI)
    asy = ~(ser | tab)
    if np.any(ser):
        ai[ser], aip[ser] = airy_series(t[ser])
    if np.any(tab):
        ai[tab], aip[tab] = airy_taylor(t[tab])
    if np.any(asy):
        ai[asy], aip[asy] = airy_asymptotic(t[asy])
    return ai, aip


# ----------------------------------------------------------------------------
# Bessel J0, J1

def _bessel_series(nu, t):
    half = 0.5 * t
    term = half**nu / math.gamma(nu + 1.0)
    term = term * np.ones_like(t)
    total = term.copy()
    q = -half * half
    for k in range(1, 200):
        term = term * q / (k * (k + nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _bessel_miller(t):
    """J0 and J1 by backward recurrence normalised with J0 + 2 sum J_2k = 1."""
    nstart = 2 * ((int(np.max(t)) + 40) // 2)
    jp1 = np.zeros_like(t)  # J_{n+1}
    j = np.full_like(t, 1e-30)  # J_n
    norm = np.zeros_like(t)
    j1 = np.zeros_like(t)
    for n in range(nstart, 0, -1):
        jm1 = 2.0 * n / t * j - jp1
        jp1, j = j, jm1
        m = n - 1
        if m == 1:
            j1 = j.copy()
        elif m >= 2 and m % 2 == 0:
            norm += 2.0 * j
        big = np.abs(j) > 1e200
        if np.any(big):
            scale = np.where(big, 1e-200, 1.0)
            j *= scale
            jp1 *= scale
            norm *= scale
            j1 *= scale
    norm += j
    return j / norm, j1 / norm


def _bessel_asymptotic(nu, t):
    mu = 4.0 * nu * nu
    zinv = 1.0 / t
    p = np.zeros_like(t)
    q = np.zeros_like(t)
    term = np.ones_like(t)
    prev = np.full_like(t, np.inf)
    live = np.ones(t.shape, dtype=bool)
    for k in range(0, 60):
        # term == a_k(nu) / t**k
        mag = np.abs(term)
        live &= mag < prev
        sgn = 1.0 if (k // 2) % 2 == 0 else -1.0
        if k % 2 == 0:
            p = np.where(live, p + sgn * term, p)
        else:
            q = np.where(live, q + sgn * term, q)
        prev = mag
        term = term * (mu - (2 * k + 1) ** 2) / ((k + 1) * 8.0) * zinv
        if not np.any(live):
            break
    chi = t - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * t)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j01(t):
    """Return (J0(t), J1(t)) for t >= 0."""
    t = np.asarray(t, dtype=float)
    if t.ndim == 0:
        j0, j1 = bessel_j01(t.reshape(1))
        return j0.reshape(()), j1.reshape(())
    j0 = np.empty_like(t)
    j1 = np.empty_like(t)
    lo = t < BESSEL_SERIES_MAX
    mid = (t >= BESSEL_SERIES_MAX) & (t < BESSEL_ASYM_MIN)
    hi = t >= BESSEL_ASYM_MIN
    if np.any(lo):
        j0[lo] = _bessel_series(0.0, t[lo])
        j1[lo] = _bessel_series(1.0, t[lo])
    if np.any(mid):
        j0[mid], j1[mid] = _bessel_miller(t[mid])
    if np.any(hi):
        j0[hi] = _bessel_asymptotic(0.0, t[hi])
        j1[hi] = _bessel_asymptotic(1.0, t[hi])
    return j0, j1


# ----------------------------------------------------------------------------
# Airy fibre integral

AIRY_PAIR_DIAG_TOL = 3e-6


def airy_pair_tail(a, b, lower):
    """Integral of Ai(s + a) Ai(s + b) over s in [lower, inf), elementwise.

    Uses the Wronskian antiderivative; for a == b the closed form
    Ai'(u)**2 - u Ai(u)**2.  Near-coincident arguments fall back to the
    diagonal form at the midpoint (error O((a - b)**2)).
    """
    a, b, lower = np.broadcast_arrays(
        np.asarray(a, float), np.asarray(b, float), np.asarray(lower, float)
    )
    shape = a.shape
    a, b, lower = (np.atleast_1d(v).ravel() for v in (a, b, lower))
    ua = lower + a
    ub = lower + b
    ai_a, aip_a = airy(ua)
    ai_b, aip_b = airy(ub)
    diff = a - b
    near = np.abs(diff) < AIRY_PAIR_DIAG_TOL
    safe = np.where(near, 1.0, diff)
    out = (ai_a * aip_b - aip_a * ai_b) / safe
    if np.any(near):
        um = lower[near] + 0.5 * (a[near] + b[near])
        ai_m, aip_m = airy(um)
        out[near] = aip_m * aip_m - um * ai_m * ai_m
    return out.reshape(shape)
