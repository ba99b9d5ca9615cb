# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled special-function kernels.

Scalar loops over the same branches as ``_numeric``: Maclaurin series near
the origin, Taylor expansion about tabulated nodes in the middle band and
optimally truncated asymptotic series outside it.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, cos, sin, fabs, pow, M_PI, rint

cnp.import_array()

cdef double AI0, AIP0
cdef double SERIES_MAX, TABLE_LO, TABLE_HI, TABLE_STEP
cdef int TAYLOR_TERMS, ASYM_TERMS, NNODES
cdef double BESSEL_SERIES_MAX, BESSEL_ASYM_MIN, PAIR_DIAG_TOL
cdef double[::1] _nodes
cdef double[::1] _tab_ai
cdef double[::1] _tab_aip
cdef double[::1] _asym_u
cdef double[::1] _asym_v


def configure(consts, nodes, tab_ai, tab_aip, asym_u, asym_v):
    """Install constants and the node table built by the numpy module."""
    global AI0, AIP0, SERIES_MAX, TABLE_LO, TABLE_HI, TABLE_STEP
    global TAYLOR_TERMS, ASYM_TERMS, NNODES, BESSEL_SERIES_MAX, BESSEL_ASYM_MIN
    global PAIR_DIAG_TOL, _nodes, _tab_ai, _tab_aip, _asym_u, _asym_v
    AI0 = consts["AI0"]
    AIP0 = consts["AIP0"]
    SERIES_MAX = consts["SERIES_MAX"]
    TABLE_LO = consts["TABLE_LO"]
    TABLE_HI = consts["TABLE_HI"]
    TABLE_STEP = consts["TABLE_STEP"]
    TAYLOR_TERMS = consts["TAYLOR_TERMS"]
    ASYM_TERMS = consts["ASYM_TERMS"]
    BESSEL_SERIES_MAX = consts["BESSEL_SERIES_MAX"]
    BESSEL_ASYM_MIN = consts["BESSEL_ASYM_MIN"]
    PAIR_DIAG_TOL = consts["AIRY_PAIR_DIAG_TOL"]
    _nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    _tab_ai = np.ascontiguousarray(tab_ai, dtype=np.float64)
    _tab_aip = np.ascontiguousarray(tab_aip, dtype=np.float64)
    _asym_u = np.ascontiguousarray(asym_u, dtype=np.float64)
    _asym_v = np.ascontiguousarray(asym_v, dtype=np.float64)
    NNODES = _nodes.shape[0]


cdef void _series(double t, double* ai, double* aip) nogil:
    cdef double t3 = t * t * t
    cdef double a = 1.0, b = t, dfa = 0.5 * t * t, dgb = 1.0
    cdef double f = 1.0, g = t, fp = dfa, gp = 1.0
    cdef int k
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
        if fabs(a) + fabs(b) + fabs(dfa) + fabs(dgb) <= 1e-17 * (fabs(f) + fabs(g) + fabs(fp) + fabs(gp)):
            break
    ai[0] = AI0 * f + AIP0 * g
    aip[0] = AI0 * fp + AIP0 * gp


cdef void _taylor(double t, double* ai, double* aip) nogil:
    cdef int idx = <int> rint((t - TABLE_LO) / TABLE_STEP)
    if idx < 0:
        idx = 0
    if idx > NNODES - 1:
        idx = NNODES - 1
    cdef double t0 = _nodes[idx]
    cdef double d = t - t0
    cdef double cm1 = 0.0, cn = _tab_ai[idx], cn1 = _tab_aip[idx], cn2
    cdef double y = cn + cn1 * d, yp = cn1
    cdef double dn = d, dnm1
    cdef int n
    for n in range(TAYLOR_TERMS - 2):
        cn2 = (t0 * cn + cm1) / ((n + 1) * (n + 2))
        dnm1 = dn
        dn = dn * d
        y += cn2 * dn
        yp += (n + 2) * cn2 * dnm1
        cm1 = cn
        cn = cn1
        cn1 = cn2
    ai[0] = y
    aip[0] = yp


cdef double _trunc_sum(double[::1] coef, double zinv, int start, int stride) nogil:
    cdef double total = 0.0, prev = 1e308, term, zpow, step
    cdef double sign = 1.0
    cdef int idx
    zpow = 1.0 if start == 0 else zinv
    step = pow(zinv, stride)
    idx = start
    while idx < ASYM_TERMS:
        term = sign * coef[idx] * zpow
        if fabs(term) >= prev:
            break
        total += term
        prev = fabs(term)
        zpow *= step
        sign = -sign
        idx += stride
    return total


cdef void _asymptotic(double t, double* ai, double* aip) nogil:
    cdef double x, zeta, zinv, e, q, c, s
    if t > 0:
        x = t
        zeta = (2.0 / 3.0) * x * sqrt(x)
        zinv = 1.0 / zeta
        e = exp(-zeta) / (2.0 * sqrt(M_PI))
        q = pow(x, 0.25)
        ai[0] = e / q * _trunc_sum(_asym_u, zinv, 0, 1)
        aip[0] = -e * q * _trunc_sum(_asym_v, zinv, 0, 1)
    else:
        x = -t
        zeta = (2.0 / 3.0) * x * sqrt(x)
        zinv = 1.0 / zeta
        c = cos(zeta - M_PI / 4)
        s = sin(zeta - M_PI / 4)
        q = pow(x, 0.25)
        ai[0] = (c * _trunc_sum(_asym_u, zinv, 0, 2) + s * _trunc_sum(_asym_u, zinv, 1, 2)) / (sqrt(M_PI) * q)
        aip[0] = q * (s * _trunc_sum(_asym_v, zinv, 0, 2) - c * _trunc_sum(_asym_v, zinv, 1, 2)) / sqrt(M_PI)


cdef inline void _airy1(double t, double* ai, double* aip) nogil:
    if fabs(t) <= SERIES_MAX:
        _series(t, ai, aip)
    elif t >= TABLE_LO and t <= TABLE_HI:
        _taylor(t, ai, aip)
    else:
        _asymptotic(t, ai, aip)


def airy(t):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tt = np.ascontiguousarray(np.ravel(t), dtype=np.float64)
    cdef Py_ssize_t n = tt.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ai = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] aip = np.empty(n)
    cdef double a, ap
    with nogil:
        for i in range(n):
            _airy1(tt[i], &a, &ap)
            ai[i] = a
            aip[i] = ap
    shape = np.shape(t)
    return ai.reshape(shape), aip.reshape(shape)


cdef double _bessel_series(double nu, double t, double gam) nogil:
    cdef double half = 0.5 * t
    cdef double term = pow(half, nu) / gam
    cdef double total = term
    cdef double q = -half * half
    cdef int k
    for k in range(1, 200):
        term = term * q / (k * (k + nu))
        total += term
        if fabs(term) <= 1e-17 * fabs(total):
            break
    return total


cdef void _bessel_miller(double t, double* j0out, double* j1out) nogil:
    cdef int nstart = 2 * ((<int> t + 40) // 2)
    cdef double jp1 = 0.0, j = 1e-30, jm1, norm = 0.0, j1 = 0.0
    cdef double two_inv = 2.0 / t
    cdef int n, m
    for n in range(nstart, 0, -1):
        jm1 = n * two_inv * j - jp1
        jp1 = j
        j = jm1
        m = n - 1
        if m == 1:
            j1 = j
        elif m >= 2 and m % 2 == 0:
            norm += 2.0 * j
        if fabs(j) > 1e200:
            j *= 1e-200
            jp1 *= 1e-200
            norm *= 1e-200
            j1 *= 1e-200
    norm += j
    j0out[0] = j / norm
    j1out[0] = j1 / norm


cdef void _bessel_pq(double nu, double zinv, double* pout, double* qout) nogil:
    cdef double mu = 4.0 * nu * nu
    cdef double p = 0.0, q = 0.0, term = 1.0, prev = 1e308, sgn
    cdef int k
    for k in range(60):
        # stop at the smallest term, or once terms no longer move the sums
        if fabs(term) >= prev or fabs(term) < 1e-18:
            break
        sgn = 1.0 if (k // 2) % 2 == 0 else -1.0
        if k % 2 == 0:
            p += sgn * term
        else:
            q += sgn * term
        prev = fabs(term)
        term = term * (mu - (2 * k + 1) * (2 * k + 1)) / ((k + 1) * 8.0) * zinv
    pout[0] = p
    qout[0] = q


cdef void _bessel_asymptotic(double t, double* j0out, double* j1out) nogil:
    # chi_1 = chi_0 - pi/2, so one sine/cosine pair serves both orders
    cdef double p0, q0, p1, q1
    cdef double zinv = 1.0 / t
    _bessel_pq(0.0, zinv, &p0, &q0)
    _bessel_pq(1.0, zinv, &p1, &q1)
    cdef double chi = t - 0.25 * M_PI
    cdef double c = cos(chi), s = sin(chi)
    cdef double amp = sqrt(2.0 / (M_PI * t))
    j0out[0] = amp * (p0 * c - q0 * s)
    j1out[0] = amp * (p1 * s + q1 * c)


def bessel_j01(t):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tt = np.ascontiguousarray(np.ravel(t), dtype=np.float64)
    cdef Py_ssize_t n = tt.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] j0 = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] j1 = np.empty(n)
    cdef double x, a, b
    with nogil:
        for i in range(n):
            x = tt[i]
            if x < BESSEL_SERIES_MAX:
                j0[i] = _bessel_series(0.0, x, 1.0)
                j1[i] = _bessel_series(1.0, x, 1.0)
            elif x < BESSEL_ASYM_MIN:
                _bessel_miller(x, &a, &b)
                j0[i] = a
                j1[i] = b
            else:
                _bessel_asymptotic(x, &a, &b)
                j0[i] = a
                j1[i] = b
    shape = np.shape(t)
    return j0.reshape(shape), j1.reshape(shape)


def airy_pair_tail(a, b, lower):
    aa, bb, ll = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(lower, float))
    shape = aa.shape
    cdef cnp.ndarray[cnp.float64_t, ndim=1] av = np.ascontiguousarray(aa.ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bv = np.ascontiguousarray(bb.ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lv = np.ascontiguousarray(ll.ravel())
    cdef Py_ssize_t n = av.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double ai_a, aip_a, ai_b, aip_b, diff, um
    with nogil:
        for i in range(n):
            diff = av[i] - bv[i]
            if fabs(diff) < PAIR_DIAG_TOL:
                um = lv[i] + 0.5 * (av[i] + bv[i])
                _airy1(um, &ai_a, &aip_a)
                out[i] = aip_a * aip_a - um * ai_a * ai_a
            else:
                _airy1(lv[i] + av[i], &ai_a, &aip_a)
                _airy1(lv[i] + bv[i], &ai_b, &aip_b)
                out[i] = (ai_a * aip_b - aip_a * ai_b) / diff
    return out.reshape(shape)
