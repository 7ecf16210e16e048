# cython: language_level=3
"""MPFR-backed Hessenberg reduction and shifted complex QR.

Same algorithm, shifts and deflation rule as ``_qr_py``; the matrix lives in
two C arrays of ``mpfr_t`` (real and imaginary parts) so the sweeps run
without Python object traffic and with the GIL released.  Values cross the
boundary as exact (mantissa, exponent) pairs.
"""
from libc.stdlib cimport malloc, free

import gmpy2

from ..errors import ConvergenceError

cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    ctypedef __mpz_struct *mpz_ptr
    void mpz_init(mpz_ptr)
    void mpz_clear(mpz_ptr)
    char *mpz_get_str(char *, int, mpz_ptr)
    int mpz_set_str(mpz_ptr, const char *, int)
    void mp_get_memory_functions(void *(**)(size_t) noexcept,
                                 void *(**)(void *, size_t, size_t) noexcept,
                                 void (**)(void *, size_t) noexcept)

cdef extern from "string.h":
    size_t strlen(const char *)

cdef extern from "mpfr.h" nogil:
    ctypedef long mpfr_prec_t
    ctypedef long mpfr_exp_t
    ctypedef struct __mpfr_struct:
        pass
    ctypedef __mpfr_struct mpfr_t[1]
    ctypedef __mpfr_struct *mpfr_ptr
    ctypedef const __mpfr_struct *mpfr_srcptr
    ctypedef enum mpfr_rnd_t:
        MPFR_RNDN
    void mpfr_init2(mpfr_ptr, mpfr_prec_t)
    void mpfr_clear(mpfr_ptr)
    int mpfr_set(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_set_ui(mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_set_si(mpfr_ptr, long, mpfr_rnd_t)
    int mpfr_set_d(mpfr_ptr, double, mpfr_rnd_t)
    int mpfr_set_z(mpfr_ptr, mpz_ptr, mpfr_rnd_t)
    int mpfr_set_zero(mpfr_ptr, int)
    mpfr_exp_t mpfr_get_z_2exp(mpz_ptr, mpfr_srcptr)
    int mpfr_mul_2si(mpfr_ptr, mpfr_srcptr, long, mpfr_rnd_t)
    int mpfr_add(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_sub(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_mul(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_div(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_sqr(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_sqrt(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_neg(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_abs(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_cmp(mpfr_srcptr, mpfr_srcptr)
    int mpfr_zero_p(mpfr_srcptr)
    int mpfr_sgn(mpfr_srcptr)
    void mpfr_swap(mpfr_ptr, mpfr_ptr)

DEF NTMP = 16
DEF NREG = 13

cdef int ITERATIONS_PER_EIGENVALUE = 30
cdef int EXCEPTIONAL_EVERY = 10


ctypedef struct Mat:
    int n
    mpfr_prec_t prec
    __mpfr_struct *re
    __mpfr_struct *im
    __mpfr_struct *t      # NTMP scratch registers
    __mpfr_struct *vre    # Householder vector
    __mpfr_struct *vim


cdef inline mpfr_ptr R(Mat *w, int i, int j) noexcept nogil:
    return &w.re[i * w.n + j]


cdef inline mpfr_ptr I(Mat *w, int i, int j) noexcept nogil:
    return &w.im[i * w.n + j]


cdef class _Work:
    """Owns the MPFR storage behind a :c:type:`Mat`."""
    cdef Mat m

    def __cinit__(self, int n, long prec):
        cdef int i
        self.m.n = n
        self.m.prec = prec
        self.m.re = <__mpfr_struct *> malloc(max(n * n, 1) * sizeof(__mpfr_struct))
        self.m.im = <__mpfr_struct *> malloc(max(n * n, 1) * sizeof(__mpfr_struct))
        self.m.t = <__mpfr_struct *> malloc(NTMP * sizeof(__mpfr_struct))
        self.m.vre = <__mpfr_struct *> malloc(max(n, 1) * sizeof(__mpfr_struct))
        self.m.vim = <__mpfr_struct *> malloc(max(n, 1) * sizeof(__mpfr_struct))
        if not (self.m.re and self.m.im and self.m.t and self.m.vre and self.m.vim):
            free(self.m.re)
            free(self.m.im)
            free(self.m.t)
            free(self.m.vre)
            free(self.m.vim)
            self.m.re = NULL
            raise MemoryError()
        for i in range(n * n):
            mpfr_init2(&self.m.re[i], prec)
            mpfr_init2(&self.m.im[i], prec)
            mpfr_set_zero(&self.m.re[i], 1)
            mpfr_set_zero(&self.m.im[i], 1)
        for i in range(n):
            mpfr_init2(&self.m.vre[i], prec)
            mpfr_init2(&self.m.vim[i], prec)
        for i in range(NTMP):
            mpfr_init2(&self.m.t[i], prec)

    def __dealloc__(self):
        cdef int i
        if self.m.re == NULL:
            return
        for i in range(self.m.n * self.m.n):
            mpfr_clear(&self.m.re[i])
            mpfr_clear(&self.m.im[i])
        for i in range(self.m.n):
            mpfr_clear(&self.m.vre[i])
            mpfr_clear(&self.m.vim[i])
        for i in range(NTMP):
            mpfr_clear(&self.m.t[i])
        free(self.m.re)
        free(self.m.im)
        free(self.m.t)
        free(self.m.vre)
        free(self.m.vim)


cdef void _free_gmp_str(char *s) noexcept:
    cdef void (*freefunc)(void *, size_t) noexcept
    mp_get_memory_functions(NULL, NULL, &freefunc)
    freefunc(s, strlen(s) + 1)


cdef _load(mpfr_ptr dst, object x, mpz_ptr tmp):
    # x is a gmpy2.mpfr; copy exactly through its (mantissa, exponent) pair
    if not gmpy2.is_finite(x):
        raise ValueError("non-finite matrix entry")
    mant, exp = x.as_mantissa_exp()
    if mant == 0:
        mpfr_set_zero(dst, 1)
        return
    digits = format(int(mant), "x").encode("ascii")
    mpz_set_str(tmp, digits, 16)
    mpfr_set_z(dst, tmp, MPFR_RNDN)
    mpfr_mul_2si(dst, dst, <long> int(exp), MPFR_RNDN)


cdef object _store(mpfr_ptr src, mpz_ptr tmp):
    cdef mpfr_exp_t e
    cdef char *s
    if mpfr_zero_p(src):
        return gmpy2.mpfr(0)
    e = mpfr_get_z_2exp(tmp, src)
    s = mpz_get_str(NULL, 16, tmp)
    try:
        mant = int(s.decode("ascii"), 16)
    finally:
        _free_gmp_str(s)
    return gmpy2.mul_2exp(gmpy2.mpfr(mant), e)


cdef _Work _from_flat(list flat, int n, long prec):
    if len(flat) != n * n:
        raise ValueError(f"expected {n * n} entries, got {len(flat)}")
    cdef _Work w = _Work(n, prec)
    cdef mpz_t tmp
    cdef int k
    mpz_init(tmp)
    try:
        with gmpy2.context(precision=prec):
            for k in range(n * n):
                z = gmpy2.mpc(flat[k])
                _load(&w.m.re[k], z.real, tmp)
                _load(&w.m.im[k], z.imag, tmp)
    finally:
        mpz_clear(tmp)
    return w


cdef list _to_flat(_Work w, bint diagonal_only):
    cdef mpz_t tmp
    cdef int k, n = w.m.n
    out = []
    mpz_init(tmp)
    try:
        with gmpy2.context(precision=w.m.prec):
            for k in range(n * n):
                if diagonal_only and k % (n + 1):
                    continue
                out.append(gmpy2.mpc(_store(&w.m.re[k], tmp), _store(&w.m.im[k], tmp)))
    finally:
        mpz_clear(tmp)
    return out


# ---- complex helpers; results may alias inputs ----


cdef inline void cabs(mpfr_ptr out, mpfr_srcptr ar, mpfr_srcptr ai, mpfr_ptr t) noexcept nogil:
    # sqrt(ar^2 + ai^2); mpfr_hypot is far slower and the exponent range makes
    # overflow a non-issue.  out must not alias ai.
    mpfr_sqr(t, ai, MPFR_RNDN)
    mpfr_sqr(out, ar, MPFR_RNDN)
    mpfr_add(out, out, t, MPFR_RNDN)
    mpfr_sqrt(out, out, MPFR_RNDN)


cdef inline void cnorm(mpfr_ptr out, mpfr_srcptr ar, mpfr_srcptr ai, mpfr_ptr t) noexcept nogil:
    # out must not alias ai
    mpfr_sqr(t, ai, MPFR_RNDN)
    mpfr_sqr(out, ar, MPFR_RNDN)
    mpfr_add(out, out, t, MPFR_RNDN)


cdef inline void cmul(mpfr_ptr rr, mpfr_ptr ri, mpfr_srcptr ar, mpfr_srcptr ai,
                      mpfr_srcptr br, mpfr_srcptr bi, mpfr_ptr t1, mpfr_ptr t2,
                      mpfr_ptr t3) noexcept nogil:
    # mul + add throughout: mpfr_fma is several times slower at these sizes
    mpfr_mul(t1, ar, br, MPFR_RNDN)
    mpfr_mul(t3, ai, bi, MPFR_RNDN)
    mpfr_sub(t1, t1, t3, MPFR_RNDN)
    mpfr_mul(t2, ar, bi, MPFR_RNDN)
    mpfr_mul(t3, ai, br, MPFR_RNDN)
    mpfr_add(t2, t2, t3, MPFR_RNDN)
    mpfr_swap(rr, t1)
    mpfr_swap(ri, t2)


cdef inline void cdiv(mpfr_ptr rr, mpfr_ptr ri, mpfr_srcptr ar, mpfr_srcptr ai,
                      mpfr_srcptr br, mpfr_srcptr bi, mpfr_ptr t1, mpfr_ptr t2, mpfr_ptr t3,
                      mpfr_ptr t4) noexcept nogil:
    # (a * conj(b)) / |b|^2
    cnorm(t3, br, bi, t1)
    mpfr_mul(t2, ai, bi, MPFR_RNDN)
    mpfr_mul(t1, ar, br, MPFR_RNDN)
    mpfr_add(t1, t1, t2, MPFR_RNDN)
    mpfr_mul(t2, ar, bi, MPFR_RNDN)
    mpfr_mul(t4, ai, br, MPFR_RNDN)
    mpfr_sub(t2, t4, t2, MPFR_RNDN)
    mpfr_div(rr, t1, t3, MPFR_RNDN)
    mpfr_div(ri, t2, t3, MPFR_RNDN)


cdef inline void csqrt(mpfr_ptr rr, mpfr_ptr ri, mpfr_srcptr ar, mpfr_srcptr ai,
                       mpfr_ptr t1, mpfr_ptr t2) noexcept nogil:
    # principal root: sqrt((|a| + x)/2) + i*sgn(y)*sqrt((|a| - x)/2), cancellation-free
    cdef int neg_im = mpfr_sgn(ai) < 0
    cabs(t1, ar, ai, t2)
    if mpfr_zero_p(t1):
        mpfr_set_zero(rr, 1)
        mpfr_set_zero(ri, 1)
        return
    if mpfr_sgn(ar) >= 0:
        mpfr_add(t1, t1, ar, MPFR_RNDN)
        mpfr_mul_2si(t1, t1, -1, MPFR_RNDN)
        mpfr_sqrt(t1, t1, MPFR_RNDN)            # real part
        mpfr_div(t2, ai, t1, MPFR_RNDN)
        mpfr_mul_2si(ri, t2, -1, MPFR_RNDN)
        mpfr_swap(rr, t1)
    else:
        mpfr_sub(t1, t1, ar, MPFR_RNDN)
        mpfr_mul_2si(t1, t1, -1, MPFR_RNDN)
        mpfr_sqrt(t1, t1, MPFR_RNDN)            # |imag part|
        mpfr_abs(t2, ai, MPFR_RNDN)
        mpfr_div(t2, t2, t1, MPFR_RNDN)
        mpfr_mul_2si(rr, t2, -1, MPFR_RNDN)
        if neg_im:
            mpfr_neg(ri, t1, MPFR_RNDN)
        else:
            mpfr_swap(ri, t1)


cdef void _hessenberg(Mat *w) noexcept nogil:
    cdef int n = w.n
    cdef int k, i, j, m
    cdef __mpfr_struct *t = w.t
    # t0 tail/norm, t1 |x0|, t2..t3 phase, t4..t5 alpha, t6 beta, t7..t8 acc, t9..t12 scratch
    for k in range(n - 2):
        mpfr_set_zero(&t[0], 1)
        for i in range(k + 2, n):
            cnorm(&t[9], R(w, i, k), I(w, i, k), &t[10])
            mpfr_add(&t[0], &t[0], &t[9], MPFR_RNDN)
        if mpfr_zero_p(&t[0]):
            continue
        cnorm(&t[9], R(w, k + 1, k), I(w, k + 1, k), &t[10])
        mpfr_add(&t[0], &t[0], &t[9], MPFR_RNDN)
        mpfr_sqrt(&t[0], &t[0], MPFR_RNDN)
        cabs(&t[1], R(w, k + 1, k), I(w, k + 1, k), &t[9])
        if mpfr_zero_p(&t[1]):
            mpfr_set_ui(&t[2], 1, MPFR_RNDN)
            mpfr_set_zero(&t[3], 1)
        else:
            mpfr_div(&t[2], R(w, k + 1, k), &t[1], MPFR_RNDN)
            mpfr_div(&t[3], I(w, k + 1, k), &t[1], MPFR_RNDN)
        # alpha = -phase * norm
        mpfr_mul(&t[4], &t[2], &t[0], MPFR_RNDN)
        mpfr_neg(&t[4], &t[4], MPFR_RNDN)
        mpfr_mul(&t[5], &t[3], &t[0], MPFR_RNDN)
        mpfr_neg(&t[5], &t[5], MPFR_RNDN)
        m = n - k - 1
        mpfr_sub(&w.vre[0], R(w, k + 1, k), &t[4], MPFR_RNDN)
        mpfr_sub(&w.vim[0], I(w, k + 1, k), &t[5], MPFR_RNDN)
        for i in range(1, m):
            mpfr_set(&w.vre[i], R(w, k + 1 + i, k), MPFR_RNDN)
            mpfr_set(&w.vim[i], I(w, k + 1 + i, k), MPFR_RNDN)
        mpfr_set_zero(&t[6], 1)
        for i in range(m):
            cnorm(&t[9], &w.vre[i], &w.vim[i], &t[10])
            mpfr_add(&t[6], &t[6], &t[9], MPFR_RNDN)
        mpfr_set_ui(&t[9], 2, MPFR_RNDN)
        mpfr_div(&t[6], &t[9], &t[6], MPFR_RNDN)
        # left: acc = beta * sum conj(v_i) h[k+1+i][j]
        for j in range(k + 1, n):
            mpfr_set_zero(&t[7], 1)
            mpfr_set_zero(&t[8], 1)
            for i in range(m):
                # conj(v) * h = (vr*hr + vi*hi) + i(vr*hi - vi*hr)
                mpfr_mul(&t[9], &w.vre[i], R(w, k + 1 + i, j), MPFR_RNDN)
                mpfr_add(&t[7], &t[7], &t[9], MPFR_RNDN)
                mpfr_mul(&t[9], &w.vim[i], I(w, k + 1 + i, j), MPFR_RNDN)
                mpfr_add(&t[7], &t[7], &t[9], MPFR_RNDN)
                mpfr_mul(&t[9], &w.vre[i], I(w, k + 1 + i, j), MPFR_RNDN)
                mpfr_add(&t[8], &t[8], &t[9], MPFR_RNDN)
                mpfr_mul(&t[9], &w.vim[i], R(w, k + 1 + i, j), MPFR_RNDN)
                mpfr_sub(&t[8], &t[8], &t[9], MPFR_RNDN)
            if mpfr_zero_p(&t[7]) and mpfr_zero_p(&t[8]):
                continue
            mpfr_mul(&t[7], &t[7], &t[6], MPFR_RNDN)
            mpfr_mul(&t[8], &t[8], &t[6], MPFR_RNDN)
            for i in range(m):
                cmul(&t[11], &t[12], &w.vre[i], &w.vim[i], &t[7], &t[8], &t[9], &t[10], &t[13])
                mpfr_sub(R(w, k + 1 + i, j), R(w, k + 1 + i, j), &t[11], MPFR_RNDN)
                mpfr_sub(I(w, k + 1 + i, j), I(w, k + 1 + i, j), &t[12], MPFR_RNDN)
        mpfr_set(R(w, k + 1, k), &t[4], MPFR_RNDN)
        mpfr_set(I(w, k + 1, k), &t[5], MPFR_RNDN)
        for i in range(k + 2, n):
            mpfr_set_zero(R(w, i, k), 1)
            mpfr_set_zero(I(w, i, k), 1)
        # right: acc = beta * sum h[i][k+1+j] v_j ; h -= acc * conj(v_j)
        for i in range(n):
            mpfr_set_zero(&t[7], 1)
            mpfr_set_zero(&t[8], 1)
            for j in range(m):
                mpfr_mul(&t[9], R(w, i, k + 1 + j), &w.vre[j], MPFR_RNDN)
                mpfr_add(&t[7], &t[7], &t[9], MPFR_RNDN)
                mpfr_mul(&t[9], I(w, i, k + 1 + j), &w.vim[j], MPFR_RNDN)
                mpfr_sub(&t[7], &t[7], &t[9], MPFR_RNDN)
                mpfr_mul(&t[9], R(w, i, k + 1 + j), &w.vim[j], MPFR_RNDN)
                mpfr_add(&t[8], &t[8], &t[9], MPFR_RNDN)
                mpfr_mul(&t[9], I(w, i, k + 1 + j), &w.vre[j], MPFR_RNDN)
                mpfr_add(&t[8], &t[8], &t[9], MPFR_RNDN)
            if mpfr_zero_p(&t[7]) and mpfr_zero_p(&t[8]):
                continue
            mpfr_mul(&t[7], &t[7], &t[6], MPFR_RNDN)
            mpfr_mul(&t[8], &t[8], &t[6], MPFR_RNDN)
            for j in range(m):
                # acc * conj(v) = (ar*vr + ai*vi) + i(ai*vr - ar*vi)
                mpfr_mul(&t[9], &t[8], &w.vim[j], MPFR_RNDN)
                mpfr_mul(&t[10], &t[7], &w.vre[j], MPFR_RNDN)
                mpfr_add(&t[9], &t[9], &t[10], MPFR_RNDN)
                mpfr_mul(&t[10], &t[7], &w.vim[j], MPFR_RNDN)
                mpfr_mul(&t[11], &t[8], &w.vre[j], MPFR_RNDN)
                mpfr_sub(&t[10], &t[11], &t[10], MPFR_RNDN)
                mpfr_sub(R(w, i, k + 1 + j), R(w, i, k + 1 + j), &t[9], MPFR_RNDN)
                mpfr_sub(I(w, i, k + 1 + j), I(w, i, k + 1 + j), &t[10], MPFR_RNDN)


cdef inline void _rot_pair(mpfr_ptr ur, mpfr_ptr ui, mpfr_ptr wr, mpfr_ptr wi,
                           mpfr_srcptr c, mpfr_srcptr sr, mpfr_srcptr si,
                           __mpfr_struct *t) noexcept nogil:
    # u' = c u + s w ; w' = c w - conj(s) u   (t[0..6] scratch)
    cmul(&t[0], &t[1], sr, si, wr, wi, &t[4], &t[5], &t[6])
    mpfr_mul(&t[4], c, ur, MPFR_RNDN)
    mpfr_add(&t[0], &t[0], &t[4], MPFR_RNDN)
    mpfr_mul(&t[4], c, ui, MPFR_RNDN)
    mpfr_add(&t[1], &t[1], &t[4], MPFR_RNDN)
    # conj(s) u = (sr ur + si ui) + i(sr ui - si ur)
    mpfr_mul(&t[4], si, ui, MPFR_RNDN)
    mpfr_mul(&t[2], sr, ur, MPFR_RNDN)
    mpfr_add(&t[2], &t[2], &t[4], MPFR_RNDN)
    mpfr_mul(&t[4], si, ur, MPFR_RNDN)
    mpfr_mul(&t[3], sr, ui, MPFR_RNDN)
    mpfr_sub(&t[3], &t[3], &t[4], MPFR_RNDN)
    mpfr_mul(wr, c, wr, MPFR_RNDN)
    mpfr_sub(wr, wr, &t[2], MPFR_RNDN)
    mpfr_mul(wi, c, wi, MPFR_RNDN)
    mpfr_sub(wi, wi, &t[3], MPFR_RNDN)
    mpfr_swap(ur, &t[0])
    mpfr_swap(ui, &t[1])


cdef void _givens(mpfr_ptr c, mpfr_ptr sr, mpfr_ptr si, mpfr_ptr rr, mpfr_ptr ri,
                  mpfr_srcptr xr, mpfr_srcptr xi, mpfr_srcptr yr, mpfr_srcptr yi,
                  __mpfr_struct *t) noexcept nogil:
    # t[0..3] scratch
    if mpfr_zero_p(yr) and mpfr_zero_p(yi):
        mpfr_set_ui(c, 1, MPFR_RNDN)
        mpfr_set_zero(sr, 1)
        mpfr_set_zero(si, 1)
        mpfr_set(rr, xr, MPFR_RNDN)
        mpfr_set(ri, xi, MPFR_RNDN)
        return
    cabs(&t[0], xr, xi, &t[4])
    if mpfr_zero_p(&t[0]):
        cabs(&t[1], yr, yi, &t[4])
        mpfr_set_zero(c, 1)
        mpfr_div(sr, yr, &t[1], MPFR_RNDN)
        mpfr_div(si, yi, &t[1], MPFR_RNDN)
        mpfr_neg(si, si, MPFR_RNDN)
        mpfr_set(rr, &t[1], MPFR_RNDN)
        mpfr_set_zero(ri, 1)
        return
    cabs(&t[1], yr, yi, &t[4])
    mpfr_sqr(&t[4], &t[0], MPFR_RNDN)               # nu = hypot(|x|, |y|)
    mpfr_sqr(&t[1], &t[1], MPFR_RNDN)
    mpfr_add(&t[1], &t[1], &t[4], MPFR_RNDN)
    mpfr_sqrt(&t[1], &t[1], MPFR_RNDN)
    mpfr_div(&t[2], xr, &t[0], MPFR_RNDN)           # phase
    mpfr_div(&t[3], xi, &t[0], MPFR_RNDN)
    mpfr_div(c, &t[0], &t[1], MPFR_RNDN)
    # s = phase * conj(y) / nu
    mpfr_mul(&t[0], &t[3], yi, MPFR_RNDN)
    mpfr_mul(sr, &t[2], yr, MPFR_RNDN)
    mpfr_add(sr, sr, &t[0], MPFR_RNDN)
    mpfr_mul(&t[0], &t[2], yi, MPFR_RNDN)
    mpfr_mul(si, &t[3], yr, MPFR_RNDN)
    mpfr_sub(si, si, &t[0], MPFR_RNDN)
    mpfr_div(sr, sr, &t[1], MPFR_RNDN)
    mpfr_div(si, si, &t[1], MPFR_RNDN)
    mpfr_mul(rr, &t[2], &t[1], MPFR_RNDN)
    mpfr_mul(ri, &t[3], &t[1], MPFR_RNDN)


cdef void _wilkinson(Mat *w, int hi, mpfr_ptr mr, mpfr_ptr mi) noexcept nogil:
    cdef __mpfr_struct *t = w.t
    # p = (a - d)/2 -> t6,t7 ; bc -> t8,t9 ; disc -> t10,t11
    mpfr_sub(&t[6], R(w, hi - 1, hi - 1), R(w, hi, hi), MPFR_RNDN)
    mpfr_sub(&t[7], I(w, hi - 1, hi - 1), I(w, hi, hi), MPFR_RNDN)
    mpfr_mul_2si(&t[6], &t[6], -1, MPFR_RNDN)
    mpfr_mul_2si(&t[7], &t[7], -1, MPFR_RNDN)
    cmul(&t[8], &t[9], R(w, hi - 1, hi), I(w, hi - 1, hi), R(w, hi, hi - 1), I(w, hi, hi - 1),
         &t[0], &t[1], &t[2])
    cmul(&t[10], &t[11], &t[6], &t[7], &t[6], &t[7], &t[0], &t[1], &t[2])
    mpfr_add(&t[10], &t[10], &t[8], MPFR_RNDN)
    mpfr_add(&t[11], &t[11], &t[9], MPFR_RNDN)
    csqrt(&t[10], &t[11], &t[10], &t[11], &t[0], &t[1])
    # den = p + disc (t12,t13), alt = p - disc (t14,t15)
    mpfr_add(&t[12], &t[6], &t[10], MPFR_RNDN)
    mpfr_add(&t[13], &t[7], &t[11], MPFR_RNDN)
    mpfr_sub(&t[14], &t[6], &t[10], MPFR_RNDN)
    mpfr_sub(&t[15], &t[7], &t[11], MPFR_RNDN)
    cabs(&t[0], &t[12], &t[13], &t[2])
    cabs(&t[1], &t[14], &t[15], &t[2])
    if mpfr_cmp(&t[1], &t[0]) > 0:
        mpfr_swap(&t[12], &t[14])
        mpfr_swap(&t[13], &t[15])
    if mpfr_zero_p(&t[12]) and mpfr_zero_p(&t[13]):
        mpfr_set(mr, R(w, hi, hi), MPFR_RNDN)
        mpfr_set(mi, I(w, hi, hi), MPFR_RNDN)
        return
    cdiv(&t[8], &t[9], &t[8], &t[9], &t[12], &t[13], &t[0], &t[1], &t[2], &t[3])
    mpfr_sub(mr, R(w, hi, hi), &t[8], MPFR_RNDN)
    mpfr_sub(mi, I(w, hi, hi), &t[9], MPFR_RNDN)


cdef void _sweep(Mat *w, int lo, int hi, mpfr_srcptr mr, mpfr_srcptr mi,
                 __mpfr_struct *g) noexcept nogil:
    # g: c, sr, si, rr, ri, xr, xi, yr, yi, nsr, nsi  (11 registers)
    cdef int k, i, j, top
    cdef __mpfr_struct *t = w.t
    mpfr_sub(&g[5], R(w, lo, lo), mr, MPFR_RNDN)
    mpfr_sub(&g[6], I(w, lo, lo), mi, MPFR_RNDN)
    mpfr_set(&g[7], R(w, lo + 1, lo), MPFR_RNDN)
    mpfr_set(&g[8], I(w, lo + 1, lo), MPFR_RNDN)
    for k in range(lo, hi):
        if k > lo:
            mpfr_set(&g[5], R(w, k, k - 1), MPFR_RNDN)
            mpfr_set(&g[6], I(w, k, k - 1), MPFR_RNDN)
            mpfr_set(&g[7], R(w, k + 1, k - 1), MPFR_RNDN)
            mpfr_set(&g[8], I(w, k + 1, k - 1), MPFR_RNDN)
        _givens(&g[0], &g[1], &g[2], &g[3], &g[4], &g[5], &g[6], &g[7], &g[8], t)
        if k > lo:
            mpfr_set(R(w, k, k - 1), &g[3], MPFR_RNDN)
            mpfr_set(I(w, k, k - 1), &g[4], MPFR_RNDN)
            mpfr_set_zero(R(w, k + 1, k - 1), 1)
            mpfr_set_zero(I(w, k + 1, k - 1), 1)
        for j in range(k, hi + 1):
            _rot_pair(R(w, k, j), I(w, k, j), R(w, k + 1, j), I(w, k + 1, j),
                      &g[0], &g[1], &g[2], t)
        # columns use conj(s): u' = c u + conj(s) w ; w' = c w - s u
        mpfr_neg(&g[10], &g[2], MPFR_RNDN)
        top = k + 2 if k + 2 < hi else hi
        for i in range(lo, top + 1):
            _rot_pair(R(w, i, k), I(w, i, k), R(w, i, k + 1), I(w, i, k + 1),
                      &g[0], &g[1], &g[10], t)


cdef int _hqr(Mat *w, int *total) noexcept nogil:
    # Returns -1 on success or the index whose subdiagonal failed to deflate.
    # Deflated eigenvalues stay on the diagonal: later sweeps never touch them.
    cdef int n = w.n
    cdef int hi = n - 1
    cdef int l, its = 0
    cdef int budget = ITERATIONS_PER_EIGENVALUE * n
    cdef __mpfr_struct g[NREG]
    cdef __mpfr_struct *t = w.t
    cdef int q, stuck = -1
    for q in range(NREG):
        mpfr_init2(&g[q], w.prec)
    total[0] = 0
    # eps = 2^(1-prec) in g[11]; shift in (g[12], g[9]), untouched by _sweep
    mpfr_set_ui(&g[11], 1, MPFR_RNDN)
    mpfr_mul_2si(&g[11], &g[11], 1 - w.prec, MPFR_RNDN)
    while hi >= 0:
        l = hi
        while l > 0:
            cabs(&t[0], R(w, l, l - 1), I(w, l, l - 1), &t[3])
            if mpfr_zero_p(&t[0]):
                break
            cabs(&t[1], R(w, l - 1, l - 1), I(w, l - 1, l - 1), &t[3])
            cabs(&t[2], R(w, l, l), I(w, l, l), &t[3])
            mpfr_add(&t[1], &t[1], &t[2], MPFR_RNDN)
            if mpfr_zero_p(&t[1]):
                if l >= 2:
                    cabs(&t[2], R(w, l - 1, l - 2), I(w, l - 1, l - 2), &t[3])
                    mpfr_add(&t[1], &t[1], &t[2], MPFR_RNDN)
                if l + 1 <= hi:
                    cabs(&t[2], R(w, l + 1, l), I(w, l + 1, l), &t[3])
                    mpfr_add(&t[1], &t[1], &t[2], MPFR_RNDN)
            mpfr_mul(&t[1], &t[1], &g[11], MPFR_RNDN)
            if mpfr_cmp(&t[0], &t[1]) <= 0:
                mpfr_set_zero(R(w, l, l - 1), 1)
                mpfr_set_zero(I(w, l, l - 1), 1)
                break
            l -= 1
        if l == hi:
            hi -= 1
            its = 0
            continue
        if total[0] >= budget:
            stuck = hi
            break
        its += 1
        total[0] += 1
        if its % EXCEPTIONAL_EVERY == 0:
            cabs(&t[0], R(w, hi, hi - 1), I(w, hi, hi - 1), &t[3])
            mpfr_set_d(&t[1], 0.75, MPFR_RNDN)
            mpfr_mul(&g[12], &t[0], &t[1], MPFR_RNDN)
            mpfr_add(&g[12], &g[12], R(w, hi, hi), MPFR_RNDN)
            mpfr_set_d(&t[1], 0.4375, MPFR_RNDN)
            mpfr_mul(&g[9], &t[0], &t[1], MPFR_RNDN)
            mpfr_add(&g[9], &g[9], I(w, hi, hi), MPFR_RNDN)
        else:
            _wilkinson(w, hi, &g[12], &g[9])
        _sweep(w, l, hi, &g[12], &g[9], g)
    for q in range(NREG):
        mpfr_clear(&g[q])
    return stuck


def hessenberg(list flat, int n, long prec):
    """Unitary similarity to upper Hessenberg form (Householder)."""
    cdef _Work w = _from_flat(flat, n, prec)
    with nogil:
        _hessenberg(&w.m)
    return _to_flat(w, False)


cdef list _eig(_Work w, bint reduce):
    cdef int stuck, total = 0
    with nogil:
        if reduce:
            _hessenberg(&w.m)
        stuck = _hqr(&w.m, &total)
    if stuck >= 0:
        raise ConvergenceError(stuck, total)
    return _to_flat(w, True)


def hqr_eigvals(list flat, int n, long prec):
    """Eigenvalues of an upper Hessenberg matrix by single-shift complex QR."""
    return _eig(_from_flat(flat, n, prec), False)


def eigvals(list flat, int n, long prec):
    """Hessenberg reduction followed by QR iteration; returns unsorted values."""
    return _eig(_from_flat(flat, n, prec), True)
