"""Pure-Python Hessenberg reduction and shifted complex QR on ``gmpy2.mpc``.

Matrices travel as flat row-major lists of ``gmpy2.mpc``.  All arithmetic
runs inside a gmpy2 context at the requested precision; contexts are
thread-local, so concurrent calls with different precisions do not interact.
"""
import gmpy2

from ..errors import ConvergenceError

ITERATIONS_PER_EIGENVALUE = 30
EXCEPTIONAL_EVERY = 10
_EXCEPTIONAL_RE = 0.75
_EXCEPTIONAL_IM = 0.4375


def _rows(flat, n):
    return [list(flat[i * n:(i + 1) * n]) for i in range(n)]


def _flat(rows):
    return [z for row in rows for z in row]


def _hessenberg_rows(h, n):
    zero = gmpy2.mpc(0)
    for k in range(n - 2):
        tail = sum((gmpy2.norm(h[i][k]) for i in range(k + 2, n)), gmpy2.mpfr(0))
        if tail == 0:
            continue
        x0 = h[k + 1][k]
        norm = gmpy2.sqrt(tail + gmpy2.norm(x0))
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 != 0 else gmpy2.mpc(1)
        alpha = -phase * norm
        v = [x0 - alpha] + [h[i][k] for i in range(k + 2, n)]
        beta = 2 / sum((gmpy2.norm(z) for z in v), gmpy2.mpfr(0))
        vc = [z.conjugate() for z in v]
        m = len(v)
        # left: rows k+1.., columns k+1.. (column k is set explicitly)
        for j in range(k + 1, n):
            acc = zero
            for i in range(m):
                acc += vc[i] * h[k + 1 + i][j]
            acc *= beta
            if acc != 0:
                for i in range(m):
                    h[k + 1 + i][j] -= v[i] * acc
        h[k + 1][k] = alpha
        for i in range(k + 2, n):
            h[i][k] = zero
        # right: all rows, columns k+1..
        for i in range(n):
            row = h[i]
            acc = zero
            for j in range(m):
                acc += row[k + 1 + j] * v[j]
            acc *= beta
            if acc != 0:
                for j in range(m):
                    row[k + 1 + j] -= acc * vc[j]
    return h


def hessenberg(flat, n, prec):
    """Unitary similarity to upper Hessenberg form (Householder)."""
    with gmpy2.context(precision=prec):
        h = _rows([gmpy2.mpc(z) for z in flat], n)
        return _flat(_hessenberg_rows(h, n))


def _givens(x, y):
    # c real, s complex with [[c, s], [-conj(s), c]] @ [x, y] = [r, 0]
    if y == 0:
        return gmpy2.mpfr(1), gmpy2.mpc(0), x
    ax = abs(x)
    if ax == 0:
        ay = abs(y)
        return gmpy2.mpfr(0), y.conjugate() / ay, gmpy2.mpc(ay)
    nu = gmpy2.hypot(ax, abs(y))
    phase = x / ax
    return ax / nu, phase * y.conjugate() / nu, phase * nu


def _wilkinson(h, hi):
    a = h[hi - 1][hi - 1]
    b = h[hi - 1][hi]
    c = h[hi][hi - 1]
    d = h[hi][hi]
    p = (a - d) / 2
    bc = b * c
    disc = gmpy2.sqrt(p * p + bc)
    den = p + disc
    alt = p - disc
    if abs(alt) > abs(den):
        den = alt
    if den == 0:
        return d
    return d - bc / den


def _qr_sweep(h, lo, hi, mu):
    x = h[lo][lo] - mu
    y = h[lo + 1][lo]
    for k in range(lo, hi):
        if k > lo:
            x = h[k][k - 1]
            y = h[k + 1][k - 1]
        c, s, r = _givens(x, y)
        sc = s.conjugate()
        if k > lo:
            h[k][k - 1] = r
            h[k + 1][k - 1] = gmpy2.mpc(0)
        rk, rk1 = h[k], h[k + 1]
        for j in range(k, hi + 1):
            u, w = rk[j], rk1[j]
            rk[j] = c * u + s * w
            rk1[j] = c * w - sc * u
        for i in range(lo, min(k + 2, hi) + 1):
            row = h[i]
            u, w = row[k], row[k + 1]
            row[k] = c * u + sc * w
            row[k + 1] = c * w - s * u


def _hqr_rows(h, n, prec):
    eps = gmpy2.mpfr(2) ** (1 - prec)
    eig = [None] * n
    budget = ITERATIONS_PER_EIGENVALUE * n
    total = 0
    its = 0
    hi = n - 1
    while hi >= 0:
        l = hi
        while l > 0:
            sub = abs(h[l][l - 1])
            if sub == 0:
                break
            tst = abs(h[l - 1][l - 1]) + abs(h[l][l])
            if tst == 0:
                if l >= 2:
                    tst += abs(h[l - 1][l - 2])
                if l + 1 <= hi:
                    tst += abs(h[l + 1][l])
            if sub <= eps * tst:
                h[l][l - 1] = gmpy2.mpc(0)
                break
            l -= 1
        if l == hi:
            eig[hi] = h[hi][hi]
            hi -= 1
            its = 0
            continue
        if total >= budget:
            raise ConvergenceError(hi, total)
        its += 1
        total += 1
        if its % EXCEPTIONAL_EVERY == 0:
            mu = h[hi][hi] + abs(h[hi][hi - 1]) * gmpy2.mpc(_EXCEPTIONAL_RE, _EXCEPTIONAL_IM)
        else:
            mu = _wilkinson(h, hi)
        _qr_sweep(h, l, hi, mu)
    return eig


def hqr_eigvals(flat, n, prec):
    """Eigenvalues of an upper Hessenberg matrix by single-shift complex QR."""
    with gmpy2.context(precision=prec):
        h = _rows([gmpy2.mpc(z) for z in flat], n)
        return _hqr_rows(h, n, prec)


def eigvals(flat, n, prec):
    """Hessenberg reduction followed by QR iteration; returns unsorted values."""
    with gmpy2.context(precision=prec):
        h = _rows([gmpy2.mpc(z) for z in flat], n)
        _hessenberg_rows(h, n)
        return _hqr_rows(h, n, prec)
