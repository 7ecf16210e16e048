#!/usr/bin/env python3
"""Regenerate ``oracles.json``, the frozen reference values used by the tests.

Deliberately independent of the package: matrices are rebuilt from their
definitions here, characteristic polynomials come from Berkowitz's
division-free algorithm (the package uses Faddeev-LeVerrier), and eigenvalues
and singular values come from mpmath's dense solvers at 1024 bits.

    python tests/data/generate_oracles.py
"""
import json
import os

import mpmath

PREC = 1024
DIGITS = 60
mpmath.mp.prec = PREC


def tng(n, r, s):
    return [[1 if (i - j == r or j - i == s) else 0 for j in range(n)] for i in range(n)]


def berkowitz(a):
    """Characteristic polynomial det(xI - A), ascending coefficients, integers only."""
    n = len(a)
    # vect holds the coefficients (descending) of the char poly of the leading block
    vect = [1, -a[0][0]] if n else [1]
    for k in range(1, n):
        r = [a[i][k] for i in range(k)]          # column above the diagonal
        c = [a[k][j] for j in range(k)]          # row left of the diagonal
        sub = [row[:k] for row in a[:k]]
        # toeplitz column: 1, -a_kk, -c r, -c A r, -c A^2 r, ...
        col = [1, -a[k][k]]
        v = r[:]
        for _ in range(k):
            col.append(-sum(ci * vi for ci, vi in zip(c, v)))
            v = [sum(sub[i][j] * v[j] for j in range(k)) for i in range(k)]
        new = []
        for i in range(k + 2):
            new.append(sum(col[i - j] * vect[j] for j in range(min(i, len(vect) - 1) + 1) if i - j < len(col)))
        vect = new
    return list(reversed(vect))


def mstr(x):
    return mpmath.nstr(x, DIGITS, min_fixed=1, max_fixed=0)


def eig_moduli(a, tol=mpmath.mpf(2) ** -200):
    ev = mpmath.eig(mpmath.matrix(a), left=False, right=False)
    mods = sorted(abs(z) for z in ev)
    return [mstr(m) for m in mods if m > tol], sum(1 for m in mods if m <= tol)


def positive_reals(a, tol=mpmath.mpf(2) ** -200):
    ev = mpmath.eig(mpmath.matrix(a), left=False, right=False)
    return [mstr(x) for x in sorted(z.real for z in ev if z.real > tol and abs(z.imag) < tol)]


def cond2(a):
    sv = mpmath.svd_r(mpmath.matrix(a), compute_uv=False)
    return max(sv) / min(sv)


def main():
    out = {"_generator": "tests/data/generate_oracles.py", "mpmath_prec": PREC, "digits": DIGITS}

    charpolys = {}
    for r, s, ns in [(2, 4, range(5, 18)), (1, 2, range(3, 18)), (1, 1, range(1, 9)),
                     (3, 5, (38, 39)), (2, 5, (14, 15))]:
        for n in ns:
            charpolys[f"{n},{r},{s}"] = [str(c) for c in berkowitz(tng(n, r, s))]
    out["charpoly_Tng"] = charpolys

    spectra = {}
    for n, r, s in [(12, 2, 4), (13, 2, 4), (17, 2, 4), (15, 1, 2), (16, 1, 2), (17, 1, 2),
                    (10, 1, 1), (20, 3, 5), (14, 2, 5), (9, 1, 4)]:
        mods, zeros = eig_moduli(tng(n, r, s))
        spectra[f"{n},{r},{s}"] = {"nonzero_moduli": mods, "n_zero": zeros}
    out["spectra_Tng"] = spectra

    # largest positive real eigenvalue of T_30(g_{1,2}) relative to sigma / (r^(r/sigma) s^(s/sigma))
    pr = positive_reals(tng(30, 1, 2))
    bound = mpmath.mpf(3) / (mpmath.mpf(2) ** (mpmath.mpf(2) / 3))
    out["bound_1_2"] = {"R": mstr(bound), "n": 30, "max_positive_real": pr[-1],
                        "ratio": mstr(mpmath.mpf(pr[-1]) / bound)}

    b231 = [[2937189730080557577, 9536995145808582886, 11892438427558067162],
            [6599805415728025309, 21429433573366650048, 26722066585196691901],
            [5292633011830041853, 17185071439388109015, 21429433573366650048]]
    out["cond_B_231_38_39"] = mstr(cond2(b231))
    b15 = [[1, 2, 1, 0, 0], [1, 3, 3, 1, 0], [0, 1, 3, 3, 1], [0, 0, 1, 3, 3], [0, 0, 0, 1, 3]]
    b16 = [[2, 3, 1, 0, 0], [1, 3, 3, 1, 0], [0, 1, 3, 3, 1], [0, 0, 1, 3, 3], [0, 0, 0, 1, 3]]
    b17 = [[3, 3, 1, 0, 0], [1, 3, 3, 1, 0], [0, 1, 3, 3, 1], [0, 0, 1, 3, 3], [0, 0, 0, 1, 3]]
    out["cond_B_1_2"] = {str(n): mstr(cond2(b)) for n, b in ((15, b15), (16, b16), (17, b17))}

    # T_4 with f0=0, fr=4 (subdiagonal), fms=1 (superdiagonal)
    t4 = [[4 * (i - j == 1) + (j - i == 1) for j in range(4)] for i in range(4)]
    ev = mpmath.eig(mpmath.matrix(t4), left=False, right=False)
    vals = sorted(z.real for z in ev)
    out["tridiag_4_2_1"] = [mstr(x) for x in vals]
    # T_4 with f0=2, fr=4, fms=1
    out["tridiag_shift2_4_1"] = [mstr(x + 2) for x in vals]

    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "oracles.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
