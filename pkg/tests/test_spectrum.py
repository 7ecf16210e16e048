from math import gcd

import gmpy2
import pytest
from hypothesis import given, settings, strategies as st

from toeplitz_spectra import (
    RestrictionError,
    SymbolSpec,
    ValidationError,
    b_restricted,
    compute_params,
    eval_frak_b,
    full_spectrum_f,
    full_spectrum_g,
    machine_eps,
    positive_real_spectrum,
    upper_bound_R,
)
from toeplitz_spectra.spectrum import b_blocks

from conftest import moduli, mp

P = 256
EPS = machine_eps(P)


def _close_lists(got, expected, tol):
    assert len(got) == len(expected)
    for x, y in zip(got, expected):
        assert abs(x - y) <= tol, (x, y)


def test_positive_reals_12_2_4():
    s = positive_real_spectrum(12, 2, 4, P)
    with gmpy2.context(precision=P):
        lo = gmpy2.cbrt(2 - gmpy2.sqrt(3))
        hi = gmpy2.cbrt(2 + gmpy2.sqrt(3))
    _close_lists([z.real for z in s], [lo, lo, hi, hi], 16 * EPS)
    assert all(z.imag == 0 for z in s)


def test_positive_reals_4_1_1():
    s = positive_real_spectrum(4, 1, 1, P)
    with gmpy2.context(precision=P):
        pi = gmpy2.const_pi()
        expected = [2 * gmpy2.cos(2 * pi / 5), 2 * gmpy2.cos(pi / 5)]
    _close_lists([z.real for z in s], expected, 16 * EPS)


def test_positive_reals_empty_when_too_small():
    assert len(positive_real_spectrum(2, 1, 2, P)) == 0
    s = full_spectrum_g(2, 1, 2, P)
    assert list(s) == [0, 0]


def test_full_permutation():
    s = full_spectrum_g(3, 1, 2, P)
    with gmpy2.context(precision=P):
        two_pi = 2 * gmpy2.const_pi()
        expected = [gmpy2.mpc(gmpy2.cos(two_pi * k / 3), gmpy2.sin(two_pi * k / 3)) for k in range(3)]
    _close_lists(list(s), expected, 16 * EPS)


def test_full_13_2_4():
    s = full_spectrum_g(13, 2, 4, P)
    assert s.count_zeros() == 1
    with gmpy2.context(precision=P):
        r3, r13 = gmpy2.sqrt(3), gmpy2.sqrt(13)
        pos = sorted(gmpy2.cbrt(x) for x in (2 - r3, 2 + r3, (5 - r13) / 2, (5 + r13) / 2))
    mods = moduli(s, drop_zeros=True)
    _close_lists(mods, sorted(p for p in pos for _ in range(3)), 64 * EPS)


def test_full_5_1_1():
    s = full_spectrum_g(5, 1, 1, P)
    with gmpy2.context(precision=P):
        r3 = gmpy2.sqrt(3)
        expected = [-r3, gmpy2.mpfr(-1), gmpy2.mpfr(0), gmpy2.mpfr(1), r3]
    _close_lists(sorted(z.real for z in s), expected, 16 * EPS)


def test_full_5_2_4_independent_blocks():
    # char poly x^5 - x^2: three nonzero eigenvalues although n_gamma < sigma_gamma
    s = full_spectrum_g(5, 2, 4, P)
    assert s.count_zeros() == 2
    with gmpy2.context(precision=P):
        for z in s:
            if z != 0:
                assert abs(z ** 3 - 1) < 64 * EPS


@pytest.mark.parametrize("key", ["12,2,4", "13,2,4", "17,2,4", "15,1,2", "16,1,2", "17,1,2",
                                 "10,1,1", "20,3,5", "14,2,5", "9,1,4"])
def test_full_against_mpmath_oracle(oracles, key):
    n, r, s = map(int, key.split(","))
    ref = oracles["spectra_Tng"][key]
    spec = full_spectrum_g(n, r, s, P)
    assert spec.count_zeros() == ref["n_zero"] == compute_params(n, r, s).n_zero
    _close_lists(moduli(spec, drop_zeros=True), [mp(x) for x in ref["nonzero_moduli"]], mp("1e-58"))


def test_f_tridiagonal_shifted():
    s = full_spectrum_f(3, SymbolSpec(1, 1, f0=1, fr=1, fms=1), P)
    with gmpy2.context(precision=P):
        r2 = gmpy2.sqrt(2)
        expected = [1 - r2, gmpy2.mpfr(1), 1 + r2]
    _close_lists(sorted(z.real for z in s), expected, 16 * EPS)


def test_f_scaled_matches_oracle(oracles):
    s = full_spectrum_f(4, SymbolSpec(1, 1, f0=0, fr=4, fms=1), P)
    _close_lists(sorted(z.real for z in s), [mp(x) for x in oracles["tridiag_4_2_1"]], mp("1e-58"))
    s = full_spectrum_f(4, SymbolSpec(1, 1, f0=2, fr=4, fms=1), P)
    _close_lists(sorted(z.real for z in s), [mp(x) for x in oracles["tridiag_shift2_4_1"]], mp("1e-58"))


def test_f_complex_coefficients_match_oracle():
    from toeplitz_spectra import MPMatrix, eigvals
    n, r, s = 15, 2, 3  # no zero eigenvalues, so no defective cluster at f0
    f0, fr, fms = complex(0.5, -1), complex(-2, 1), complex(0, 3)
    spec = full_spectrum_f(n, SymbolSpec(r, s, f0=f0, fr=fr, fms=fms), P)
    rows = [[f0 if i == j else fr if i - j == r else fms if j - i == s else 0 for j in range(n)]
            for i in range(n)]
    ref = eigvals(MPMatrix.from_rows(rows, P))
    with gmpy2.context(precision=P):
        for z in ref:
            assert min(abs(z - w) for w in spec) < 1e-30


def test_f_degenerate():
    s = full_spectrum_f(6, SymbolSpec(-1, 2, f0=7, fr=3, fms=5), P)
    assert list(s) == [7] * 6
    s = full_spectrum_f(4, SymbolSpec(1, 2, f0=7, fr=0, fms=5), P)
    assert list(s) == [7] * 4


def test_f_rejects_bad_order():
    with pytest.raises(ValidationError):
        full_spectrum_f(0, SymbolSpec(1, 2), P)


def test_restriction_propagates():
    assert b_restricted(14, 3, 5)
    with pytest.raises(RestrictionError):
        full_spectrum_g(14, 3, 5, P)


def test_low_precision_rejected():
    with pytest.raises(ValidationError):
        full_spectrum_g(10, 1, 2, 32)


def test_b_blocks_multiplicities():
    blocks = b_blocks(compute_params(17, 2, 4))
    assert [(b.n, b.multiplicity) for b in blocks] == [(8, 1), (9, 1)]
    assert blocks[1].matrix == [[1, 2, 1], [1, 3, 3], [0, 1, 3]]
    assert [(b.n, b.multiplicity) for b in b_blocks(compute_params(12, 2, 4))] == [(6, 2)]
    assert [(b.n, b.multiplicity) for b in b_blocks(compute_params(5, 2, 4))] == [(3, 1)]


def test_parallel_and_serial_agree():
    a = full_spectrum_g(53, 2, 4, P, parallel=True)
    b = full_spectrum_g(53, 2, 4, P, parallel=False)
    assert list(a) == list(b)


def test_upper_bound():
    R = upper_bound_R(1, 2, P)
    with gmpy2.context(precision=P):
        assert abs(R - gmpy2.cbrt(gmpy2.mpfr(27) / 4)) <= 2 * EPS
        assert abs(R ** 3 - gmpy2.mpfr(6.75)) <= 16 * EPS
    assert upper_bound_R(1, 1, P) == 2
    assert upper_bound_R(2, 4, P) == R
    with pytest.raises(ValidationError):
        upper_bound_R(0, 2)


def test_frak_b():
    assert eval_frak_b(1, 2, 0, P) == 6.75
    with gmpy2.context(precision=P):
        half_pi = gmpy2.const_pi() / 2
        assert abs(eval_frak_b(1, 1, half_pi, P) - 2) < 8 * EPS
        assert eval_frak_b(1, 2, 0.7, P) == eval_frak_b(1, 2, -0.7, P)
    with pytest.raises(ValidationError):
        eval_frak_b(2, 4, 0.1)
    with pytest.raises(ValidationError):
        eval_frak_b(1, 2, 3.2)


@pytest.mark.parametrize("r,s", [(1, 2), (3, 5), (5, 7)])
def test_frak_b_monotone_decreasing(r, s):
    with gmpy2.context(precision=P):
        pi = gmpy2.const_pi()
        grid = [pi * k / 1000 for k in range(0, 1000)]
    vals = [eval_frak_b(r, s, t, P) for t in grid]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    with gmpy2.context(precision=P):
        assert abs(vals[0] - upper_bound_R(r, s, P) ** (r + s)) < 1e-70 * vals[0]


def _valid(n, r, s):
    return not b_restricted(n // gcd(r, s) + 1, r // gcd(r, s), s // gcd(r, s)) and \
        not b_restricted(n // gcd(r, s), r // gcd(r, s), s // gcd(r, s))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 90), r=st.integers(1, 6), ds=st.integers(0, 6))
def test_count_bound_and_rotation_laws(n, r, ds):
    s = r + ds
    if not _valid(n, r, s):
        return
    p = compute_params(n, r, s)
    pos = positive_real_spectrum(n, r, s, 128)
    assert len(pos) * p.omega + p.n_zero == n
    eps = machine_eps(128)
    R = upper_bound_R(r, s, 128)
    for z in pos:
        assert 0 < z.real <= R * (1 + 2 ** 16 * eps)
    full = full_spectrum_g(n, r, s, 128)
    with gmpy2.context(precision=128):
        t = 2 * gmpy2.const_pi() / p.omega
        rot = gmpy2.mpc(gmpy2.cos(t), gmpy2.sin(t))
        for z in full:
            w = z * rot
            assert min(abs(w - y) for y in full) <= 2 ** 16 * eps * max(R, 1)
