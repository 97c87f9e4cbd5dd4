import numpy as np
import pytest
from math import gcd

from dupsff.rmt import psff_cue_tdl
from dupsff.tdl import (
    BOUND_CONSTANT,
    deviation_report,
    gram,
    psff_tdl,
    psff_tdl_deviation,
    t_matrix,
    t_matrix_bruteforce,
    weingarten,
    weingarten_delta,
    weingarten_prime_t,
)


class TestGram:
    def test_unit_diagonal(self):
        for t, d in [(1, 2), (4, 2), (7, 3)]:
            assert np.allclose(np.diag(gram(t, d).entries), 1.0)

    def test_hand_values(self):
        g = gram(4, 2).entries
        assert g[0, 2] == pytest.approx(2.0**-4)   # gcd(2,4) = 2
        assert g[0, 1] == pytest.approx(2.0**-6)   # gcd(1,4) = 1
        assert g[1, 3] == pytest.approx(2.0**-4)

    def test_symmetric_and_bounded(self):
        for d in (2, 3):
            for t in range(2, 13):
                g = gram(t, d).entries
                assert np.allclose(g, g.T)
                off = g[~np.eye(t, dtype=bool)]
                assert np.all(off > 0)
                assert off.max() <= float(d) ** (-t) + 1e-15

    def test_identity_distance_bound(self):
        for d in (2, 3):
            for t in range(1, 41):
                g = gram(t, d).entries
                hs = np.linalg.norm(g - np.eye(t))
                assert hs < t * float(d) ** (-t)


class TestWeingarten:
    def test_single_state(self):
        assert np.allclose(weingarten(1, 2).entries, [[1.0]])

    def test_hand_inverse_t3_d2(self):
        w = weingarten(3, 2).entries
        assert np.allclose(np.diag(w), 136.0 / 135.0, atol=1e-14)
        off = w[~np.eye(3, dtype=bool)]
        assert np.allclose(off, -8.0 / 135.0, atol=1e-14)

    def test_inverse_residual(self):
        for d in (2, 3):
            for t in list(range(1, 30)) + [50, 100]:
                assert weingarten(t, d).residual < 1e-12

    def test_off_diagonal_negative(self):
        for t in (2, 5, 12):
            w = weingarten(t, 2).entries
            assert np.all(w[~np.eye(t, dtype=bool)] <= 0)

    def test_identity_distance_bound(self):
        for d in (2, 3):
            for t in range(1, 41):
                hs = np.linalg.norm(weingarten_delta(t, d))
                assert hs < BOUND_CONSTANT * t * float(d) ** (-t)


class TestWeingartenPrimeT:
    def test_t3_exact_fractions(self):
        w = weingarten_prime_t(3, 2).entries
        assert np.allclose(np.diag(w), (16.0 / 15.0) * (17.0 / 18.0), atol=1e-15)
        assert np.allclose(w[0, 1], -(16.0 / 15.0) / 18.0, atol=1e-15)
        assert np.abs(w - weingarten(3, 2).entries).max() < 1e-14

    def test_matches_numerical_inverse(self):
        for t in (3, 5, 7, 11, 13):
            closed = weingarten_prime_t(t, 2).entries
            numeric = weingarten(t, 2).entries
            assert np.abs(closed - numeric).max() < 1e-13

    def test_inverse_property(self):
        for t in (3, 5, 7):
            w = weingarten_prime_t(t, 2)
            assert w.residual < 1e-13

    def test_rejects_composite_t(self):
        with pytest.raises(ValueError):
            weingarten_prime_t(4, 2)


class TestTMatrix:
    def test_hand_values_t3_l1(self):
        vals = t_matrix(3, 1, 2).values()
        want = np.full((3, 3), 0.25)
        want[0, 0] = 4.0
        assert np.array_equal(vals, want)

    def test_diagonal_beyond_transient(self):
        for d, l, t in [(2, 1, 5), (2, 2, 7), (3, 1, 4)]:
            vals = t_matrix(t, l, d).values()
            D_A = float(d) ** (2 * l)
            assert vals[0, 0] == D_A
            assert np.allclose(np.diag(vals)[1:], 1.0 / D_A)
            assert vals.max() == D_A

    def test_trace_equals_cue(self):
        for l in range(0, 4):
            for t in range(2 * l + 1, 31):
                vals = t_matrix(t, l, 2).values()
                D_A = 2.0 ** (2 * l)
                assert np.trace(vals) == pytest.approx(D_A + (t - 1) / D_A, rel=1e-14)

    def test_rejects_t_not_larger_than_l(self):
        with pytest.raises(ValueError):
            t_matrix(2, 2, 2)

    def test_bruteforce_oracle_exact(self):
        # every entry as an exact integer power of d, t <= 5, l <= 2
        d = 2
        for t in range(1, 6):
            for l in range(0, min(3, t)):
                scaled = t_matrix_bruteforce(t, l, d)
                exps = t_matrix(t, l, d).exponents
                assert np.array_equal(scaled, d ** (exps + 2 * t))

    def test_l_zero_reduces_to_gram(self):
        # with no subsystem the T matrix is the Gram matrix itself
        for t in (2, 3, 6):
            assert np.allclose(t_matrix(t, 0, 2).values(), gram(t, 2).entries)


class TestPsffTdl:
    def test_initial_time_constant(self):
        assert psff_tdl(1, 3, 2) == 64.0
        for t in (1, 2, 3):
            assert psff_tdl(t, 3, 2) == 64.0

    def test_l_zero_gives_sff_ramp(self):
        # trivial subsystem: PSFF = SFF = t exactly in the TDL
        for t in (1, 2, 7, 30):
            assert psff_tdl(t, 0, 2) == pytest.approx(t, rel=1e-12)

    def test_close_to_cue(self):
        dev = psff_tdl(5, 1, 2) - psff_cue_tdl(5, 4)
        assert abs(dev) < BOUND_CONSTANT * 4 * 25 * 2.0**-5

    def test_large_t_matches_cue(self):
        val = psff_tdl(40, 10, 2)
        want = psff_cue_tdl(40, 2**20)
        assert abs(val - want) / want < 1e-8

    def test_deviation_path_consistent(self):
        for t, l in [(3, 1), (5, 2), (12, 3)]:
            direct = psff_tdl(t, l, 2) - psff_cue_tdl(t, 2 ** (2 * l))
            assert psff_tdl_deviation(t, l, 2) == pytest.approx(direct, abs=1e-10)


class TestDeviationReport:
    def test_initial_rows_exact(self):
        rows = deviation_report(10, 3, 2)
        D_A = 64.0
        for row in rows[:3]:
            assert row["K_A"] == pytest.approx(D_A, abs=1e-12)
            assert row["abs_dev"] == pytest.approx((row["t"] - 1) / D_A, abs=1e-15)

    def test_no_violations(self):
        for l, d in [(1, 2), (2, 2), (1, 3)]:
            rows = deviation_report(60, l, d)
            assert not any(r["violated"] for r in rows)

    def test_transient_l10_deviation_much_below_1e5(self):
        # at t = 2l the deviation from CUE is -d^-t (1 + o(1)), far below 1e-5
        dev = psff_tdl_deviation(20, 10, 2)
        assert abs(dev) < 1e-5
        assert dev == pytest.approx(-(2.0**-20), rel=1e-4)

    def test_constancy_extends_to_l_plus_one(self):
        # observed (not proven): K_A stays at D_A one step past t = l
        for l in (1, 2, 3):
            dev = psff_tdl_deviation(l + 1, l, 2)
            D_A = 2.0 ** (2 * l)
            assert psff_cue_tdl(l + 1, D_A) + dev == pytest.approx(D_A, rel=1e-12)
