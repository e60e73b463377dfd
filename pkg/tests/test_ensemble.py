import math

import numpy as np
import pytest

from lunehbt.ensemble import (
    EnsembleParams,
    FieldFactor,
    fourth_moment,
    sample,
    sample_fields,
    second_moment,
    wick_expectation,
)
from lunehbt.polarization import Frame

# Eq. of the unpolarized circular Gaussian: kappa^2 (d_a'a d_b'b + d_a'b d_b'a),
# frozen for kappa = 1 over all (a', b', a, b) index tuples
FOURTH_MOMENT_TABLE = {
    (0, 0, 0, 0): 2.0, (0, 0, 0, 1): 0.0, (0, 0, 1, 0): 0.0, (0, 0, 1, 1): 0.0,
    (0, 1, 0, 0): 0.0, (0, 1, 0, 1): 1.0, (0, 1, 1, 0): 1.0, (0, 1, 1, 1): 0.0,
    (1, 0, 0, 0): 0.0, (1, 0, 0, 1): 1.0, (1, 0, 1, 0): 1.0, (1, 0, 1, 1): 0.0,
    (1, 1, 0, 0): 0.0, (1, 1, 0, 1): 0.0, (1, 1, 1, 0): 0.0, (1, 1, 1, 1): 2.0,
}


def zband(values: np.ndarray, expected: float) -> float:
    """|z| of the sample mean of `values` against `expected`."""
    n = values.size
    se = values.std(ddof=1) / math.sqrt(n)
    return abs(float(values.mean()) - expected) / se


class TestSampling:
    def test_zero_intensity_scale_gives_zero_fields(self):
        rng = np.random.default_rng(31)
        e1, e2 = sample_fields(EnsembleParams(0.0, 2.0), rng, 100)
        assert np.all(e1 == 0)
        assert np.any(e2 != 0)

    def test_single_sample_frames(self):
        rng = np.random.default_rng(32)
        s = sample(EnsembleParams(1.0, 1.0), rng, frames=(Frame.XY, Frame.YZ))
        assert s.e1.frame is Frame.XY
        assert s.e2.frame is Frame.YZ

    def test_mean_intensity_at_scale(self):
        rng = np.random.default_rng(33)
        n = 10**6
        e1, _ = sample_fields(EnsembleParams(1.0, 1.0), rng, n)
        mean_ix = np.abs(e1[:, 0]) ** 2
        # |E_x|^2 is exponential with mean kappa, so sigma of the mean is 1/sqrt(n)
        assert abs(mean_ix.mean() - 1.0) < 5.0 / math.sqrt(n)

    def test_circularity(self):
        rng = np.random.default_rng(34)
        n = 10**6
        e1, _ = sample_fields(EnsembleParams(1.0, 1.0), rng, n)
        prod = e1[:, 0] * e1[:, 1]
        assert zband(prod.real, 0.0) < 5.0
        assert zband(prod.imag, 0.0) < 5.0
        sq = e1[:, 0] ** 2
        assert zband(sq.real, 0.0) < 5.0
        assert zband(sq.imag, 0.0) < 5.0

    def test_coherency_matrix_is_isotropic(self):
        rng = np.random.default_rng(35)
        n = 2 * 10**5
        params = EnsembleParams(1.3, 0.6)
        fields = dict(zip((1, 2), sample_fields(params, rng, n)))
        for source in (1, 2):
            f = fields[source]
            kappa = params.intensity_scale(source)
            for a in (0, 1):
                for b in (0, 1):
                    prod = f[:, a].conj() * f[:, b]
                    assert zband(prod.real, kappa if a == b else 0.0) < 5.0
                    assert zband(prod.imag, 0.0) < 5.0

    def test_sources_independent(self):
        rng = np.random.default_rng(36)
        n = 2 * 10**5
        e1, e2 = sample_fields(EnsembleParams(1.0, 2.0), rng, n)
        for a in (0, 1):
            for b in (0, 1):
                prod = e1[:, a].conj() * e2[:, b]
                assert zband(prod.real, 0.0) < 5.0
                assert zband(prod.imag, 0.0) < 5.0

    def test_reproducible_for_fixed_seed(self):
        a = sample_fields(EnsembleParams(1.0, 1.0), np.random.default_rng(7), 100)
        b = sample_fields(EnsembleParams(1.0, 1.0), np.random.default_rng(7), 100)
        assert np.array_equal(a[0], b[0])
        assert np.array_equal(a[1], b[1])

    def test_fourth_moment_convergence_rate(self):
        params = EnsembleParams(1.0, 1.0)

        def table_error(n, seed):
            e1, _ = sample_fields(params, np.random.default_rng(seed), n)
            err = 0.0
            for (ap, bp, a, b), expected in FOURTH_MOMENT_TABLE.items():
                est = (e1[:, ap].conj() * e1[:, bp].conj() * e1[:, a] * e1[:, b]).mean()
                err += abs(est - expected)
            return err / len(FOURTH_MOMENT_TABLE)

        ratio = table_error(10**4, seed=37) / table_error(10**6, seed=38)
        assert 5.0 <= ratio <= 20.0


class TestMomentOracles:
    def test_second_moment_diagonal(self):
        params = EnsembleParams(2.0, 3.0)
        assert second_moment(params, 1, 0, 0) == 2.0
        assert second_moment(params, 2, 1, 1) == 3.0

    def test_second_moment_off_diagonal(self):
        params = EnsembleParams(2.0, 3.0)
        assert second_moment(params, 1, 0, 1) == 0.0
        assert second_moment(params, 2, 1, 0) == 0.0

    def test_fourth_moment_table(self):
        params = EnsembleParams(1.0, 1.0)
        for (ap, bp, a, b), expected in FOURTH_MOMENT_TABLE.items():
            assert fourth_moment(params, 1, ap, bp, a, b) == expected

    def test_fourth_moment_scales_with_kappa_squared(self):
        params = EnsembleParams(2.0, 0.5)
        assert fourth_moment(params, 1, 0, 0, 0, 0) == 8.0
        assert fourth_moment(params, 1, 0, 1, 0, 1) == 4.0
        assert fourth_moment(params, 2, 1, 1, 1, 1) == 0.5
        assert fourth_moment(params, 1, 0, 0, 1, 1) == 0.0

    def test_invalid_indices_rejected(self):
        params = EnsembleParams(1.0, 1.0)
        with pytest.raises(ValueError):
            second_moment(params, 3, 0, 0)
        with pytest.raises(ValueError):
            second_moment(params, 1, 2, 0)
        with pytest.raises(ValueError):
            fourth_moment(params, 1, 0, 0, 0, 5)

    def test_negative_scale_rejected(self):
        with pytest.raises(ValueError):
            EnsembleParams(-1.0, 1.0)
        with pytest.raises(ValueError):
            EnsembleParams(1.0, math.nan)


class TestWickExpectation:
    def test_single_pair(self):
        params = EnsembleParams(1.7, 0.4)
        got = wick_expectation(
            [FieldFactor(1, 0, True), FieldFactor(1, 0, False)], params
        )
        assert got == 1.7

    def test_matches_fourth_moment_for_all_tuples(self):
        params = EnsembleParams(1.4, 2.3)
        for source in (1, 2):
            for ap, bp, a, b in np.ndindex(2, 2, 2, 2):
                got = wick_expectation(
                    [
                        FieldFactor(source, ap, True),
                        FieldFactor(source, bp, True),
                        FieldFactor(source, a, False),
                        FieldFactor(source, b, False),
                    ],
                    params,
                )
                assert got == fourth_moment(params, source, ap, bp, a, b)

    def test_odd_order_vanishes(self):
        params = EnsembleParams(1.0, 1.0)
        assert wick_expectation([FieldFactor(1, 0, True)], params) == 0.0
        assert (
            wick_expectation(
                [
                    FieldFactor(1, 0, True),
                    FieldFactor(1, 0, False),
                    FieldFactor(1, 1, False),
                ],
                params,
            )
            == 0.0
        )

    def test_unbalanced_conjugation_vanishes(self):
        params = EnsembleParams(1.0, 1.0)
        got = wick_expectation(
            [
                FieldFactor(1, 0, True),
                FieldFactor(1, 0, True),
                FieldFactor(1, 0, False),
                FieldFactor(2, 0, False),
            ],
            params,
        )
        assert got == 0.0

    def test_cross_source_factorization(self):
        params = EnsembleParams(2.0, 3.0)
        got = wick_expectation(
            [
                FieldFactor(1, 0, True),
                FieldFactor(1, 0, False),
                FieldFactor(2, 1, True),
                FieldFactor(2, 1, False),
            ],
            params,
        )
        assert got == 6.0

    def test_sixth_order_diagonal(self):
        # <|E_x|^6> = 3! kappa^3 for a circular Gaussian component
        params = EnsembleParams(2.0, 1.0)
        factors = [FieldFactor(1, 0, c) for c in (True, True, True, False, False, False)]
        assert wick_expectation(factors, params) == 6 * 2.0**3
