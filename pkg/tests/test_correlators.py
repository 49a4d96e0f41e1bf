import numpy as np
import pytest

from hbts import channels as ch
from hbts import correlators as co
from hbts import finite_state as fs
from hbts import tensor_core as tc

from conftest import rand_herm


class TestCorrelatorThermo:
    def test_product_tree_has_no_correlations(self, product_lam, sigma_z):
        for m in range(5):
            value = co.correlator_thermo(product_lam, co.CorrelatorQuery(sigma_z, sigma_z, m))
            assert abs(value) < 1e-13

    def test_decay_to_zero_at_huge_distance(self, bundled_lam, sigma_z, sigma_x):
        for obs in (sigma_z, sigma_x):
            value = co.correlator_thermo(bundled_lam, co.CorrelatorQuery(obs, obs, 60))
            assert abs(value) < 1e-12

    def test_matches_deep_finite_levels(self, bundled_lam, sigma_z, diag_top):
        # channel-iterated depth-10 correlators approximate the limit to 1e-6
        for m in range(7):
            thermo_val = co.correlator_thermo(bundled_lam, co.CorrelatorQuery(sigma_z, sigma_z, m))
            level_val = fs.correlator_level(bundled_lam, diag_top, 10, sigma_z, sigma_z, m)
            assert abs(thermo_val - level_val) < 1e-6

    def test_heisenberg_equals_schrodinger(self, bundled_lam):
        rng = np.random.default_rng(21)
        pair = ch.pair_descend_channel(bundled_lam)
        adj = ch.adjoint(pair)
        diff = co.pair_difference_infinity(bundled_lam)
        for m in (0, 1, 3):
            x = rand_herm(rng, 4)
            forward = ch.unvec(np.linalg.matrix_power(pair.matrix, m) @ ch.vec(diff), 4)
            backward = ch.unvec(np.linalg.matrix_power(adj.matrix, m) @ ch.vec(x), 4)
            assert abs(np.trace(x @ forward) - np.trace(diff @ backward)) < 1e-12

    def test_distance_one_equals_prefactor(self, bundled_lam, sigma_z):
        diff = co.pair_difference_infinity(bundled_lam)
        block = np.kron(sigma_z.matrix, sigma_z.matrix)
        direct = complex(np.trace(diff @ block))
        value = co.correlator_thermo(bundled_lam, co.CorrelatorQuery(sigma_z, sigma_z, 0))
        assert abs(value - direct) < 1e-15

    def test_negative_distance_exponent_rejected(self, sigma_z):
        with pytest.raises(ValueError):
            co.CorrelatorQuery(sigma_z, sigma_z, -1)


class TestExponentSpectrum:
    def test_product_tree_spectrum(self, product_lam):
        spec = co.exponent_spectrum(product_lam)
        assert len(spec.entries) == 2
        top, rest = spec.entries
        assert abs(top.kappa - 1.0) < 1e-10 and top.algebraic == 1
        assert abs(rest.kappa - 0.5) < 1e-10 and rest.algebraic == 15
        assert abs(rest.exponent.real + 1.0) < 1e-10
        assert spec.diagonalizable

    def test_bundled_tree_cluster_structure(self, bundled_lam):
        spec = co.exponent_spectrum(bundled_lam)
        got = [(round(abs(e.kappa), 6), e.algebraic, e.geometric) for e in spec.entries]
        assert got == [
            (1.0, 1, 1),
            (round(2 ** -0.5, 6), 2, 2),
            (0.5, 2, 2),
            (round(2 ** -1.5, 6), 2, 2),
            (0.25, 1, 1),
            (0.0, 8, 8),
        ]
        assert spec.diagonalizable
        exps = [e.exponent.real for e in spec.entries if e.exponent is not None]
        assert np.abs(np.array(exps) - np.array([0.0, -0.5, -1.0, -1.5, -2.0])).max() < 1e-10
        assert spec.entries[-1].exponent is None

    def test_unit_disk_and_negative_exponents(self, bundled_lam):
        spec = co.exponent_spectrum(bundled_lam)
        moduli = [abs(e.kappa) for e in spec.entries]
        assert max(moduli) <= 1 + 1e-10
        assert abs(max(moduli) - 1.0) < 1e-10  # unital adjoint always peaks at 1
        for e in spec.entries:
            if e.exponent is not None:
                assert e.exponent.real <= 1e-10
                if abs(e.kappa) < 1 - 1e-10:
                    assert e.exponent.real < 0

    def test_reported_eigenoperators_are_eigenoperators(self, bundled_lam):
        adj = ch.adjoint(ch.pair_descend_channel(bundled_lam))
        spec = co.exponent_spectrum(bundled_lam)
        for entry in spec.entries:
            assert len(entry.eigenoperators) == entry.geometric
            for x in entry.eigenoperators:
                out = ch.apply(adj, x)
                assert np.abs(out - entry.kappa * x).max() < 1e-8 * np.abs(x).max()


class TestPowerlawCheck:
    def test_eigenoperator_with_half_eigenvalue(self, bundled_lam, sigma_x):
        # x (x) x is an exact eigenoperator at eigenvalue 1/2
        series = co.powerlaw_check(bundled_lam, co.CorrelatorQuery(sigma_x, sigma_x))
        assert series.is_eigenoperator
        assert abs(series.kappa - 0.5) < 1e-10
        assert abs(series.fitted_exponent - (-1.0)) < 1e-8
        assert not series.degenerate

    def test_synthetic_injected_eigenoperator(self, bundled_lam):
        spec = co.exponent_spectrum(bundled_lam)
        half = next(e for e in spec.entries if abs(e.kappa - 0.5) < 1e-8)
        series = co.powerlaw_check(bundled_lam, half.eigenoperators[0], range(0, 16))
        assert series.is_eigenoperator and not series.degenerate
        assert abs(series.fitted_exponent - (-1.0)) < 1e-8

    def test_product_tree_series_degenerate(self, product_lam, sigma_z):
        series = co.powerlaw_check(product_lam, co.CorrelatorQuery(sigma_z, sigma_z), range(0, 10))
        assert series.degenerate
        assert series.fitted_exponent is None

    def test_largest_contributing_eigenoperator_ratio(self, bundled_lam):
        # walk eigenoperators by descending |kappa| < 1; the first with a
        # resolvable series must pass the ratio test out to m = 20
        spec = co.exponent_spectrum(bundled_lam)
        checked = False
        for entry in spec.entries:
            if not 1e-6 < abs(entry.kappa) < 1 - 1e-10:
                continue
            series = co.powerlaw_check(bundled_lam, entry.eigenoperators[0], range(0, 21))
            if series.degenerate:
                continue
            values = [v for _, v in series.points]
            for i in range(len(values) - 1):
                assert abs(values[i + 1] / values[i] - entry.kappa) < 1e-8
            checked = True
            break
        assert checked

    def test_general_block_spectral_decomposition(self, bundled_lam, sigma_z):
        # z (x) z is not an eigenoperator; its series is carried by the
        # single eigenvalue 1/4 with weight 4/27
        series = co.powerlaw_check(bundled_lam, co.CorrelatorQuery(sigma_z, sigma_z))
        assert not series.is_eigenoperator and not series.degenerate
        assert not series.log_corrections
        assert series.residual < 1e-12
        assert abs(series.prefactor - 4.0 / 27.0) < 1e-12
        heavy = [(k, c) for k, c in series.decomposition if abs(c) > 1e-10]
        assert len(heavy) == 1
        assert abs(heavy[0][0] - 0.25) < 1e-10
        assert abs(heavy[0][1] - 4.0 / 27.0) < 1e-10
        assert abs(series.fitted_exponent - (-2.0)) < 1e-10

    def test_difference_state_is_traceless(self, bundled_lam):
        assert abs(np.trace(co.pair_difference_infinity(bundled_lam))) < 1e-12

    def test_bad_arguments(self, bundled_lam, sigma_z):
        with pytest.raises(ValueError):
            co.powerlaw_check(bundled_lam, co.CorrelatorQuery(sigma_z, sigma_z), [])
        with pytest.raises(ValueError):
            co.powerlaw_check(bundled_lam, np.eye(2))
