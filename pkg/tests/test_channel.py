import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uwnetcap import channel
from uwnetcap.channel import (
    ChannelParams,
    absorption_db_per_km,
    absorption_linear,
    an_product,
    an_second_derivative,
    attenuation,
    center_frequency_info,
    noise_psd,
    optimal_center_frequency,
)
from uwnetcap.errors import DomainError

P = ChannelParams()


def grid_argmin(l, params, step=1e-3):
    """1 Hz grid scan of ln(A N) over the whole domain."""
    f = np.arange(params.f_lo, params.f_hi + step / 2, step)
    return f[np.argmin(channel.ln_an_product(l, f, params))]


class TestAbsorption:
    def test_constant_term_dominates_at_1hz(self):
        # frozen from a 30-digit evaluation of the formula
        assert absorption_db_per_km(0.001) == pytest.approx(0.003000121006597, rel=1e-12)

    def test_100khz(self):
        assert absorption_db_per_km(100.0) == pytest.approx(34.06866275996514, rel=1e-12)

    def test_three_orders_of_magnitude(self):
        assert absorption_db_per_km(100.0) / absorption_db_per_km(0.01) >= 1e3

    def test_linear_thousand_near_100khz(self):
        # a(f) = 1000 <=> 30 dB/km
        f = np.linspace(1, 200, 20000)
        f1000 = f[np.argmin(abs(np.asarray(absorption_linear(f)) - 1000.0))]
        assert 80.0 <= f1000 <= 120.0

    def test_low_frequency_limit(self):
        assert absorption_linear(1e-6) == pytest.approx(10**0.0003, rel=1e-9)

    def test_linear_monotone_three_points(self):
        assert absorption_linear(10) < absorption_linear(50) < absorption_linear(100)

    @given(st.floats(1e-4, 1e3), st.floats(1e-4, 1e3))
    def test_db_strictly_increasing(self, f1, f2):
        if f1 == f2:
            return
        lo, hi = sorted((f1, f2))
        assert absorption_db_per_km(lo) < absorption_db_per_km(hi)

    @given(st.floats(1e-6, 1e4))
    def test_linear_at_least_one(self, f):
        assert absorption_linear(f) >= 1.0

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_rejects_nonpositive(self, bad):
        with pytest.raises(DomainError):
            absorption_db_per_km(bad)

    def test_vectorized(self):
        f = np.array([1.0, 10.0, 100.0])
        np.testing.assert_allclose(absorption_db_per_km(f), [absorption_db_per_km(x) for x in f])


class TestAttenuation:
    def test_reference_distance_identity(self):
        assert attenuation(P.l_ref, 1e-6, P) == pytest.approx(1.0, rel=1e-6)

    def test_pure_spreading(self):
        params = ChannelParams(alpha=2.0)
        spreading = attenuation(2 * params.l_ref, 10.0, params) / absorption_linear(10.0) ** (2 * params.l_ref)
        assert spreading == pytest.approx(4.0, rel=1e-12)

    def test_composition(self):
        params = ChannelParams(alpha=1.5)
        expected = 2000.0**1.5 * absorption_linear(100.0) ** 2
        assert attenuation(2.0, 100.0, params) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(582475342594.5598, rel=1e-12)

    @given(st.floats(0.01, 50), st.floats(0.01, 50), st.floats(0.1, 150))
    def test_increasing_in_distance(self, l1, l2, f):
        if l1 == l2:
            return
        lo, hi = sorted((l1, l2))
        assert channel.ln_attenuation(lo, f, P) < channel.ln_attenuation(hi, f, P)

    @given(st.floats(0.01, 50), st.floats(0.1, 150), st.floats(0.1, 150))
    def test_increasing_in_frequency(self, l, f1, f2):
        if f1 == f2:
            return
        lo, hi = sorted((f1, f2))
        assert channel.ln_attenuation(l, lo, P) < channel.ln_attenuation(l, hi, P)

    def test_rejects_nonpositive_distance(self):
        with pytest.raises(DomainError):
            attenuation(0.0, 10.0, P)


class TestNoise:
    def test_value_at_1khz(self):
        # frozen from an independent 30-digit evaluation of the four components
        assert noise_psd(1.0, ChannelParams(shipping=0.5, wind=0.0)) == pytest.approx(34455.81340443776, rel=1e-12)

    def test_increasing_in_shipping(self):
        hi = noise_psd(0.1, ChannelParams(shipping=1.0))
        lo = noise_psd(0.1, ChannelParams(shipping=0.0))
        assert hi > lo
        assert hi == pytest.approx(52106430.06621560, rel=1e-12)
        assert lo == pytest.approx(586521.8371043215, rel=1e-12)

    def test_increasing_in_wind(self):
        assert noise_psd(1.0, ChannelParams(wind=10.0)) > noise_psd(1.0, ChannelParams(wind=0.0))

    def test_positive_over_domain(self):
        f = np.geomspace(P.f_lo, P.f_hi, 2000)
        assert np.all(np.asarray(noise_psd(f, P)) > 0)

    def test_sum_of_linearized_components(self):
        comps = channel.noise_components_db(3.0, P)
        assert noise_psd(3.0, P) == pytest.approx(sum(10 ** (v / 10) for v in comps.values()), rel=1e-13)


class TestParams:
    def test_alpha_below_one_rejected(self):
        with pytest.raises(DomainError):
            ChannelParams(alpha=0.9)

    def test_alpha_outside_usual_range_is_flagged(self):
        assert ChannelParams(alpha=1.5).alpha_in_usual_range
        assert not ChannelParams(alpha=2.5).alpha_in_usual_range

    @pytest.mark.parametrize("kw", [{"shipping": 1.5}, {"wind": -1.0}, {"f_lo": 10.0, "f_hi": 5.0}])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            ChannelParams(**kw)


class TestProductAndCenter:
    def test_product_is_definition(self):
        for l, f in [(1.0, 10.0), (10.0, 3.0), (50.0, 1.0)]:
            assert an_product(l, f, P) == pytest.approx(attenuation(l, f, P) * noise_psd(f, P), rel=1e-12)

    @pytest.mark.parametrize("l", [1.0, 10.0, 100.0])
    def test_unimodal_on_grid(self, l):
        v = np.asarray(channel.ln_an_product(l, np.geomspace(P.f_lo, P.f_hi, 4000), P))
        i = int(np.argmin(v))
        assert np.all(np.diff(v[: i + 1]) < 0)
        assert np.all(np.diff(v[i:]) > 0)

    @pytest.mark.parametrize("l", [1.0, 10.0, 100.0])
    def test_center_is_global_minimum(self, l):
        fc = optimal_center_frequency(l, P)
        f = np.geomspace(P.f_lo, P.f_hi, 5000)
        assert channel.ln_an_product(l, fc, P) <= np.min(channel.ln_an_product(l, f, P)) + 1e-12

    def test_longer_links_lower_center(self):
        assert optimal_center_frequency(10.0, P) > optimal_center_frequency(100.0, P)
        fcs = [optimal_center_frequency(l, P) for l in (1, 5, 10, 50, 100)]
        assert all(a >= b for a, b in zip(fcs, fcs[1:]))

    def test_center_at_100km_matches_1hz_grid(self):
        fc = optimal_center_frequency(100.0, P)
        assert abs(fc - grid_argmin(100.0, P)) <= 1e-3
        # frozen: 1 Hz grid gives 0.816 kHz
        assert fc == pytest.approx(0.8156, abs=1e-3)

    def test_matches_grid_for_random_distances(self):
        rng = np.random.default_rng(2024)
        for l in rng.uniform(0.1, 100.0, 20):
            assert abs(optimal_center_frequency(l, P) - grid_argmin(l, P)) <= 1e-3

    def test_boundary_minimum_is_flagged(self):
        narrow = ChannelParams(f_lo=30.0, f_hi=40.0)
        assert center_frequency_info(100.0, narrow).at_boundary
        assert not center_frequency_info(10.0, P).at_boundary


class TestCurvature:
    @pytest.mark.parametrize("l", [1.0, 10.0, 100.0])
    def test_positive(self, l):
        assert an_second_derivative(l, P) > 0

    @pytest.mark.parametrize("l", [1.0, 10.0, 100.0])
    def test_quadratic_model_near_center(self, l):
        info = center_frequency_info(l, P)
        ups = an_second_derivative(l, P)
        delta = 1e-3 * info.f_c
        for f in (info.f_c - delta, info.f_c + delta):
            model = info.an_min + ups * delta**2 / 2
            assert an_product(l, f, P) == pytest.approx(model, rel=0.01)
            # the rise itself, not only the total, is captured
            rise = an_product(l, f, P) - info.an_min
            assert rise == pytest.approx(ups * delta**2 / 2, rel=0.05)

    @pytest.mark.parametrize("l", [1.0, 10.0, 100.0])
    def test_step_halving_converged(self, l):
        fc = optimal_center_frequency(l, P)
        a = an_second_derivative(l, P, h0=0.02 * fc)
        b = an_second_derivative(l, P, h0=0.01 * fc)
        assert a == pytest.approx(b, rel=1e-4)

    def test_boundary_rejected(self):
        from uwnetcap.errors import NumericalError

        with pytest.raises(NumericalError):
            an_second_derivative(100.0, ChannelParams(f_lo=30.0, f_hi=40.0))
