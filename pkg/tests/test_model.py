import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from underlay_evt import model
from underlay_evt.model import UNLIMITED, CsiParams, SystemParams
from underlay_evt.specfun import DomainError, integrate

FIG2 = SystemParams(lam=2.0, beta=3.0, m=2.0, eta=20.0, p_m=1.0, t_intf=0.1, p_s=10.0, n_users=40)

R_I_09_01 = 0.33112764013833756  # power_margin(0.9, 0.1), mpmath at 50 digits
B_FIG2_N40 = 470.981011897578  # scale_b at N = 40, mpmath at 50 digits


def unit(**kw):
    base = dict(lam=1.0, beta=1.0, m=1.0, eta=1.0, p_m=1.0, t_intf=1.0)
    base.update(kw)
    return SystemParams(**base)


class TestParams:
    @pytest.mark.parametrize("field", ["lam", "beta", "m", "eta", "p_m", "t_intf"])
    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_positive_fields(self, field, bad):
        with pytest.raises(DomainError):
            FIG2.replace(**{field: bad})

    def test_p_s_accepts_unlimited(self):
        assert FIG2.replace(p_s=UNLIMITED).unlimited
        assert not FIG2.unlimited
        with pytest.raises(DomainError):
            FIG2.replace(p_s=0.0)

    @pytest.mark.parametrize("field,bad", [("n_users", 0), ("n_users", 2.5), ("k_rank", 0)])
    def test_integer_fields(self, field, bad):
        with pytest.raises(DomainError):
            FIG2.replace(**{field: bad})

    @pytest.mark.parametrize(
        "kw",
        [
            {"rho": 1.1},
            {"rho": -0.1},
            {"delta": 2.0},
            {"gamma0": 0.0},
            {"gamma0": 1.0},
            {"eta_hat": 0.0},
            {"beta_hat": -3.0},
        ],
    )
    def test_csi_validation(self, kw):
        base = dict(rho=0.9, delta=1.0, gamma0=0.1, eta_hat=20.0, beta_hat=3.0)
        base.update(kw)
        with pytest.raises(DomainError):
            CsiParams(**base)


class TestSirLaw:
    def test_examples(self):
        assert model.sir_cdf(0.0, FIG2) == 0.0
        assert model.sir_cdf(1.0, unit()) == 0.5

    def test_pdf_normalized(self):
        v, _ = integrate(lambda z: model.sir_pdf(z, FIG2), 0.0, math.inf, points=(1.0, 10.0, 100.0))
        assert v == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("z", [0.1, 1.0, 10.0])
    @pytest.mark.parametrize("m", [0.5, 2.0, 4.5])
    def test_pdf_is_derivative(self, z, m):
        p = FIG2.replace(m=m)
        h = 1e-5 * z
        fd = (model.sir_cdf(z + h, p) - model.sir_cdf(z - h, p)) / (2 * h)
        assert fd == pytest.approx(model.sir_pdf(z, p), rel=1e-6)

    def test_vectorized(self):
        z = np.array([-1.0, 0.0, 1.0, 5.0])
        out = model.sir_cdf(z, FIG2)
        assert out.shape == (4,)
        assert out[0] == 0.0 and out[1] == 0.0
        assert out[3] == model.sir_cdf(5.0, FIG2)


class TestScaleB:
    def test_examples(self):
        assert model.scale_b(unit(n_users=2)) == pytest.approx(1.0, rel=1e-15)
        assert model.scale_b(FIG2) == pytest.approx(B_FIG2_N40, rel=1e-12)

    def test_against_mpmath(self):
        mpmath.mp.dps = 50
        for n in (2, 7, 100, 10**6):
            p = FIG2.replace(n_users=n)
            gap = (1 - mpmath.mpf(1) / n) ** (-1 / mpmath.mpf(p.m)) - 1
            ref = float(p.beta * p.lam / (p.p_m * gap))
            assert model.scale_b(p) == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize("n", [5, 50, 500])
    def test_round_trip(self, n):
        p = FIG2.replace(n_users=n)
        assert model.sir_cdf(model.scale_b(p), p) == pytest.approx(1.0 - 1.0 / n, rel=1e-12)

    def test_degenerate_n(self):
        with pytest.raises(DomainError):
            model.scale_b(FIG2.replace(n_users=1))

    def test_monotonicity(self):
        bs = [model.scale_b(FIG2.replace(n_users=n)) for n in range(2, 300)]
        assert all(b > a for a, b in zip(bs, bs[1:]))
        b0 = model.scale_b(FIG2)
        assert model.scale_b(FIG2.replace(beta=3.1)) > b0
        assert model.scale_b(FIG2.replace(lam=2.1)) > b0
        assert model.scale_b(FIG2.replace(p_m=1.1)) < b0


class TestLimitingLaw:
    def test_examples(self):
        assert model.limiting_cdf(1.0, 1) == pytest.approx(math.exp(-1), abs=1e-15)
        assert model.limiting_cdf(1.0, 2) == pytest.approx(2 * math.exp(-1), abs=1e-15)
        assert model.limiting_quantile(math.exp(-1), 1) == pytest.approx(1.0, rel=1e-10)

    def test_support(self):
        assert model.limiting_cdf(0.0, 3) == 0.0
        assert model.limiting_cdf(-2.0, 3) == 0.0
        assert model.limiting_pdf(0.0, 3) == 0.0
        assert model.limiting_cdf(1e300, 3) == pytest.approx(1.0)

    @given(st.floats(1e-3, 1e3), st.integers(1, 5))
    def test_stochastic_order(self, z, k):
        assert model.limiting_cdf(z, k + 1) >= model.limiting_cdf(z, k)

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_pdf_normalized(self, k):
        v, _ = integrate(lambda z: model.limiting_pdf(z, k), 0.0, math.inf, points=(1.0 / (k + 1), 1.0, 10.0))
        assert v == pytest.approx(1.0, abs=1e-9)

    @settings(max_examples=40)
    @given(st.floats(1e-6, 1 - 1e-6), st.integers(1, 6))
    def test_quantile_round_trip(self, u, k):
        z = model.limiting_quantile(u, k)
        assert model.limiting_cdf(z, k) == pytest.approx(u, abs=1e-10)

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.5])
    def test_quantile_domain(self, u):
        with pytest.raises(DomainError):
            model.limiting_quantile(u, 1)

    def test_sampler_reproducible(self):
        a = model.sample_limiting(1, np.random.default_rng(7), 10)
        b = model.sample_limiting(1, np.random.default_rng(7), 10)
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_sampler_inverse_mean(self, k):
        z = model.sample_limiting(k, np.random.default_rng(11), 200_000)
        inv = 1.0 / z
        se = inv.std(ddof=1) / math.sqrt(inv.size)
        assert abs(inv.mean() - k) < 3 * se

    def test_sampler_ks(self):
        from scipy import stats

        z = model.LimitingDistribution(2).sample(np.random.default_rng(5), 1_000_000)
        d = stats.kstest(z, lambda x: model.limiting_cdf(x, 2)).statistic
        assert d < 0.002

    def test_class_wraps_functions(self):
        dist = model.LimitingDistribution(3)
        assert dist.cdf(2.0) == model.limiting_cdf(2.0, 3)
        assert dist.pdf(2.0) == model.limiting_pdf(2.0, 3)
        with pytest.raises(DomainError):
            model.LimitingDistribution(0)


class TestStPower:
    def test_unlimited_cdf(self):
        p = FIG2.replace(p_s=UNLIMITED)
        x = p.eta * p.t_intf
        assert model.st_power_cdf(x, p) == pytest.approx(math.exp(-1), rel=1e-15)
        assert model.st_power_atom(p) == 0.0

    def test_atom_mass(self):
        assert model.st_power_atom(FIG2) == pytest.approx(1 - math.exp(-0.2), rel=1e-14)
        assert model.st_power_atom(FIG2) == pytest.approx(0.1813, abs=1e-4)

    def test_cdf_jump(self):
        below = model.st_power_cdf(FIG2.p_s * (1 - 1e-12), FIG2)
        assert below == pytest.approx(math.exp(-0.2), rel=1e-9)
        assert model.st_power_cdf(FIG2.p_s, FIG2) == 1.0

    def test_large_t_saturates(self):
        p = FIG2.replace(t_intf=20.0 * FIG2.p_s / FIG2.eta)
        assert model.st_power_atom(p) > 1 - 3e-9
        draws = model.sample_st_power(p, np.random.default_rng(0), 100_000)
        assert np.mean(draws == p.p_s) > 0.9999

    def test_sampler_mean_matches_law(self):
        p = FIG2.replace(p_s=0.5)
        cont, _ = integrate(lambda t: t * model.st_power_pdf(t, p), 0.0, p.p_s)
        mean = cont + p.p_s * model.st_power_atom(p)
        draws = model.sample_st_power(p, np.random.default_rng(1), 400_000)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - mean) < 3 * se

    def test_pdf_plus_atom_is_one(self):
        cont, _ = integrate(lambda t: model.st_power_pdf(t, FIG2), 0.0, FIG2.p_s, points=(0.1,))
        assert cont + model.st_power_atom(FIG2) == pytest.approx(1.0, abs=1e-10)

    def test_never_exceeds_cap(self):
        draws = model.sample_st_power(FIG2, np.random.default_rng(2), 10_000)
        assert np.all(draws <= FIG2.p_s) and np.all(draws > 0)


class TestCsi:
    def test_power_margin_examples(self):
        assert model.power_margin(1.0, 0.1) == 1.0
        assert model.power_margin(0.0, 0.1) == pytest.approx(1.0 / 9.0, rel=1e-12)
        assert model.power_margin(0.9, 0.1) == pytest.approx(R_I_09_01, rel=1e-14)

    @pytest.mark.parametrize("g", [0.01, 0.1, 0.3])
    def test_perfect_csi_is_exactly_one(self, g):
        assert model.power_margin(1.0, g) == 1.0

    @given(st.floats(0.001, 0.999))
    def test_rho_zero_closed_form(self, g):
        assert model.power_margin(0.0, g) == pytest.approx(g / (1 - g), rel=1e-9)

    @given(st.floats(0.01, 0.49))
    def test_increasing_in_rho(self, g):
        r = [model.power_margin(x / 50.0, g) for x in range(51)]
        assert all(b > a for a, b in zip(r, r[1:]))
        assert 0 < r[0] and r[-1] == 1.0

    def test_half_outage_target_is_flat(self):
        # skew term vanishes at gamma0 = 1/2 and r_I = 1 for every rho
        for rho in (0.0, 0.3, 0.9):
            assert model.power_margin(rho, 0.5) == pytest.approx(1.0, rel=1e-14)

    def test_true_eta(self):
        csi = CsiParams(rho=0.9, delta=1.0, gamma0=0.1, eta_hat=20.0, beta_hat=3.0)
        assert csi.true_eta == pytest.approx(1.0 / (0.81 / 20 + 0.19), rel=1e-15)
        assert csi.true_eta == pytest.approx(4.3384, abs=1e-4)

    def test_effective_params_fixed_point(self):
        p = FIG2
        csi = CsiParams(rho=1.0, delta=1.0, gamma0=0.1, eta_hat=p.eta, beta_hat=p.beta)
        assert model.effective_params(p, csi) == p

    def test_effective_params_mapping(self):
        p = FIG2.replace(p_s=UNLIMITED)
        csi = CsiParams(rho=0.9, delta=1.0, gamma0=0.1, eta_hat=20.0, beta_hat=3.0)
        q = model.effective_params(p, csi)
        assert q.eta == 20.0 and q.beta == 3.0
        assert q.t_intf == R_I_09_01 * p.t_intf
        assert model.scale_b(q) == model.scale_b(p.replace(beta=3.0))
