import math
from fractions import Fraction

import numpy as np
import pytest

from rmtlab.laws import (LawError, MomentSequence, SemicircleLaw, bessel_i1,
                         bessel_j1, catalan, find_negativity_witness,
                         gamma_bipartite_printed, gamma_main,
                         gamma_proposition_printed, gamma_uniform,
                         hankel_matrix, hankel_report, mixing_radius,
                         pseudo_char, semicircle_abs_mean, semicircle_cdf,
                         semicircle_density, semicircle_moment,
                         semicircle_stieltjes)
from rmtlab.walks import limit_gamma_walks


def catalan_by_recursion(k):
    # T_k = sum_{i=0}^{k-1} T_i T_{k-1-i}, T_0 = 1
    T = [1]
    for j in range(1, k + 1):
        T.append(sum(T[i] * T[j - 1 - i] for i in range(j)))
    return T[k]


def quad_integral(f, lo, hi):
    from scipy.integrate import quad
    val, _ = quad(f, lo, hi, limit=200)
    return float(val)


class TestCatalan:
    def test_base_cases(self):
        assert catalan(0) == 1
        assert catalan(1) == 1

    def test_k3(self):
        assert catalan(3) == 5

    def test_recursion_matches_closed_form(self):
        for k in range(21):
            assert catalan(k) == catalan_by_recursion(k)


class TestMixingRadius:
    def test_bipartite_zero_intra(self):
        assert mixing_radius(2, 0.0, 1.0) == pytest.approx(math.sqrt(0.5))

    def test_wigner_degeneration(self):
        for m in (2, 3, 7):
            assert mixing_radius(m, 2.25, 2.25) == pytest.approx(1.5)

    def test_direct_substitution(self):
        assert mixing_radius(2, 1 / 3, 1.0) == pytest.approx(math.sqrt(2 / 3))

    def test_rejects_single_part(self):
        with pytest.raises(LawError):
            mixing_radius(1, 0.0, 1.0)


class TestSemicircle:
    def test_cdf_symmetry(self):
        for R in (0.5, 1.0, 3.0):
            assert semicircle_cdf(0.0, R) == pytest.approx(0.5)
            assert semicircle_cdf(-R, R) == 0.0
            assert semicircle_cdf(R, R) == 1.0

    def test_cdf_nondecreasing(self):
        x = np.linspace(-1.5, 1.5, 1001)
        assert np.all(np.diff(semicircle_cdf(x, 1.0)) >= -1e-15)

    def test_density_integrates_to_one(self):
        q = quad_integral(lambda x: semicircle_density(x, 1.0), -1, 1)
        assert q == pytest.approx(1.0, abs=1e-10)

    def test_moments_by_quadrature(self):
        R = 1.3
        for k, expected in ((2, R**2 / 4), (4, R**4 / 8)):
            assert float(semicircle_moment(k, R)) == pytest.approx(expected)
            q = quad_integral(
                lambda x: x**k * semicircle_density(x, R), -R, R)
            assert q == pytest.approx(expected, abs=1e-10)

    def test_abs_mean_by_quadrature(self):
        R = 0.8
        assert semicircle_abs_mean(R) == pytest.approx(4 * R / (3 * math.pi))
        q = quad_integral(
            lambda x: abs(x) * semicircle_density(x, R), -R, R)
        assert q == pytest.approx(semicircle_abs_mean(R), abs=1e-9)

    def test_odd_moments_vanish(self):
        assert semicircle_moment(3, 1.0) == 0
        assert semicircle_moment(7, 2.0) == 0

    def test_law_object(self):
        law = SemicircleLaw(2.0)
        assert law.moment(2) == pytest.approx(1.0)
        assert law.cdf(0.0) == pytest.approx(0.5)
        with pytest.raises(LawError):
            SemicircleLaw(0.0)


class TestSemicircleStieltjes:
    def test_asymptotic_branch(self):
        z = 1e6j
        assert abs(semicircle_stieltjes(z, 1.0) - (-1 / z)) <= 1e-10

    def test_quadrature_oracle(self):
        z = 1j
        x = np.linspace(-1, 1, 4_000_001)
        vals = semicircle_density(x, 1.0) / (x - z)
        q = complex(np.trapezoid(vals.real, x), np.trapezoid(vals.imag, x))
        assert abs(semicircle_stieltjes(z, 1.0) - q) <= 1e-8

    def test_herglotz_grid(self):
        for re in (-2.0, -0.5, 0.0, 0.5, 2.0):
            for im in (0.1, 1.0, 10.0):
                assert semicircle_stieltjes(complex(re, im), 1.0).imag > 0

    def test_rejects_lower_half_plane(self):
        with pytest.raises(LawError):
            semicircle_stieltjes(-1j, 1.0)


class TestGammaSequences:
    def test_gamma_main_odd_is_zero(self):
        assert gamma_main(3, 2, 1.0, 1.0) == 0.0
        assert gamma_main(5, 4, 0.5, 2.0) == 0.0

    def test_gamma_main_wigner_case(self):
        assert float(gamma_main(2, 2, 1.0, 1.0)) == pytest.approx(0.25)

    def test_gamma_main_k4_bipartite(self):
        assert float(gamma_main(4, 2, 0.0, 1.0)) == pytest.approx(1 / 32)

    def test_gamma_main_equals_semicircle_moment(self):
        for k in range(0, 13):
            for (m, s1, s2) in ((2, 0.0, 1.0), (3, 0.5, 2.0), (5, 1.0, 1.0)):
                lhs = float(gamma_main(k, m, s1, s2))
                rhs = float(semicircle_moment(k, mixing_radius(m, s1, s2))) \
                    if k % 2 == 0 else 0.0
                assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)

    def test_gamma_uniform(self):
        assert float(gamma_uniform(2, 1.0)) == pytest.approx(0.25)
        assert float(gamma_uniform(6, 1.0)) == pytest.approx(5 / 64)
        for k in range(0, 11):
            assert float(gamma_uniform(k, 1.7)) == \
                pytest.approx(float(gamma_main(k, 4, 1.7, 1.7)))

    def test_bipartite_printed_values(self):
        assert gamma_bipartite_printed(3, 0.8, 0.2, 1.0) == 0.0
        assert gamma_bipartite_printed(4, 0.8, 0.2, 1.0) == pytest.approx(0.04)
        # the printed k=2 value is nu-independent; the walk oracle is not --
        # archive both, assert only the oracle-vs-printed relationship
        printed = gamma_bipartite_printed(2, 0.8, 0.2, 1.0)
        oracle = float(limit_gamma_walks([Fraction(4, 5), Fraction(1, 5)],
                                         0, 1, 2, zero_intra=True))
        assert printed == pytest.approx(0.25)
        assert oracle == pytest.approx(0.08)
        assert printed != pytest.approx(oracle)

    def test_proposition_printed_gamma2(self):
        assert gamma_proposition_printed(1, 3, 0.8, 0.1) == \
            pytest.approx(0.085)

    def test_proposition_gamma2_algebraic_identity(self):
        # printed form equals (1 - nu1^2 - (m-1) nu2^2)/4
        rng = np.random.default_rng(31)
        for _ in range(20):
            m = int(rng.integers(3, 7))
            nu1 = float(rng.uniform(0.05, 0.95))
            nu2 = (1 - nu1) / (m - 1)
            lhs = gamma_proposition_printed(1, m, nu1, nu2)
            rhs = (1 - nu1**2 - (m - 1) * nu2**2) / 4
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_proposition_vs_walk_oracle(self):
        # gamma_2 and gamma_4 printed forms agree with the exact walk
        # counts; the printed gamma_6 does not (recorded, not asserted)
        m, nu1 = 3, Fraction(4, 5)
        nu2 = (1 - nu1) / (m - 1)
        fracs = [nu1] + [nu2] * (m - 1)
        for j in (1, 2):
            printed = gamma_proposition_printed(j, m, float(nu1), float(nu2))
            oracle = float(limit_gamma_walks(fracs, 0, 1, 2 * j,
                                             zero_intra=True))
            assert printed == pytest.approx(oracle, rel=1e-12)
        printed6 = gamma_proposition_printed(3, m, float(nu1), float(nu2))
        oracle6 = float(limit_gamma_walks(fracs, 0, 1, 6, zero_intra=True))
        assert printed6 != pytest.approx(oracle6)

    def test_constraint_validation(self):
        with pytest.raises(LawError):
            gamma_proposition_printed(1, 3, 0.5, 0.5)
        with pytest.raises(LawError):
            gamma_bipartite_printed(2, 0.8, 0.3, 1.0)


class TestHankel:
    def semicircle_gammas(self, R, L):
        return [float(semicircle_moment(k, R)) for k in range(L + 1)]

    def test_matrix_layout(self):
        g = list(range(1, 8))
        g[0] = 1
        H = hankel_matrix(g, 3)
        assert H.shape == (4, 4)
        assert H[1, 2] == g[3] and H[3, 3] == g[6]

    def test_semicircle_is_psd(self):
        rep = hankel_report(self.semicircle_gammas(1.0, 6), 3)
        assert rep["psd"]

    def test_point_mass_is_psd(self):
        g = [1.0] + [0.0] * 10
        assert hankel_report(g, 5)["psd"]

    def test_gamma_main_sequences_psd(self):
        rng = np.random.default_rng(37)
        for _ in range(10):
            m = int(rng.integers(2, 7))
            s1 = float(rng.uniform(0, 2))
            s2 = float(rng.uniform(0.1, 2))
            g = [float(gamma_main(k, m, s1, s2)) for k in range(11)]
            assert hankel_report(g, 5)["psd"]

    def test_proposition_printed_delta3_sign_recorded(self):
        g = [1.0, 0.0,
             gamma_proposition_printed(1, 3, 0.8, 0.1), 0.0,
             gamma_proposition_printed(2, 3, 0.8, 0.1), 0.0,
             gamma_proposition_printed(3, 3, 0.8, 0.1)]
        rep = hankel_report(g, 3)
        # the published argument needs a negative leading 4x4 determinant
        assert rep["determinants"][3] < 0
        assert not rep["psd"]

    def test_insufficient_moments(self):
        with pytest.raises(LawError):
            hankel_matrix([1.0, 0.0, 0.25], 2)


class TestBessel:
    # 1e-12 references from exact rational partial sums of the defining series
    REFS = {
        1.0: (0.4400505857449335, 0.565159103992485),
        5.0: (-0.32757913759146523, 24.335642142450528),
        10.0: (0.04347274616886144, 2670.9883037012546),
    }

    def test_reference_values(self):
        for t, (j1, i1) in self.REFS.items():
            assert bessel_j1(t) == pytest.approx(j1, abs=1e-12)
            assert bessel_i1(t) == pytest.approx(i1, rel=1e-12)

    def test_leading_term(self):
        assert bessel_j1(1e-8) / 1e-8 == pytest.approx(0.5)

    def test_i1_monotone(self):
        t = np.linspace(0.1, 8.0, 50)
        vals = [bessel_i1(x) for x in t]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestPseudoChar:
    def test_limit_at_zero(self):
        assert pseudo_char(0.0, 0.5, 1.0) == 1.0
        assert pseudo_char(1e-10, 0.5, 1.0) == pytest.approx(1.0, abs=1e-9)

    def test_negativity_witness_exists(self):
        nuhat = math.sqrt(0.3)
        t = find_negativity_witness(nuhat, 1.0, 60.0)
        assert t is not None and t <= 60.0
        assert pseudo_char(t, nuhat, 1.0) < -1.0

    def test_witness_for_nu1_09(self):
        nuhat = (0.9 * 0.1) ** 0.25  # about 0.547
        t = find_negativity_witness(nuhat, 1.0, 60.0)
        assert t is not None

    def test_nuhat_range_enforced(self):
        with pytest.raises(LawError):
            pseudo_char(1.0, 0.8, 1.0)
        with pytest.raises(LawError):
            find_negativity_witness(0.5, 1.0, 1e6)


class TestMomentSequence:
    def test_validation(self):
        with pytest.raises(LawError):
            MomentSequence(values=(0.5, 0.0), provenance="empirical")

    def test_csv_export(self, tmp_path):
        seq = MomentSequence(values=(1.0, 0.0, 0.25), provenance="main_theorem")
        path = tmp_path / "m.csv"
        seq.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "k,gamma,provenance"
        assert lines[3].startswith("2,0.25,")
