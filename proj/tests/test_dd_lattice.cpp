#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cfisac/dd_lattice.hpp"
#include "cfisac/rng.hpp"

using namespace cfisac;
using namespace cfisac::dd;
using Eigen::MatrixXcd;

namespace {

// Brute-force circulant with first column e_1, by index arithmetic only.
MatrixXcd circulant_shift_oracle(int size) {
    MatrixXcd p = MatrixXcd::Zero(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            if (i == (j + 1) % size) p(i, j) = 1.0;
    return p;
}

double max_abs(const MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

PathDD random_path(Rng& rng, const DDGridSpec& g, int k_max = 2) {
    PathDD p;
    p.ell = static_cast<int>(rng.uniform_int(0, g.m - 1));
    p.k = static_cast<int>(rng.uniform_int(-k_max, k_max));
    do { p.kappa = rng.uniform(-0.5, 0.5); } while (p.kappa == -0.5);
    return p;
}

DDGridSpec random_grid(Rng& rng) {
    const int choices[3] = {2, 4, 8};
    const int m = choices[rng.uniform_int(0, 2)];
    const int n = choices[rng.uniform_int(0, 2)];
    return DDGridSpec::make(m, n, 15e3);
}

}  // namespace

TEST_CASE("permutation matrix") {
    CHECK(max_abs(build_permutation(DDGridSpec::make(1, 1, 15e3)) -
                  MatrixXcd::Identity(1, 1)) == doctest::Approx(0.0));

    MatrixXcd p2 = build_permutation(DDGridSpec::make(2, 1, 15e3));
    CHECK(p2(0, 1).real() == doctest::Approx(1.0));
    CHECK(p2(1, 0).real() == doctest::Approx(1.0));
    CHECK(std::abs(p2(0, 0)) == doctest::Approx(0.0));
    CHECK(std::abs(p2(1, 1)) == doctest::Approx(0.0));

    MatrixXcd p4 = build_permutation(DDGridSpec::make(2, 2, 15e3));
    CHECK(max_abs(p4 - circulant_shift_oracle(4)) < 1e-15);
}

TEST_CASE("delta diagonal") {
    const auto g = DDGridSpec::make(2, 2, 15e3);
    CHECK(max_abs(build_delta(g, 0.0) - MatrixXcd::Identity(4, 4)) < 1e-15);

    MatrixXcd d1 = build_delta(g, 1.0);
    const cxd j(0, 1);
    CHECK(std::abs(d1(0, 0) - cxd(1, 0)) < 1e-14);
    CHECK(std::abs(d1(1, 1) - j) < 1e-14);
    CHECK(std::abs(d1(2, 2) - cxd(-1, 0)) < 1e-14);
    CHECK(std::abs(d1(3, 3) - (-j)) < 1e-14);

    // elementwise exponential oracle for a fractional exponent
    MatrixXcd dh = build_delta(g, 0.5);
    for (int i = 0; i < 4; ++i) {
        const cxd want = std::exp(cxd(0, 2.0 * M_PI * 0.5 * i / 4.0));
        CHECK(std::abs(dh(i, i) - want) < 1e-14);
    }
}

TEST_CASE("build_T identity and dense-product oracle") {
    const auto g = DDGridSpec::make(2, 2, 15e3);
    CHECK(max_abs(build_T(g, {0, 0, 0.0}) - MatrixXcd::Identity(4, 4)) < 1e-12);

    // (M=2,N=2), ell=1: T must equal (F_2 (x) I_2) * Pi * (F_2^H (x) I_2),
    // multiplied out densely here.
    MatrixXcd f2(2, 2);
    f2 << 1, 1, 1, -1;
    f2 /= std::sqrt(2.0);
    MatrixXcd k = MatrixXcd::Zero(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int r = 0; r < 2; ++r) k(a * 2 + r, b * 2 + r) = f2(a, b);
    MatrixXcd want = k * circulant_shift_oracle(4) * k.adjoint();
    CHECK(max_abs(build_T(g, {1, 0, 0.0}) - want) < 1e-12);
}

TEST_CASE("build_T unitarity (100 random paths over small grids)") {
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = random_grid(rng);
        const auto p = random_path(rng, g);
        const MatrixXcd t = build_T(g, p);
        const int mn = g.size();
        CHECK(max_abs(t * t.adjoint() - MatrixXcd::Identity(mn, mn)) <= 1e-10);
    }
    // spec'd spot check at M=N=4
    const auto g = DDGridSpec::make(4, 4, 15e3);
    const auto p = random_path(rng, g);
    const MatrixXcd t = build_T(g, p);
    CHECK(max_abs(t * t.adjoint() - MatrixXcd::Identity(16, 16)) <= 1e-10);
}

TEST_CASE("path bounds errors") {
    const auto g = DDGridSpec::make(4, 4, 15e3);
    CHECK_THROWS_AS(build_T(g, {4, 0, 0.0}), DomainError);
    CHECK_THROWS_AS(build_T(g, {-1, 0, 0.0}), DomainError);
    CHECK_THROWS_AS(build_T(g, {0, 0, 0.5}), DomainError);
}

TEST_CASE("factored operator matches dense") {
    Rng rng(7);
    const auto g = DDGridSpec::make(4, 8, 15e3);
    const auto p = random_path(rng, g);
    const MatrixXcd t = build_T(g, p);
    Eigen::VectorXcd x(g.size());
    for (int i = 0; i < x.size(); ++i) x(i) = rng.cnormal(1.0);
    const DDOperatorFactored fac{g, p};
    CHECK((fac.apply(x) - t * x).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((fac.apply_adjoint(x) - t.adjoint() * x).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("OFDM Q operator") {
    const double t_sym = 1.0 / 15e3;
    CHECK(max_abs(build_q_ofdm(4, 0.0, 0.0, t_sym) - MatrixXcd::Identity(4, 4)) < 1e-14);

    // one-sample delay at nu=0 is the 4x4 cyclic shift
    const double one_sample = t_sym / 4.0;
    CHECK(max_abs(build_q_ofdm(4, one_sample, 0.0, t_sym) - circulant_shift_oracle(4)) < 1e-12);

    // off-grid delay rejected
    CHECK_THROWS_AS(build_q_ofdm(4, 0.4 * one_sample, 0.0, t_sym), OffGridDelay);

    // random on-grid path: Q_bar unitary
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int ell = static_cast<int>(rng.uniform_int(0, 3));
        const double nu = rng.uniform(-2e3, 2e3);
        const MatrixXcd qb = build_q_ofdm_bar(4, ell * one_sample, nu, t_sym);
        CHECK(max_abs(qb * qb.adjoint() - MatrixXcd::Identity(4, 4)) <= 1e-10);
    }
}

TEST_CASE("chi_kappa basics") {
    Rng rng(11);
    const auto g = DDGridSpec::make(4, 4, 15e3);

    SUBCASE("identical operators give (1, 0) for every v") {
        const auto p = random_path(rng, g);
        const MatrixXcd t = build_T(g, p);
        for (int v = 0; v < g.size(); ++v) {
            const auto ck = chi_kappa(t, t, v);
            CHECK(ck.chi == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(ck.kappa == doctest::Approx(0.0).epsilon(1e-9));
        }
    }

    SUBCASE("distinct delay indices give (0, 1) for every v") {
        const MatrixXcd t1 = build_T(g, {1, 0, 0.2});
        const MatrixXcd t2 = build_T(g, {3, -1, -0.3});
        for (int v = 0; v < g.size(); ++v) {
            const auto ck = chi_kappa(t1, t2, v);
            CHECK(ck.chi == doctest::Approx(0.0).epsilon(1e-10));
            CHECK(ck.kappa == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    SUBCASE("same delay, Doppler 0 vs 1, matches dense brute force at v=0") {
        const MatrixXcd t1 = build_T(g, {2, 0, 0.0});
        const MatrixXcd t2 = build_T(g, {2, 1, 0.0});
        const MatrixXcd p = t1 * t2.adjoint();
        const auto ck = chi_kappa(t1, t2, 0);
        CHECK(ck.chi == doctest::Approx(std::norm(p(0, 0))).epsilon(1e-12));
        CHECK(ck.kappa == doctest::Approx(std::norm(p.row(0).sum() - p(0, 0))).epsilon(1e-12));
        // Integer Doppler difference: literal chi+kappa = 1 holds here.
        CHECK(ck.chi + ck.kappa == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("dimension mismatch") {
        const MatrixXcd t1 = build_T(g, {0, 0, 0.0});
        const MatrixXcd t2 = build_T(DDGridSpec::make(2, 2, 15e3), {0, 0, 0.0});
        CHECK_THROWS_AS(chi_kappa(t1, t2, 0), DomainError);
        CHECK_THROWS_AS(chi_kappa(t1, t1, 16), DomainError);
    }
}

TEST_CASE("lemma properties over random path pairs") {
    Rng rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const auto g = random_grid(rng);
        const auto pi = random_path(rng, g);
        auto pj = random_path(rng, g);
        const MatrixXcd ti = build_T(g, pi);
        const MatrixXcd tj = build_T(g, pj);
        const MatrixXcd p = ti * tj.adjoint();
        const int mn = g.size();

        // Zero diagonal when delay indices differ.
        if (pi.ell != pj.ell)
            CHECK(p.diagonal().cwiseAbs().maxCoeff() <= 1e-10);

        for (int v = 0; v < mn; ++v) {
            // Unit row-sum magnitude for ANY pair.
            CHECK(std::abs(std::norm(p.row(v).sum()) - 1.0) <= 1e-9);
            // Unit row power: chi + kappa_pow = 1 exactly (unitarity).
            CHECK(std::abs(p.row(v).squaredNorm() - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("chi+kappa bound for pairs with equal fractional Doppler") {
    // With equal kappas the Doppler-phase difference is an integer and the
    // literal off-diagonal row-sum weight obeys chi + kappa <= 1.
    Rng rng(123);
    for (int trial = 0; trial < 40; ++trial) {
        const auto g = random_grid(rng);
        auto pi = random_path(rng, g);
        auto pj = random_path(rng, g);
        pj.kappa = pi.kappa;
        const MatrixXcd ti = build_T(g, pi);
        const MatrixXcd tj = build_T(g, pj);
        for (int v = 0; v < g.size(); ++v) {
            const auto ck = chi_kappa(ti, tj, v);
            CHECK(ck.chi + ck.kappa <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("structured coefficient table agrees with dense product") {
    Rng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const auto g = random_grid(rng);
        const auto pi = random_path(rng, g);
        const auto pj = random_path(rng, g);
        const auto dense = chi_kappa_table(build_T(g, pi), build_T(g, pj));
        const auto fast = chi_kappa_table(g, pi, pj);
        CHECK((dense.chi - fast.chi).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((dense.kappa_amp - fast.kappa_amp).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((dense.kappa_pow - fast.kappa_pow).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("scaled pair-product accumulation matches dense") {
    Rng rng(5);
    const auto g = DDGridSpec::make(4, 4, 15e3);
    const auto pi = random_path(rng, g);
    const auto pj = random_path(rng, g);
    const cxd scale(0.7, -0.3);
    MatrixXcd z = MatrixXcd::Zero(16, 16);
    add_scaled_pair_product(g, pi, pj, scale, z);
    const MatrixXcd want = scale * (build_T(g, pi) * build_T(g, pj).adjoint());
    CHECK(max_abs(z - want) < 1e-11);

    // core accumulation + one sandwich gives the same result
    MatrixXcd s = MatrixXcd::Zero(16, 16);
    add_scaled_core(g, pi, pj, scale, s);
    CHECK(max_abs(sandwich_core(g, s) - want) < 1e-11);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(DDGridSpec::make(0, 4, 15e3), ConfigError);
    CHECK_THROWS_AS(DDGridSpec::make(4, 0, 15e3), ConfigError);
    DDGridSpec bad{4, 4, 15e3, 1.0 / 14e3, 0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
