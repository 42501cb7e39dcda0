#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace cohmeter;
using Catch::Approx;
using testsupport::random_density;
using testsupport::random_params;
using testsupport::random_state;
using testsupport::reference_tau;

TEST_CASE("prefactor matches the defining cases", "[witness]") {
    CHECK(prefactor(3, 5) == Approx(1.0 / 3.0));
    CHECK(prefactor(2, 5) == Approx(1.0 / 5.0));
    CHECK(prefactor(5, 5) == Approx(1.0));
    CHECK(prefactor(4, 4) == Approx(1.0));
    CHECK(prefactor(2, 2) == Approx(0.5));  // the k = 2 rule wins over 1/(n-k+1)
    CHECK_THROWS_AS(prefactor(1, 5), InvalidRank);
    CHECK_THROWS_AS(prefactor(6, 5), InvalidRank);
}

TEST_CASE("build_phi with all beta zero yields null vectors", "[witness]") {
    WitnessParams p;
    p.n = 3;
    p.alpha = Vector::Constant(6, Complex(1.0, 0.0));
    p.beta = Vector::Zero(6);
    auto phi = build_phi(p);
    CHECK(phi.phi1.norm() == 0.0);
    CHECK(phi.phi2.norm() == 0.0);
    CHECK(phi.phi1_swapped.norm() == 0.0);
}

TEST_CASE("build_phi selects basis vectors from quotient ratios", "[witness]") {
    // beta/alpha ratios (1, 0 | 0, 1) -> phi1 ~ (1,0), phi2 ~ (0,1).
    WitnessParams p;
    p.n = 2;
    p.alpha = Vector::Constant(4, Complex(1.0, 0.0));
    p.beta = Vector::Zero(4);
    p.beta(0) = 1.0;
    p.beta(3) = 1.0;
    p = p.normalized();
    auto phi = build_phi(p);
    CHECK(std::abs(phi.phi1(0)) > 1e-3);
    CHECK(std::abs(phi.phi1(1)) == 0.0);
    CHECK(std::abs(phi.phi2(0)) == 0.0);
    CHECK(std::abs(phi.phi2(1)) > 1e-3);
}

TEST_CASE("identity substitution leaves phi unchanged", "[witness]") {
    SplitMix64 rng(31);
    WitnessParams p = random_params(4, rng);
    for (int j = 0; j < 4; ++j) {
        p.alpha(4 + j) = p.alpha(j);
        p.beta(4 + j) = p.beta(j);
    }
    auto phi = build_phi(p);
    for (int j = 0; j < 4; ++j) {
        CHECK((phi.phi1_swapped.row(j).transpose() - phi.phi1).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((phi.phi2_swapped.row(j).transpose() - phi.phi2).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("build_phi is total at alpha = 0", "[witness]") {
    WitnessParams p;
    p.n = 2;
    p.alpha = Vector::Constant(4, Complex(0.0, 0.0));
    p.beta = Vector::Constant(4, Complex(1.0, 0.0));
    auto phi = build_phi(p);  // no throw; quotient form would be singular here
    CHECK(phi.phi1.norm() == 0.0);

    // Single vanishing alpha: only its component survives.
    WitnessParams q;
    q.n = 3;
    q.alpha = Vector::Constant(6, Complex(1.0, 0.0));
    q.beta = Vector::Constant(6, Complex(1.0, 0.0));
    q.alpha(1) = 0.0;
    auto phiq = build_phi(q);
    CHECK(std::abs(phiq.phi1(0)) == 0.0);
    CHECK(std::abs(phiq.phi1(1)) == 1.0);
    CHECK(std::abs(phiq.phi1(2)) == 0.0);
}

TEST_CASE("production evaluation matches the quotient-form reference", "[witness]") {
    SplitMix64 rng(91);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng.index(5));
        int k = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(n - 1)));
        auto rho = random_density(n, 2, rng);
        auto p = random_params(n, rng);
        double got = evaluate_tau(rho, p, k);
        double want = reference_tau(rho, p, k);
        CHECK(got == Approx(want).margin(1e-12));
    }
}

TEST_CASE("tau vanishes when every beta is zero", "[witness]") {
    SplitMix64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng.index(5));
        auto rho = random_density(n, 2, rng);
        WitnessParams p;
        p.n = n;
        p.alpha = Vector::Constant(2 * n, Complex(1.0, 0.0));
        p.beta = Vector::Zero(2 * n);
        CHECK(evaluate_tau(rho, p, 2) == 0.0);
    }
}

TEST_CASE("localized states never witness coherence", "[witness]") {
    SplitMix64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + static_cast<int>(rng.index(5));
        Vector xi = Vector::Zero(n);
        xi(static_cast<int>(rng.index(static_cast<std::size_t>(n)))) = 1.0;
        auto rho = pure_density(ExcitationState(xi));
        auto p = random_params(n, rng);
        // k = 2: every exchanged term equals the leading term, so tau == 0.
        CHECK(evaluate_tau(rho, p, 2) <= 1e-14);
        CHECK(evaluate_tau(rho, p, 2) >= -1.0);
        if (n > 2) CHECK(evaluate_tau(rho, p, n) <= 1e-14);
    }
}

TEST_CASE("evaluate_tau validates dimensions", "[witness]") {
    SplitMix64 rng(5);
    auto rho = random_density(3, 2, rng);
    auto p = random_params(4, rng);
    CHECK_THROWS_AS(evaluate_tau(rho, p, 2), DimensionMismatch);
}

TEST_CASE("appendix construction on the uniform three-site state", "[witness]") {
    // Hand evaluation: x = 1, beta_{j+3} = 1/sqrt(3) - sqrt(3) = -2/sqrt(3),
    // y = (1 - 3) x = -2, closed form (1 - a_33 * 0) * |x| * |y| = 2.
    int n = 3;
    ExcitationState chi(Vector::Constant(n, Complex(1.0 / std::sqrt(3.0), 0.0)));
    auto aw = appendix_witness_detail(chi, 3);
    CHECK(aw.x.real() == Approx(1.0).margin(1e-14));
    CHECK(aw.x.imag() == Approx(0.0).margin(1e-14));
    CHECK(aw.y.real() == Approx(-2.0).margin(1e-13));
    for (int j = 0; j < 3; ++j)
        CHECK(aw.raw.beta(n + j).real() == Approx(-2.0 / std::sqrt(3.0)).margin(1e-14));
    CHECK(aw.closed_form == Approx(2.0).margin(1e-13));

    auto rho = pure_density(chi);
    // Raw (un-normalized) parameters reproduce the closed form exactly.
    CHECK(evaluate_tau(rho, aw.raw, 3) == Approx(2.0).margin(1e-12));
    // Normalization divides by the recorded scale.
    CHECK(evaluate_tau(rho, aw.params, 3) == Approx(2.0 / aw.scale).margin(1e-12));
    CHECK(aw.scale == Approx(std::pow(4.0 / 3.0, 1.5) * std::pow(7.0 / 3.0, 1.5)).margin(1e-12));
}

TEST_CASE("appendix closed form matches the raw evaluation", "[witness]") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng.index(5));
        int rank = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(n - 1)));
        int k = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(rank - 1)));
        auto s = random_k_coherent_pure(n, rank, rng.next());
        auto aw = appendix_witness_detail(s, k);
        double raw = evaluate_tau(pure_density(s), aw.raw, k);
        CHECK(raw == Approx(aw.closed_form).margin(1e-10));
        CHECK(aw.y == Approx(Complex(1.0 - k, 0.0).real() * aw.x.real()).margin(1e-12));
    }
}

TEST_CASE("appendix witness certifies every k-coherent pure state", "[witness]") {
    SplitMix64 rng(7777);
    for (int n = 2; n <= 6; ++n) {
        for (int k = 2; k <= n; ++k) {
            for (int trial = 0; trial < 100; ++trial) {
                auto s = random_k_coherent_pure(n, k, rng.next());
                auto p = appendix_witness(s, k);
                CHECK(p.is_normalized());
                double tau = evaluate_tau(pure_density(s), p, k);
                CHECK(tau >= 1e-6);
            }
        }
    }
}

TEST_CASE("appendix witness rejects low-rank states", "[witness]") {
    Vector xi = Vector::Zero(4);
    xi(1) = 1.0;
    CHECK_THROWS_AS(appendix_witness(ExcitationState(xi), 2), RankTooLow);
    Vector two = Vector::Zero(4);
    two(0) = two(3) = 1.0 / std::sqrt(2.0);
    CHECK_THROWS_AS(appendix_witness(ExcitationState(two), 3), RankTooLow);
    CHECK_NOTHROW(appendix_witness(ExcitationState(two), 2));
    CHECK_THROWS_AS(appendix_witness(ExcitationState(two), 1), InvalidRank);
}

TEST_CASE("states below rank k never evaluate positive", "[witness]") {
    SplitMix64 rng(31337);
    for (int n = 2; n <= 6; ++n) {
        for (int k = 2; k <= n; ++k) {
            for (int trial = 0; trial < 1000; ++trial) {
                int rank = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(k - 1)));
                auto s = random_k_coherent_pure(n, rank, rng.next());
                auto p = random_params(n, rng);
                CHECK(evaluate_tau(pure_density(s), p, k) <= 1e-10);
            }
        }
    }
}

TEST_CASE("tau is convex in the state", "[witness]") {
    SplitMix64 rng(606);
    for (int trial = 0; trial < 500; ++trial) {
        int n = 2 + static_cast<int>(rng.index(4));
        int k = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(n - 1)));
        auto rho1 = random_density(n, 2, rng);
        auto rho2 = random_density(n, 2, rng);
        double p = rng.uniform();
        auto blend = density_from_parts(
            (p * rho1.entries() + (1.0 - p) * rho2.entries()).eval());
        auto w = random_params(n, rng);
        double lhs = evaluate_tau(blend, w, k);
        double rhs = p * evaluate_tau(rho1, w, k) + (1.0 - p) * evaluate_tau(rho2, w, k);
        CHECK(lhs <= rhs + 1e-9);
    }
}

TEST_CASE("tau is invariant under matched diagonal phase rotations", "[witness]") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng.index(4));
        int k = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(n - 1)));
        auto rho = random_density(n, 2, rng);
        auto p = random_params(n, rng);

        Vector phases(n);
        for (int i = 0; i < n; ++i) {
            double t = rng.uniform(0.0, 6.283185307179586);
            phases(i) = Complex(std::cos(t), std::sin(t));
        }
        Matrix d = phases.asDiagonal();
        auto rotated = density_from_parts((d * rho.entries() * d.adjoint()).eval());

        WitnessParams q = p;
        for (int i = 0; i < n; ++i) {
            q.beta(i) = p.beta(i) * phases(i);
            q.beta(n + i) = p.beta(n + i) * phases(i);
        }
        CHECK(evaluate_tau(rotated, q, k) ==
              Approx(evaluate_tau(rho, p, k)).margin(1e-12));
    }
}

TEST_CASE("tau is invariant under per-pair global phases", "[witness]") {
    SplitMix64 rng(107);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng.index(4));
        int k = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(n - 1)));
        auto rho = random_density(n, 2, rng);
        auto p = random_params(n, rng);
        WitnessParams q = p;
        for (int i = 0; i < 2 * n; ++i) {
            double t = rng.uniform(0.0, 6.283185307179586);
            Complex ph(std::cos(t), std::sin(t));
            q.alpha(i) = p.alpha(i) * ph;
            q.beta(i) = p.beta(i) * ph;
        }
        CHECK(evaluate_tau(rho, q, k) == Approx(evaluate_tau(rho, p, k)).margin(1e-12));
    }
}

TEST_CASE("appendix witness on alternate supports stays a valid certificate", "[witness]") {
    SplitMix64 rng(515);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 4 + static_cast<int>(rng.index(2));
        auto s = random_k_coherent_pure(n, n, rng.next());
        int k = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(n - 2)));
        std::vector<int> support;
        for (int i = 0; i < n; ++i) support.push_back(i);
        for (int i = 0; i < k; ++i)
            std::swap(support[static_cast<std::size_t>(i)],
                      support[i + rng.index(static_cast<std::size_t>(n - i))]);
        support.resize(static_cast<std::size_t>(k));
        auto aw = appendix_witness_on_support(s, k, support);
        double raw = evaluate_tau(pure_density(s), aw.raw, k);
        CHECK(raw == Approx(aw.closed_form).margin(1e-10));
        CHECK(raw > 0.0);
    }
}
