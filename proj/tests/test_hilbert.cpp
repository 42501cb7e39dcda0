#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace cohmeter;
using Catch::Approx;

TEST_CASE("pure_density of a localized state", "[hilbert]") {
    Vector xi = Vector::Zero(2);
    xi(0) = 1.0;
    auto rho = pure_density(ExcitationState(xi));
    CHECK(rho.entry(0, 0) == Complex(1.0, 0.0));
    CHECK(std::abs(rho.entry(0, 1)) == 0.0);
    CHECK(std::abs(rho.entry(1, 1)) == 0.0);
}

TEST_CASE("pure_density of the balanced two-site state", "[hilbert]") {
    Vector xi = Vector::Constant(2, Complex(1.0 / std::sqrt(2.0), 0.0));
    auto rho = pure_density(ExcitationState(xi));
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            CHECK(rho.entry(r, c).real() == Approx(0.5).margin(1e-15));
}

TEST_CASE("pure_density populations of the reference five-site state", "[hilbert]") {
    Vector xi(5);
    xi << std::sqrt(0.1), std::sqrt(0.2), std::sqrt(0.4), std::sqrt(0.2), std::sqrt(0.1);
    auto rho = pure_density(ExcitationState(xi));
    Eigen::VectorXd q = rho.populations();
    CHECK(q(0) == Approx(0.1).margin(1e-14));
    CHECK(q(1) == Approx(0.2).margin(1e-14));
    CHECK(q(2) == Approx(0.4).margin(1e-14));
    CHECK(q(3) == Approx(0.2).margin(1e-14));
    CHECK(q(4) == Approx(0.1).margin(1e-14));
}

TEST_CASE("pure_density is rank one with unit trace", "[hilbert]") {
    SplitMix64 rng(71);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + static_cast<int>(rng.index(6));
        auto rho = pure_density(testsupport::random_state(n, rng));
        CHECK(std::abs(rho.entries().trace().real() - 1.0) < 1e-12);
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries());
        CHECK(es.eigenvalues()(n - 1) == Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("state constructor rejects non-normalized amplitudes", "[hilbert]") {
    Vector xi = Vector::Constant(3, Complex(1.0, 0.0));
    CHECK_THROWS_AS(ExcitationState(xi), NonNormalizedState);
}

TEST_CASE("mix with a single component", "[hilbert]") {
    Vector xi = Vector::Zero(2);
    xi(0) = 1.0;
    auto rho = mix({{1.0, ExcitationState(xi)}});
    CHECK(rho.entry(0, 0).real() == Approx(1.0));
    CHECK(std::abs(rho.entry(1, 1)) < 1e-15);
}

TEST_CASE("mix of orthogonal localized states is diagonal", "[hilbert]") {
    Vector a = Vector::Zero(2), b = Vector::Zero(2);
    a(0) = 1.0;
    b(1) = 1.0;
    auto rho = mix({{0.5, ExcitationState(a)}, {0.5, ExcitationState(b)}});
    CHECK(rho.entry(0, 0).real() == Approx(0.5));
    CHECK(rho.entry(1, 1).real() == Approx(0.5));
    CHECK(std::abs(rho.entry(0, 1)) < 1e-15);
}

TEST_CASE("mix cancels opposite off-diagonal phases", "[hilbert]") {
    Vector plus(2), minus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    auto rho = mix({{0.5, ExcitationState(plus)}, {0.5, ExcitationState(minus)}});
    CHECK(std::abs(rho.entry(0, 1)) < 1e-15);
    CHECK(rho.entry(0, 0).real() == Approx(0.5));
}

TEST_CASE("mix rejects bad probabilities", "[hilbert]") {
    Vector xi = Vector::Zero(2);
    xi(0) = 1.0;
    ExcitationState s(xi);
    CHECK_THROWS_AS(mix({{0.7, s}, {0.4, s}}), NonNormalizedProbabilities);
    CHECK_THROWS_AS(mix({{1.3, s}, {-0.3, s}}), NonNormalizedProbabilities);
}

TEST_CASE("mix eigenvalues stay in the unit interval", "[hilbert]") {
    SplitMix64 rng(401);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + static_cast<int>(rng.index(4));
        auto rho = testsupport::random_density(n, 3, rng);
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries());
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
        CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-10);
    }
}

TEST_CASE("random_k_coherent_pure respects rank and floor", "[hilbert]") {
    for (std::uint64_t seed : {1ull, 2ull, 77ull}) {
        auto s = random_k_coherent_pure(3, 3, seed);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(s.amplitude(i)) >= 0.05);
        CHECK(s.coherence_rank() == 3);
    }
    auto basis = random_k_coherent_pure(3, 1, 5);
    CHECK(basis.coherence_rank() == 1);
    int hits = 0;
    for (int i = 0; i < 3; ++i)
        if (std::abs(basis.amplitude(i)) > 0.999999) ++hits;
    CHECK(hits == 1);
}

TEST_CASE("random_k_coherent_pure is deterministic in the seed", "[hilbert]") {
    auto a = random_k_coherent_pure(6, 4, 1234);
    auto b = random_k_coherent_pure(6, 4, 1234);
    CHECK((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
    auto c = random_k_coherent_pure(6, 4, 1235);
    CHECK((a.amplitudes() - c.amplitudes()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("random_k_coherent_pure rejects bad ranks", "[hilbert]") {
    CHECK_THROWS_AS(random_k_coherent_pure(3, 0, 1), InvalidRank);
    CHECK_THROWS_AS(random_k_coherent_pure(3, 4, 1), InvalidRank);
}

TEST_CASE("ipr basics", "[hilbert]") {
    Vector xi = Vector::Zero(4);
    xi(0) = 1.0;
    CHECK(ipr(pure_density(ExcitationState(xi))) == Approx(1.0));

    Matrix id5 = Matrix::Identity(5, 5) / 5.0;
    CHECK(ipr(density_from_parts(id5)) == Approx(5.0));

    Vector fig(5);
    fig << std::sqrt(0.1), std::sqrt(0.2), std::sqrt(0.4), std::sqrt(0.2), std::sqrt(0.1);
    // 1 / (0.01 + 0.04 + 0.16 + 0.04 + 0.01) = 1 / 0.26
    CHECK(ipr(pure_density(ExcitationState(fig))) == Approx(1.0 / 0.26).margin(1e-12));
}

TEST_CASE("ipr is invariant under permutations of the populations", "[hilbert]") {
    SplitMix64 rng(8);
    Eigen::VectorXd p(4);
    p << 0.4, 0.3, 0.2, 0.1;
    Matrix a = p.cast<Complex>().asDiagonal();
    std::vector<int> perm{2, 0, 3, 1};
    Matrix b = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
        b(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(i)]) = p(i);
    CHECK(ipr(density_from_parts(a)) == Approx(ipr(density_from_parts(b))).margin(1e-14));
}
