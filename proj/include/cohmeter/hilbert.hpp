// hilbert.hpp — pure states and density matrices on the single-excitation
// subspace spanned by {|Psi_1>, ..., |Psi_n>}.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <numeric>
#include <utility>
#include <vector>

#include "cohmeter/errors.hpp"
#include "cohmeter/rng.hpp"

namespace cohmeter {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Amplitudes at or below this threshold count as exact zeros when computing
// the coherence rank. The rank is used for labeling and preconditions only,
// never inside the measure itself.
inline constexpr double kAmplitudeZero = 1e-9;

inline constexpr double kStateNormTol = 1e-12;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;

// ---------------------------------------------------------------------------
// ExcitationState: unit-norm amplitude vector xi over the n basis states.
// ---------------------------------------------------------------------------
class ExcitationState {
public:
    explicit ExcitationState(Vector amplitudes) : xi_(std::move(amplitudes)) {
        if (xi_.size() < 1) throw InvalidState("state must have at least one amplitude");
        double norm2 = xi_.squaredNorm();
        if (std::abs(norm2 - 1.0) > kStateNormTol)
            throw NonNormalizedState("state norm^2 deviates from 1 by " +
                                     std::to_string(std::abs(norm2 - 1.0)));
    }

    // Normalizes the vector before constructing; rejects near-zero input.
    static ExcitationState normalized(Vector amplitudes) {
        double norm = amplitudes.norm();
        if (norm <= kAmplitudeZero) throw InvalidState("cannot normalize a null vector");
        return ExcitationState(amplitudes / norm);
    }

    int n() const { return static_cast<int>(xi_.size()); }
    const Vector& amplitudes() const { return xi_; }
    Complex amplitude(int i) const { return xi_(i); }

    // Number of amplitudes above the zero threshold.
    int coherence_rank() const {
        int k = 0;
        for (Eigen::Index i = 0; i < xi_.size(); ++i)
            if (std::abs(xi_(i)) > kAmplitudeZero) ++k;
        return k;
    }

private:
    Vector xi_;
};

// ---------------------------------------------------------------------------
// DensityMatrix: Hermitian, unit-trace operator on the subspace.
// ---------------------------------------------------------------------------
class DensityMatrix {
public:
    // Validates Hermiticity and trace. Positivity is checked on demand via
    // min_eigenvalue(); ingestion paths call is_valid().
    static DensityMatrix from_matrix(Matrix m) {
        if (m.rows() != m.cols() || m.rows() < 1)
            throw InvalidState("density matrix must be square and non-empty");
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
            throw InvalidState("density matrix is not Hermitian");
        double tr = m.trace().real();
        if (std::abs(tr - 1.0) > kTraceTol || std::abs(m.trace().imag()) > kTraceTol)
            throw InvalidState("density matrix trace deviates from 1");
        return DensityMatrix(std::move(m));
    }

    int n() const { return static_cast<int>(rho_.rows()); }
    const Matrix& entries() const { return rho_; }
    Complex entry(int i, int j) const { return rho_(i, j); }

    Eigen::VectorXd populations() const { return rho_.diagonal().real(); }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    bool is_valid(double psd_tol = kPsdTol) const { return min_eigenvalue() >= -psd_tol; }

private:
    explicit DensityMatrix(Matrix m) : rho_(std::move(m)) {}
    Matrix rho_;

    friend DensityMatrix density_from_parts(Matrix m);
};

// Internal constructor for callers that guarantee Hermiticity and unit trace
// structurally (outer products, convex mixtures, symmetrized integrator
// output). Still trips on grossly invalid data via the public checks in tests.
inline DensityMatrix density_from_parts(Matrix m) { return DensityMatrix(std::move(m)); }

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Outer product xi xi^dagger of a pure state.
inline DensityMatrix pure_density(const ExcitationState& state) {
    Matrix rho = state.amplitudes() * state.amplitudes().adjoint();
    rho = ((rho + rho.adjoint()) / 2.0).eval();
    return density_from_parts(std::move(rho));
}

// Convex combination sum_j p_j |chi_j><chi_j|.
inline DensityMatrix mix(const std::vector<std::pair<double, ExcitationState>>& components) {
    if (components.empty()) throw InvalidState("mix requires at least one component");
    int n = components.front().second.n();
    double total = 0.0;
    for (const auto& [p, state] : components) {
        if (p < 0.0) throw NonNormalizedProbabilities("negative probability");
        if (state.n() != n) throw DimensionMismatch("mixed states must share dimension");
        total += p;
    }
    if (std::abs(total - 1.0) > kStateNormTol)
        throw NonNormalizedProbabilities("probabilities sum to " + std::to_string(total));
    Matrix rho = Matrix::Zero(n, n);
    for (const auto& [p, state] : components)
        rho += p * (state.amplitudes() * state.amplitudes().adjoint());
    rho = ((rho + rho.adjoint()) / 2.0).eval();
    return density_from_parts(std::move(rho));
}

// Random pure state with exactly k nonzero amplitudes: support uniform over
// k-subsets, amplitudes Haar-uniform on the support, every modulus >= 0.05 by
// rejection. Deterministic in the seed.
inline ExcitationState random_k_coherent_pure(int n, int k, std::uint64_t seed) {
    if (k < 1 || k > n) throw InvalidRank("k must satisfy 1 <= k <= n");
    SplitMix64 gen(SplitMix64::derive(seed, 17));

    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        std::size_t j = static_cast<std::size_t>(i) + gen.index(static_cast<std::size_t>(n - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    std::vector<int> support(idx.begin(), idx.begin() + k);
    std::sort(support.begin(), support.end());

    Vector xi = Vector::Zero(n);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Vector amp(k);
        for (int i = 0; i < k; ++i) amp(i) = gen.complex_gaussian();
        amp /= amp.norm();
        bool ok = true;
        for (int i = 0; i < k; ++i)
            if (std::abs(amp(i)) < 0.05) ok = false;
        if (!ok) continue;
        for (int i = 0; i < k; ++i) xi(support[static_cast<std::size_t>(i)]) = amp(i);
        return ExcitationState::normalized(xi);
    }
    throw NumericalError("rejection sampling failed to produce a k-coherent state");
}

// Inverse participation ratio 1 / sum_i rho_ii^2; 1 for localized states,
// n for the maximally delocalized population distribution.
inline double ipr(const DensityMatrix& rho) {
    double s = rho.populations().squaredNorm();
    return 1.0 / s;
}

}  // namespace cohmeter
