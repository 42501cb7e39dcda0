// Shared helpers for the test suites: random test-state generators and an
// independent reference implementation of the witness value used to
// cross-check the production evaluation path.

#pragma once

#include <cohmeter/optimizer.hpp>

namespace testsupport {

using namespace cohmeter;

// Haar-like random pure state on the full space (no support constraint).
inline ExcitationState random_state(int n, SplitMix64& rng) {
    Vector xi(n);
    for (int i = 0; i < n; ++i) xi(i) = rng.complex_gaussian();
    return ExcitationState::normalized(xi);
}

// Random mixed state: convex mixture of `terms` random pure states.
inline DensityMatrix random_density(int n, int terms, SplitMix64& rng) {
    std::vector<std::pair<double, ExcitationState>> parts;
    double total = 0.0;
    std::vector<double> ws;
    for (int t = 0; t < terms; ++t) {
        double w = rng.uniform() + 1e-3;
        ws.push_back(w);
        total += w;
    }
    for (int t = 0; t < terms; ++t)
        parts.emplace_back(ws[static_cast<std::size_t>(t)] / total, random_state(n, rng));
    // Exact renormalization of the weights.
    double s = 0.0;
    for (auto& [p, st] : parts) s += p;
    parts.back().first += 1.0 - s;
    return mix(parts);
}

// Random normalized witness parameters.
inline WitnessParams random_params(int n, SplitMix64& rng) {
    Eigen::VectorXd angles(4 * n);
    for (int i = 0; i < 2 * n; ++i) angles(i) = rng.uniform(0.0, 1.5707963267948966);
    for (int i = 2 * n; i < 4 * n; ++i) angles(i) = rng.uniform(0.0, 6.283185307179586);
    return params_from_angles(n, angles);
}

// Reference witness evaluation through the quotient form of the phi states
// (C = prod alpha, component i = C beta_i / alpha_i) and literal pair
// substitution for the exchanged families. Valid when no alpha vanishes;
// entirely independent of the production prefix-product path.
inline Vector quotient_phi1(const WitnessParams& p) {
    Complex c(1.0, 0.0);
    for (int i = 0; i < p.n; ++i) c *= p.alpha(i);
    Vector v(p.n);
    for (int i = 0; i < p.n; ++i) v(i) = c * p.beta(i) / p.alpha(i);
    return v;
}

inline Vector quotient_phi2(const WitnessParams& p) {
    Complex c(1.0, 0.0);
    for (int i = 0; i < p.n; ++i) c *= p.alpha(p.n + i);
    Vector v(p.n);
    for (int i = 0; i < p.n; ++i) v(i) = c * p.beta(p.n + i) / p.alpha(p.n + i);
    return v;
}

inline double reference_tau(const DensityMatrix& rho, const WitnessParams& p, int k) {
    const int n = p.n;
    const Matrix& r = rho.entries();
    Vector phi1 = quotient_phi1(p);
    Vector phi2 = quotient_phi2(p);
    double value = std::abs((phi1.adjoint() * r * phi2)(0, 0));
    double a = prefactor(k, n);
    double penalty = 0.0;
    for (int j = 0; j < n; ++j) {
        WitnessParams q = p;
        q.alpha(j) = p.alpha(n + j);
        q.beta(j) = p.beta(n + j);
        Vector v1 = quotient_phi1(q);
        WitnessParams s = p;
        s.alpha(n + j) = p.alpha(j);
        s.beta(n + j) = p.beta(j);
        Vector v2 = quotient_phi2(s);
        double q1 = std::max(0.0, (v1.adjoint() * r * v1)(0, 0).real());
        double q2 = std::max(0.0, (v2.adjoint() * r * v2)(0, 0).real());
        penalty += std::sqrt(q1 * q2);
    }
    return value - a * penalty;
}

}  // namespace testsupport
