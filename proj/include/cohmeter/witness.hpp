// witness.hpp — the tau_kn witness family.
//
// A witness is parametrized by 2n complex pairs (alpha_i, beta_i). Pairs
// [0, n) build |phi1>, pairs [n, 2n) build |phi2>. The value
//
//   tau = |<phi1|rho|phi2>| - a_kn * sum_j sqrt(<phi1_j|rho|phi1_j> <phi2_j|rho|phi2_j>)
//
// is positive for some parametrization exactly when rho is at least
// k-coherent; phi1_j / phi2_j denote the families with pair j exchanged
// against pair j+n and vice versa.
//
// Components are evaluated in the pole-free product form
//   phi1_i = beta_i * prod_{m != i} alpha_m
// which agrees with the quotient form C_1 beta_i / alpha_i wherever the
// latter is defined and extends it continuously to alpha_i = 0.

#pragma once

#include <cmath>
#include <vector>

#include "cohmeter/hilbert.hpp"

namespace cohmeter {

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------
struct WitnessParams {
    int n = 0;
    Vector alpha;  // size 2n
    Vector beta;   // size 2n

    bool is_normalized(double tol = 1e-12) const {
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            double s = std::norm(alpha(i)) + std::norm(beta(i));
            if (std::abs(s - 1.0) > tol) return false;
        }
        return true;
    }

    // Rescales every pair to |alpha|^2 + |beta|^2 = 1. tau is homogeneous in
    // the pair scales, so this only divides its value by the returned factor
    // (the product of all pair norms); in particular the sign is preserved.
    WitnessParams normalized(double* scale_out = nullptr) const {
        WitnessParams out;
        out.n = n;
        out.alpha = alpha;
        out.beta = beta;
        double scale = 1.0;
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            double s = std::sqrt(std::norm(alpha(i)) + std::norm(beta(i)));
            if (s > 0.0) {
                out.alpha(i) /= s;
                out.beta(i) /= s;
                scale *= s;
            }
        }
        if (scale_out != nullptr) *scale_out = scale;
        return out;
    }
};

struct PhiStates {
    Vector phi1;          // n
    Vector phi2;          // n
    Matrix phi1_swapped;  // n x n, row j = |phi1^(j)>
    Matrix phi2_swapped;  // n x n, row j = |phi2^(j)>
};

// ---------------------------------------------------------------------------
// Prefactor a_kn
// ---------------------------------------------------------------------------
inline double prefactor(int k, int n) {
    if (k < 2 || k > n) throw InvalidRank("prefactor requires 2 <= k <= n");
    if (k == 2) return 1.0 / static_cast<double>(n);
    return 1.0 / static_cast<double>(n - k + 1);
}

namespace detail {

// In-place builder reused by the optimizer's hot loop. Scratch buffers are
// allocated once per evaluator.
struct PhiWorkspace {
    Vector pref1, suf1, pref2, suf2;  // exclusive prefix/suffix products
    Vector row_pref, row_suf;

    void resize(int n) {
        pref1.resize(n);
        suf1.resize(n);
        pref2.resize(n);
        suf2.resize(n);
        row_pref.resize(n);
        row_suf.resize(n);
    }
};

// Exclusive prefix/suffix products of a[offset .. offset+n).
inline void exclusive_products(const Vector& a, int offset, int n, Vector& pref, Vector& suf) {
    Complex acc(1.0, 0.0);
    for (int i = 0; i < n; ++i) {
        pref(i) = acc;
        acc *= a(offset + i);
    }
    acc = Complex(1.0, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        suf(i) = acc;
        acc *= a(offset + i);
    }
}

inline void build_phi_into(const WitnessParams& p, PhiStates& out, PhiWorkspace& ws) {
    const int n = p.n;
    ws.resize(n);
    out.phi1.resize(n);
    out.phi2.resize(n);
    out.phi1_swapped.resize(n, n);
    out.phi2_swapped.resize(n, n);

    exclusive_products(p.alpha, 0, n, ws.pref1, ws.suf1);
    exclusive_products(p.alpha, n, n, ws.pref2, ws.suf2);
    for (int i = 0; i < n; ++i) {
        out.phi1(i) = p.beta(i) * ws.pref1(i) * ws.suf1(i);
        out.phi2(i) = p.beta(n + i) * ws.pref2(i) * ws.suf2(i);
    }

    // Row j of phi1_swapped applies the substitution (alpha_j, beta_j) ->
    // (alpha_{j+n}, beta_{j+n}); phi2_swapped applies the inverse exchange.
    for (int j = 0; j < n; ++j) {
        // Products over m != i with index j excluded as well.
        Complex acc(1.0, 0.0);
        for (int i = 0; i < n; ++i) {
            ws.row_pref(i) = acc;
            if (i != j) acc *= p.alpha(i);
        }
        acc = Complex(1.0, 0.0);
        for (int i = n - 1; i >= 0; --i) {
            ws.row_suf(i) = acc;
            if (i != j) acc *= p.alpha(i);
        }
        for (int i = 0; i < n; ++i) {
            if (i == j)
                out.phi1_swapped(j, i) = p.beta(n + j) * ws.pref1(j) * ws.suf1(j);
            else
                out.phi1_swapped(j, i) = p.beta(i) * p.alpha(n + j) * ws.row_pref(i) * ws.row_suf(i);
        }

        acc = Complex(1.0, 0.0);
        for (int i = 0; i < n; ++i) {
            ws.row_pref(i) = acc;
            if (i != j) acc *= p.alpha(n + i);
        }
        acc = Complex(1.0, 0.0);
        for (int i = n - 1; i >= 0; --i) {
            ws.row_suf(i) = acc;
            if (i != j) acc *= p.alpha(n + i);
        }
        for (int i = 0; i < n; ++i) {
            if (i == j)
                out.phi2_swapped(j, i) = p.beta(j) * ws.pref2(j) * ws.suf2(j);
            else
                out.phi2_swapped(j, i) = p.beta(n + i) * p.alpha(j) * ws.row_pref(i) * ws.row_suf(i);
        }
    }
}

}  // namespace detail

inline PhiStates build_phi(const WitnessParams& p) {
    if (p.alpha.size() != 2 * p.n || p.beta.size() != 2 * p.n)
        throw DimensionMismatch("witness params need 2n pairs");
    PhiStates out;
    detail::PhiWorkspace ws;
    detail::build_phi_into(p, out, ws);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// Allocation-free repeated evaluation against a fixed state and rank.
class TauEvaluator {
public:
    TauEvaluator(const DensityMatrix& rho, int k)
        : rho_(rho.entries()), n_(rho.n()), a_kn_(prefactor(k, rho.n())) {
        tmp_.resize(n_);
    }

    int n() const { return n_; }

    double value(const WitnessParams& p) {
        if (p.n != n_) throw DimensionMismatch("witness params dimension mismatch");
        detail::build_phi_into(p, phi_, ws_);

        tmp_.noalias() = rho_ * phi_.phi2;
        const Complex overlap = phi_.phi1.dot(tmp_);
        double total = std::abs(overlap);

        double penalty = 0.0;
        for (int j = 0; j < n_; ++j) {
            double q1 = quad_form(phi_.phi1_swapped, j);
            double q2 = quad_form(phi_.phi2_swapped, j);
            penalty += std::sqrt(q1 * q2);
        }
        return total - a_kn_ * penalty;
    }

private:
    // <v|rho|v> for row j; clamped at zero from below to absorb float noise.
    double quad_form(const Matrix& rows, int j) {
        Complex acc(0.0, 0.0);
        for (int c = 0; c < n_; ++c) {
            Complex rv(0.0, 0.0);
            for (int m = 0; m < n_; ++m) rv += rho_(c, m) * rows(j, m);
            acc += std::conj(rows(j, c)) * rv;
        }
        double q = acc.real();
        return q > 0.0 ? q : 0.0;
    }

    Matrix rho_;
    int n_;
    double a_kn_;
    PhiStates phi_;
    detail::PhiWorkspace ws_;
    Vector tmp_;
};

inline double evaluate_tau(const DensityMatrix& rho, const WitnessParams& p, int k) {
    TauEvaluator ev(rho, k);
    return ev.value(p);
}

// ---------------------------------------------------------------------------
// Analytic witness construction for k-coherent pure states
// ---------------------------------------------------------------------------

struct AppendixWitness {
    WitnessParams raw;         // alpha_i = 1 everywhere, un-normalized
    WitnessParams params;      // pairwise-normalized form of `raw`
    double scale = 1.0;        // product of pair norms; tau(raw) = scale * tau(params)
    Complex x{0.0, 0.0};       // sum_j beta_j xi_j^*
    Complex y{0.0, 0.0};       // sum_j beta_{j+n} xi_j^*, equals (1-k) x
    double closed_form = 0.0;  // (1 - a_kn (n-k)) |x| |y| = tau at the raw pairs
    std::vector<int> support;  // the k amplitude indices used
};

// Core of the construction on an explicit support: with all alpha = 1,
// choose beta_j = xi_j on the support and beta_{j+n} = beta_j - x/conj(xi_j)
// there, zero elsewhere. Every exchanged term on the support vanishes, every
// term off the support equals the leading one, and tau reduces to the closed
// form above, which is positive whenever the support amplitudes are genuine.
inline AppendixWitness appendix_witness_on_support(const ExcitationState& state, int k,
                                                   std::vector<int> support) {
    const int n = state.n();
    if (k < 2 || k > n) throw InvalidRank("appendix construction requires 2 <= k <= n");
    if (static_cast<int>(support.size()) != k)
        throw InvalidRank("support must hold exactly k indices");
    const Vector& xi = state.amplitudes();
    for (int j : support) {
        if (j < 0 || j >= n) throw IndexOutOfRange("support index out of range");
        if (std::abs(xi(j)) <= kAmplitudeZero)
            throw RankTooLow("support includes a vanishing amplitude");
    }

    AppendixWitness w;
    std::sort(support.begin(), support.end());
    w.support = std::move(support);

    w.raw.n = n;
    w.raw.alpha = Vector::Constant(2 * n, Complex(1.0, 0.0));
    w.raw.beta = Vector::Zero(2 * n);

    Complex x(0.0, 0.0);
    for (int j : w.support) {
        w.raw.beta(j) = xi(j);
        x += xi(j) * std::conj(xi(j));
    }
    w.x = x;
    Complex y(0.0, 0.0);
    for (int j : w.support) {
        w.raw.beta(n + j) = w.raw.beta(j) - x / std::conj(xi(j));
        y += w.raw.beta(n + j) * std::conj(xi(j));
    }
    w.y = y;
    w.closed_form =
        (1.0 - prefactor(k, n) * static_cast<double>(n - k)) * std::abs(x) * std::abs(y);
    w.params = w.raw.normalized(&w.scale);
    return w;
}

// Standard choice: the k largest-modulus amplitudes (ties by index).
inline AppendixWitness appendix_witness_detail(const ExcitationState& state, int k) {
    const int n = state.n();
    if (k < 2 || k > n) throw InvalidRank("appendix construction requires 2 <= k <= n");
    if (state.coherence_rank() < k)
        throw RankTooLow("state coherence rank below requested k");
    const Vector& xi = state.amplitudes();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(xi(a)) > std::abs(xi(b)); });
    return appendix_witness_on_support(state, k, {order.begin(), order.begin() + k});
}

inline WitnessParams appendix_witness(const ExcitationState& state, int k) {
    return appendix_witness_detail(state, k).params;
}

// ---------------------------------------------------------------------------
// Angle chart used by the optimizer
// ---------------------------------------------------------------------------
//
// alpha_i = cos(theta_i), beta_i = exp(i phase_i) sin(theta_i). Any real
// angles yield a normalized pair, and per-pair global phases do not change
// tau, so the chart covers all witness families.

inline WitnessParams params_from_angles(int n, const Eigen::VectorXd& angles) {
    if (angles.size() != 4 * n) throw DimensionMismatch("angle vector must have size 4n");
    WitnessParams p;
    p.n = n;
    p.alpha.resize(2 * n);
    p.beta.resize(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
        double theta = angles(i);
        double phase = angles(2 * n + i);
        p.alpha(i) = Complex(std::cos(theta), 0.0);
        p.beta(i) = std::sin(theta) * Complex(std::cos(phase), std::sin(phase));
    }
    return p;
}

inline Eigen::VectorXd angles_from_params(const WitnessParams& p) {
    Eigen::VectorXd angles(4 * p.n);
    for (int i = 0; i < 2 * p.n; ++i) {
        double a = std::abs(p.alpha(i));
        double b = std::abs(p.beta(i));
        angles(i) = std::atan2(b, a);
        // Relative phase; the pair's global phase is irrelevant.
        double pa = std::arg(p.alpha(i) == Complex(0.0, 0.0) ? Complex(1.0, 0.0) : p.alpha(i));
        angles(2 * p.n + i) = std::arg(p.beta(i)) - pa;
        if (b == 0.0) angles(2 * p.n + i) = 0.0;
    }
    return angles;
}

}  // namespace cohmeter
