// dynamics.hpp — master-equation integration on the single-excitation
// subspace: d rho / dt = -i [H, rho] + D(rho).
//
// The full dynamics conserves the excitation number, so the n-dimensional
// restriction is exact. H comes from the pairwise coupling matrix lambda;
// D is the pairwise Lindblad dissipator with rate matrix gamma, built from
// the subspace restrictions of the four two-site Lindblad operators:
//
//   G1^(ij) -> E_ij (hop j -> i)          G2^(ij) -> E_ji
//   G3^(ij) -> -(1/sqrt(2)) sum_{m not in {i,j}} E_mm
//   G4^(ij) -> (1/(2 sqrt(2))) (sum_{m not in {i,j}} E_mm - E_ii - E_jj)
//
// G3 and G4 are diagonal (pure dephasing between site populations). Their
// identity-proportional parts contribute nothing to D but are kept verbatim
// so each operator matches its two-site parent entry by entry.

#pragma once

#include <vector>

#include "cohmeter/channels.hpp"
#include "cohmeter/optimizer.hpp"

namespace cohmeter {

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

inline void validate_symmetric_zero_diagonal(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols()) throw DimensionMismatch(std::string(what) + " matrix must be square");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (m(i, i) != 0.0)
            throw AsymmetricCoupling(std::string(what) + " matrix must have zero diagonal");
        for (Eigen::Index j = 0; j < i; ++j)
            if (m(i, j) != m(j, i))
                throw AsymmetricCoupling(std::string(what) + " matrix must be symmetric");
    }
}

inline Matrix hamiltonian_subspace(const Eigen::MatrixXd& lambda) {
    validate_symmetric_zero_diagonal(lambda, "coupling");
    return lambda.cast<Complex>();
}

// The four restricted Lindblad operators of the (i, j) pair, unscaled.
inline std::vector<Matrix> lindblad_pair_ops(int n, int i, int j) {
    if (i < 0 || i >= n || j < 0 || j >= n) throw IndexOutOfRange("pair site out of range");
    if (i == j) throw SameSite("pair sites must differ");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<Matrix> ops(4, Matrix::Zero(n, n));
    ops[0](i, j) = 1.0;
    ops[1](j, i) = 1.0;
    for (int m = 0; m < n; ++m) {
        if (m != i && m != j) {
            ops[2](m, m) = -inv_sqrt2;
            ops[3](m, m) = 0.5 * inv_sqrt2;
        }
    }
    ops[3](i, i) = -0.5 * inv_sqrt2;
    ops[3](j, j) = -0.5 * inv_sqrt2;
    return ops;
}

// sum_k rate_k (G rho G^dag - 1/2 {G^dag G, rho}) as an n^2 x n^2 matrix on
// column-major vec(rho).
inline Matrix lindblad_superoperator(int n, const std::vector<std::pair<double, Matrix>>& terms) {
    Matrix s = Matrix::Zero(n * n, n * n);
    const Matrix id = Matrix::Identity(n, n);
    for (const auto& [rate, g] : terms) {
        Matrix gdg = g.adjoint() * g;
        s += rate * (kron(g.conjugate(), g) - 0.5 * kron(id, gdg) -
                     0.5 * kron(gdg.transpose(), id));
    }
    return s;
}

struct Superoperator {
    int n = 0;
    Matrix mat;  // n^2 x n^2

    Matrix apply_to(const Matrix& rho) const {
        Vector v = Eigen::Map<const Vector>(rho.data(), n * n);
        Vector w = mat * v;
        return Eigen::Map<const Matrix>(w.data(), n, n);
    }
};

inline Superoperator dissipator_subspace(const Eigen::MatrixXd& gamma) {
    const int n = static_cast<int>(gamma.rows());
    if (gamma.rows() != gamma.cols()) throw DimensionMismatch("rate matrix must be square");
    for (Eigen::Index i = 0; i < gamma.rows(); ++i)
        for (Eigen::Index j = 0; j < gamma.cols(); ++j)
            if (gamma(i, j) < 0.0) throw NegativeRate("rates must be nonnegative");
    validate_symmetric_zero_diagonal(gamma, "rate");

    std::vector<std::pair<double, Matrix>> terms;
    for (int i = 1; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            if (gamma(i, j) == 0.0) continue;
            for (auto& g : lindblad_pair_ops(n, i, j))
                terms.emplace_back(gamma(i, j), std::move(g));
        }
    }
    return {n, lindblad_superoperator(n, terms)};
}

inline Superoperator liouvillian(const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& gamma) {
    const int n = static_cast<int>(lambda.rows());
    if (gamma.rows() != lambda.rows()) throw DimensionMismatch("lambda/gamma size mismatch");
    Matrix h = hamiltonian_subspace(lambda);
    const Matrix id = Matrix::Identity(n, n);
    const Complex mi(0.0, -1.0);
    Matrix s = mi * (kron(id, h) - kron(h.transpose(), id));
    s += dissipator_subspace(gamma).mat;
    return {n, std::move(s)};
}

// ---------------------------------------------------------------------------
// Time evolution
// ---------------------------------------------------------------------------

struct DynamicsSpec {
    int n = 0;
    Eigen::MatrixXd lambda;  // couplings, symmetric, zero diagonal
    Eigen::MatrixXd gamma;   // rates, symmetric, nonnegative, zero diagonal
    double t_max = 0.0;
    double dt = 0.0;  // <= 0 selects the default 1e-3 / max(rate, coupling)
    DensityMatrix initial = density_from_parts(Matrix::Identity(1, 1));

    double effective_dt() const {
        if (dt > 0.0) return dt;
        double scale = std::max(lambda.cwiseAbs().maxCoeff(), gamma.cwiseAbs().maxCoeff());
        return scale > 0.0 ? 1e-3 / scale : 1e-3;
    }

    void validate() const {
        if (n < 1) throw InvalidState("dynamics requires n >= 1");
        if (lambda.rows() != n || gamma.rows() != n)
            throw DimensionMismatch("coupling/rate matrices must be n x n");
        if (initial.n() != n) throw DimensionMismatch("initial state dimension mismatch");
        if (t_max < 0.0) throw InvalidState("t_max must be nonnegative");
        validate_symmetric_zero_diagonal(lambda, "coupling");
        for (Eigen::Index i = 0; i < gamma.rows(); ++i)
            for (Eigen::Index j = 0; j < gamma.cols(); ++j)
                if (gamma(i, j) < 0.0) throw NegativeRate("rates must be nonnegative");
        validate_symmetric_zero_diagonal(gamma, "rate");
    }
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::vector<Eigen::VectorXd> populations;
    std::vector<double> iprs;

    // Measure columns, filled by observable_series.
    std::vector<int> ks;                              // ascending
    std::vector<double> w;                            // normalization per k
    std::vector<std::vector<double>> tau_normalized;  // [row][k index]

    std::size_t size() const { return times.size(); }
};

// Fixed-step RK4. Every stored state is re-Hermitized and trace-renormalized;
// a per-step trace drift beyond 1e-8 aborts the run.
inline TimeSeries evolve(const DynamicsSpec& spec) {
    spec.validate();
    const int n = spec.n;
    const double dt = spec.effective_dt();
    if (dt <= 0.0) throw InvalidState("dt must be positive");
    Superoperator gen = liouvillian(spec.lambda, spec.gamma);

    TimeSeries ts;
    auto record = [&](double t, const Matrix& rho) {
        DensityMatrix d = density_from_parts(rho);
        ts.times.push_back(t);
        ts.populations.push_back(d.populations());
        ts.iprs.push_back(ipr(d));
        ts.states.push_back(std::move(d));
    };

    Matrix rho = spec.initial.entries();
    record(0.0, rho);

    const long long full_steps = static_cast<long long>(std::floor(spec.t_max / dt + 1e-9));
    const double remainder = spec.t_max - static_cast<double>(full_steps) * dt;

    Vector v = Eigen::Map<const Vector>(rho.data(), n * n);
    Vector k1(n * n), k2(n * n), k3(n * n), k4(n * n);
    double t = 0.0;
    auto step = [&](double h) {
        k1.noalias() = gen.mat * v;
        k2.noalias() = gen.mat * (v + (h / 2.0) * k1);
        k3.noalias() = gen.mat * (v + (h / 2.0) * k2);
        k4.noalias() = gen.mat * (v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;

        Matrix r = Eigen::Map<const Matrix>(v.data(), n, n);
        double tr = r.trace().real();
        if (std::abs(tr - 1.0) > 1e-8)
            throw StepTooLarge("trace drift " + std::to_string(std::abs(tr - 1.0)) +
                               " in one step; reduce dt");
        r = ((r + r.adjoint()) / 2.0).eval();
        r /= r.trace().real();
        v = Eigen::Map<const Vector>(r.data(), n * n);
        record(t, r);
    };

    for (long long s = 0; s < full_steps; ++s) step(dt);
    if (remainder > 1e-12 * std::max(1.0, spec.t_max)) step(remainder);
    return ts;
}

// ---------------------------------------------------------------------------
// Measure columns
// ---------------------------------------------------------------------------

namespace detail {

// Points are processed in fixed-size chains so the warm-start pattern (and
// therefore every number produced) is independent of the thread count.
inline constexpr std::size_t kSeriesChunk = 32;

}  // namespace detail

// Subsamples the series at `stride` (always keeping the final point) and adds
// one T_k column per requested k, normalized by w_k computed from the maximal
// coherent state of the same dimension with the same optimizer settings.
//
// Within a point, ranks run from the largest k down, feeding each result to
// the next rank; across points each chain warm-starts from the previous
// point's parameters and from the t = 0 solution. Warm starts only add
// candidate restarts, so every reported value is still an attained tau.
inline TimeSeries observable_series(const TimeSeries& ts, const std::vector<int>& ks_in,
                                    const OptimizerConfig& cfg, int stride = 10) {
    if (ts.size() == 0) throw InvalidState("empty time series");
    if (stride < 1) throw InvalidState("stride must be >= 1");
    const int n = ts.states.front().n();

    std::vector<int> ks = ks_in;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (int k : ks) (void)prefactor(k, n);

    TimeSeries out;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < ts.size(); i += static_cast<std::size_t>(stride))
        rows.push_back(i);
    if (rows.back() != ts.size() - 1) rows.push_back(ts.size() - 1);
    for (std::size_t r : rows) {
        out.times.push_back(ts.times[r]);
        out.states.push_back(ts.states[r]);
        out.populations.push_back(ts.populations[r]);
        out.iprs.push_back(ts.iprs[r]);
    }
    out.ks = ks;
    if (ks.empty()) return out;

    // Normalization constants from the uniform fully coherent state.
    ExcitationState w_state(Vector::Constant(n, Complex(1.0 / std::sqrt(double(n)), 0.0)));
    DensityMatrix w_rho = pure_density(w_state);
    std::vector<MeasureResult> w_results = measure_profile(w_rho, ks, cfg);
    out.w.resize(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) out.w[i] = w_results[i].value;

    const std::size_t npoints = rows.size();
    const std::size_t nk = ks.size();
    std::vector<std::vector<double>> values(npoints, std::vector<double>(nk, 0.0));
    std::vector<std::vector<WitnessParams>> params(npoints,
                                                   std::vector<WitnessParams>(nk));

    auto eval_point = [&](std::size_t p, const std::vector<WitnessParams>* prev) {
        std::vector<WitnessParams> warm;
        for (std::size_t ki = nk; ki-- > 0;) {
            warm.clear();
            if (prev != nullptr) warm.push_back((*prev)[ki]);
            if (p > 0) warm.push_back(params[0][ki]);  // t = 0 solution
            if (ki + 1 < nk) warm.push_back(params[p][ki + 1]);
            MeasureResult r = measure_seeded(ts.states[rows[p]], ks[ki], cfg, warm);
            values[p][ki] = r.value;
            params[p][ki] = std::move(r.best_params);
        }
    };

    eval_point(0, nullptr);
    if (npoints > 1) {
        const std::size_t chunk = detail::kSeriesChunk;
        const std::size_t nchunks = (npoints - 1 + chunk - 1) / chunk;
        parallel_for(nchunks, [&](std::size_t c) {
            std::size_t begin = 1 + c * chunk;
            std::size_t end = std::min(begin + chunk, npoints);
            const std::vector<WitnessParams>* prev = &params[0];
            for (std::size_t p = begin; p < end; ++p) {
                eval_point(p, prev);
                prev = &params[p];
            }
        });
    }

    out.tau_normalized.resize(npoints, std::vector<double>(nk, 0.0));
    for (std::size_t p = 0; p < npoints; ++p)
        for (std::size_t ki = 0; ki < nk; ++ki)
            out.tau_normalized[p][ki] = out.w[ki] > 0.0 ? values[p][ki] / out.w[ki] : 0.0;
    return out;
}

}  // namespace cohmeter
