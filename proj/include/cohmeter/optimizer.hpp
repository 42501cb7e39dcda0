// optimizer.hpp — computes the measure T_kn(rho) = max over witness families
// of tau_kn(rho) by multi-start derivative-free ascent on the 4n angles.
//
// The objective contains absolute values and square roots and is therefore
// not smooth everywhere; a simplex search handles that robustly at these
// dimensions (4n <= 40 for the system sizes of interest).

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "cohmeter/parallel.hpp"
#include "cohmeter/witness.hpp"

namespace cohmeter {

struct OptimizerConfig {
    int restarts = 32;
    int max_iterations = 2000;
    double convergence_tol = 1e-10;  // absolute objective spread of the simplex
    std::uint64_t seed = 0;
    bool include_appendix_starts = true;
};

struct MeasureResult {
    double value = 0.0;
    WitnessParams best_params;
    int restarts_agreeing = 0;  // searches within 1e-6 of the reported value
    int k = 0;
    int n = 0;
};

namespace detail {

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
};

// One simplex descent pass. Standard coefficients (reflect 1, expand 2,
// contract 1/2, shrink 1/2); terminates when the simplex's objective spread
// drops below tol or the iteration budget runs out.
template <class F>
NelderMeadResult nelder_mead_pass(F&& f, const Eigen::VectorXd& x0, int max_iterations,
                                  double tol, double step) {
    const int d = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(d) + 1, x0);
    std::vector<double> fs(static_cast<std::size_t>(d) + 1);
    for (int i = 0; i < d; ++i) xs[static_cast<std::size_t>(i) + 1](i) += step;
    for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = -f(xs[i]);  // minimize -f

    std::vector<int> order(xs.size());
    Eigen::VectorXd centroid(d), xr(d), xe(d), xc(d);
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return fs[static_cast<std::size_t>(a)] < fs[static_cast<std::size_t>(b)];
        });
        const int best = order.front();
        const int worst = order.back();
        const int second_worst = order[order.size() - 2];
        if (fs[static_cast<std::size_t>(worst)] - fs[static_cast<std::size_t>(best)] < tol) break;

        centroid.setZero();
        for (int id : order)
            if (id != worst) centroid += xs[static_cast<std::size_t>(id)];
        centroid /= static_cast<double>(d);

        xr = centroid + (centroid - xs[static_cast<std::size_t>(worst)]);
        double fr = -f(xr);
        if (fr < fs[static_cast<std::size_t>(best)]) {
            xe = centroid + 2.0 * (centroid - xs[static_cast<std::size_t>(worst)]);
            double fe = -f(xe);
            if (fe < fr) {
                xs[static_cast<std::size_t>(worst)] = xe;
                fs[static_cast<std::size_t>(worst)] = fe;
            } else {
                xs[static_cast<std::size_t>(worst)] = xr;
                fs[static_cast<std::size_t>(worst)] = fr;
            }
        } else if (fr < fs[static_cast<std::size_t>(second_worst)]) {
            xs[static_cast<std::size_t>(worst)] = xr;
            fs[static_cast<std::size_t>(worst)] = fr;
        } else {
            bool outside = fr < fs[static_cast<std::size_t>(worst)];
            const Eigen::VectorXd& base =
                outside ? xr : xs[static_cast<std::size_t>(worst)];
            xc = centroid + 0.5 * (base - centroid);
            double fc = -f(xc);
            if (fc < std::min(fr, fs[static_cast<std::size_t>(worst)])) {
                xs[static_cast<std::size_t>(worst)] = xc;
                fs[static_cast<std::size_t>(worst)] = fc;
            } else {
                // Shrink toward the best vertex.
                for (int id : order) {
                    if (id == best) continue;
                    auto& v = xs[static_cast<std::size_t>(id)];
                    v = xs[static_cast<std::size_t>(best)] + 0.5 * (v - xs[static_cast<std::size_t>(best)]);
                    fs[static_cast<std::size_t>(id)] = -f(v);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < fs.size(); ++i)
        if (fs[i] < fs[best]) best = i;
    return {xs[best], -fs[best], iter};
}

// Multi-pass maximization: after each converged pass the simplex is rebuilt
// around the incumbent with a smaller edge, which recovers the accuracy a
// single simplex loses when it collapses prematurely in 4n dimensions.
template <class F>
NelderMeadResult nelder_mead_max(F&& f, const Eigen::VectorXd& x0, int max_iterations,
                                 double tol) {
    static constexpr double kSteps[] = {0.35, 0.06, 0.01};
    NelderMeadResult best{x0, f(x0), 0};
    int used = 0;
    for (double step : kSteps) {
        int budget = std::max(1, (max_iterations - used) / 2);
        if (step == kSteps[sizeof(kSteps) / sizeof(kSteps[0]) - 1])
            budget = std::max(1, max_iterations - used);
        NelderMeadResult r = nelder_mead_pass(f, best.x, budget, tol, step);
        used += r.iterations;
        if (r.value > best.value) {
            best.x = r.x;
            best.value = r.value;
        }
        best.iterations = used;
        if (used >= max_iterations) break;
    }
    return best;
}

inline Eigen::VectorXd random_start(int n, SplitMix64& rng) {
    Eigen::VectorXd x(4 * n);
    for (int i = 0; i < 2 * n; ++i) x(i) = rng.uniform(0.0, 1.5707963267948966);
    for (int i = 2 * n; i < 4 * n; ++i) x(i) = rng.uniform(0.0, 6.283185307179586);
    return x;
}

// k-subsets of the state's support used as analytic seed supports: all of
// them when there are at most 64, otherwise the contiguous windows of the
// support ordered by decreasing amplitude magnitude.
inline std::vector<std::vector<int>> seed_supports(const ExcitationState& state, int k) {
    const Vector& xi = state.amplitudes();
    std::vector<int> support;
    for (int i = 0; i < state.n(); ++i)
        if (std::abs(xi(i)) > kAmplitudeZero) support.push_back(i);
    std::stable_sort(support.begin(), support.end(),
                     [&](int a, int b) { return std::abs(xi(a)) > std::abs(xi(b)); });
    const int r = static_cast<int>(support.size());

    double count = 1.0;
    for (int i = 0; i < k; ++i) count *= static_cast<double>(r - i) / static_cast<double>(i + 1);
    std::vector<std::vector<int>> out;
    if (count <= 64.0) {
        std::vector<int> pick(static_cast<std::size_t>(k));
        std::function<void(int, int)> rec = [&](int from, int depth) {
            if (depth == k) {
                out.emplace_back(pick);
                return;
            }
            for (int i = from; i <= r - (k - depth); ++i) {
                pick[static_cast<std::size_t>(depth)] = support[static_cast<std::size_t>(i)];
                rec(i + 1, depth + 1);
            }
        };
        rec(0, 0);
    } else {
        for (int i = 0; i + k <= r; ++i)
            out.emplace_back(support.begin() + i, support.begin() + i + k);
    }
    return out;
}

}  // namespace detail

// Multi-start maximization with caller-provided extra starting families in
// addition to the random restarts. Deterministic in cfg.seed regardless of
// the number of worker threads.
inline MeasureResult measure_seeded(const DensityMatrix& rho, int k, const OptimizerConfig& cfg,
                                    const std::vector<WitnessParams>& warm_starts) {
    const int n = rho.n();
    (void)prefactor(k, n);  // validates 2 <= k <= n
    if (cfg.restarts < 1) throw InvalidState("optimizer requires at least one restart");
    if (cfg.convergence_tol <= 0.0) throw InvalidState("convergence_tol must be positive");

    std::vector<Eigen::VectorXd> starts;
    starts.reserve(static_cast<std::size_t>(cfg.restarts) + warm_starts.size() + 1);
    for (int r = 0; r < cfg.restarts; ++r) {
        SplitMix64 rng(SplitMix64::derive(cfg.seed, static_cast<std::uint64_t>(r)));
        starts.push_back(detail::random_start(n, rng));
    }
    for (const auto& w : warm_starts) {
        if (w.n == n) starts.push_back(angles_from_params(w));
    }
    if (cfg.include_appendix_starts) {
        // Seed from the analytic construction applied to the dominant
        // eigenvector. For a near-pure state (largest eigenvalue >= 1 - 1e-6)
        // the k-largest-support seed certifies a positive value outright; the
        // remaining k-subsets of the support are candidate starts that often
        // sit next to the optimum of a moderately mixed state even when their
        // own value is negative.
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries());
        Vector top = es.eigenvectors().col(n - 1);
        try {
            ExcitationState dominant = ExcitationState::normalized(top);
            if (dominant.coherence_rank() >= k)
                for (const auto& support : detail::seed_supports(dominant, k))
                    starts.push_back(angles_from_params(
                        appendix_witness_on_support(dominant, k, support).params));
        } catch (const DomainError&) {
            // Dominant eigenvector unusable; random restarts still run.
        }
    }

    struct Local {
        double value;
        Eigen::VectorXd x;
    };
    std::vector<Local> results(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
        TauEvaluator ev(rho, k);
        auto objective = [&](const Eigen::VectorXd& x) {
            return ev.value(params_from_angles(n, x));
        };
        auto r = detail::nelder_mead_max(objective, starts[i], cfg.max_iterations,
                                         cfg.convergence_tol);
        results[i] = {r.value, r.x};
    });

    // The all-beta-zero family evaluates to exactly zero for every state, so
    // zero is always attainable; it acts as the floor candidate.
    MeasureResult out;
    out.k = k;
    out.n = n;
    std::size_t best = results.size();
    double best_value = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].value > best_value) {
            best_value = results[i].value;
            best = i;
        }
    }
    if (best == results.size()) {
        out.value = 0.0;
        out.best_params = params_from_angles(n, Eigen::VectorXd::Zero(4 * n));
    } else {
        out.value = best_value;
        out.best_params = params_from_angles(n, results[best].x);
    }
    if (out.value < 0.0 && out.value >= -1e-10) out.value = 0.0;
    for (const auto& r : results)
        if (std::abs(r.value - out.value) <= 1e-6) ++out.restarts_agreeing;
    return out;
}

inline MeasureResult measure(const DensityMatrix& rho, int k, const OptimizerConfig& cfg) {
    return measure_seeded(rho, k, cfg, {});
}

// Batch evaluation over several ranks. Runs in descending k and feeds each
// result's parameters into the next smaller rank: tau with a smaller k only
// grows at fixed parameters, so the returned values are non-increasing in k
// by construction, matching the hierarchy of the measures.
inline std::vector<MeasureResult> measure_profile(const DensityMatrix& rho,
                                                  const std::vector<int>& ks,
                                                  const OptimizerConfig& cfg) {
    for (int k : ks) (void)prefactor(k, rho.n());
    std::vector<int> sorted = ks;
    std::sort(sorted.begin(), sorted.end(), std::greater<int>());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<MeasureResult> by_k;
    std::vector<WitnessParams> chain;
    for (int k : sorted) {
        MeasureResult r = measure_seeded(rho, k, cfg, chain);
        chain = {r.best_params};
        by_k.push_back(std::move(r));
    }
    std::vector<MeasureResult> out;
    out.reserve(ks.size());
    for (int k : ks) {
        for (const auto& r : by_k)
            if (r.k == k) out.push_back(r);
    }
    return out;
}

}  // namespace cohmeter
