// io.hpp — JSON and CSV formats.
//
// Wire formats (field names are exact):
//   state:    {"n": int, "amplitudes": [[re, im], ...]}
//   density:  {"n": int, "rows": [[[re, im], ...], ...]}
//   witness:  {"n": int, "pairs": [[[re, im], [re, im]], ... x 2n]}
//   kraus:    {"n": int, "operators": [{"rows": [[[re, im], ...], ...]}, ...]}
//   measure:  {"k": int, "n": int, "value": float,
//              "restarts_agreeing": int, "best_params": <witness>}
//
// Series CSV: header `t,q_1..q_n,IPR[,T_2..T_n_normalized]`, one row per
// stored step, 12 significant digits.

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cohmeter/channels.hpp"
#include "cohmeter/dynamics.hpp"

namespace cohmeter {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

namespace detail {

inline json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
    return *it;
}

inline int require_dim(const json& j) {
    const json& n = require(j, "n");
    if (!n.is_number_integer() || n.get<int>() < 1) throw ParseError("\"n\" must be a positive integer");
    return n.get<int>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// States and densities
// ---------------------------------------------------------------------------

inline json state_to_json(const ExcitationState& s) {
    json amps = json::array();
    for (int i = 0; i < s.n(); ++i) amps.push_back(detail::complex_to_json(s.amplitude(i)));
    return json{{"n", s.n()}, {"amplitudes", amps}};
}

inline ExcitationState parse_state(const json& j) {
    int n = detail::require_dim(j);
    const json& amps = detail::require(j, "amplitudes");
    if (!amps.is_array() || static_cast<int>(amps.size()) != n)
        throw ParseError("\"amplitudes\" must hold n entries");
    Vector xi(n);
    for (int i = 0; i < n; ++i) xi(i) = detail::complex_from_json(amps[static_cast<std::size_t>(i)]);
    return ExcitationState(std::move(xi));
}

inline json matrix_rows_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(detail::complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix parse_matrix_rows(const json& rows, int n) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
        throw ParseError("\"rows\" must hold n rows");
    Matrix m(n, n);
    for (int r = 0; r < n; ++r) {
        const json& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ParseError("matrix rows must hold n entries each");
        for (int c = 0; c < n; ++c)
            m(r, c) = detail::complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

inline json density_to_json(const DensityMatrix& rho) {
    return json{{"n", rho.n()}, {"rows", matrix_rows_to_json(rho.entries())}};
}

inline DensityMatrix parse_density(const json& j) {
    int n = detail::require_dim(j);
    Matrix m = parse_matrix_rows(detail::require(j, "rows"), n);
    DensityMatrix rho = DensityMatrix::from_matrix(std::move(m));
    if (!rho.is_valid())
        throw InvalidState("density matrix is not positive semidefinite");
    return rho;
}

// Accepts either a state or a density object; states are lifted to densities.
inline DensityMatrix parse_state_or_density(const json& j) {
    if (j.contains("amplitudes")) return pure_density(parse_state(j));
    if (j.contains("rows")) return parse_density(j);
    throw ParseError("expected \"amplitudes\" (state) or \"rows\" (density)");
}

// ---------------------------------------------------------------------------
// Witness parameters and measure results
// ---------------------------------------------------------------------------

inline json params_to_json(const WitnessParams& p) {
    json pairs = json::array();
    for (int i = 0; i < 2 * p.n; ++i)
        pairs.push_back(json::array(
            {detail::complex_to_json(p.alpha(i)), detail::complex_to_json(p.beta(i))}));
    return json{{"n", p.n}, {"pairs", pairs}};
}

inline WitnessParams parse_params(const json& j) {
    int n = detail::require_dim(j);
    const json& pairs = detail::require(j, "pairs");
    if (!pairs.is_array() || static_cast<int>(pairs.size()) != 2 * n)
        throw ParseError("\"pairs\" must hold 2n entries");
    WitnessParams p;
    p.n = n;
    p.alpha.resize(2 * n);
    p.beta.resize(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
        const json& pair = pairs[static_cast<std::size_t>(i)];
        if (!pair.is_array() || pair.size() != 2) throw ParseError("each pair must be [alpha, beta]");
        p.alpha(i) = detail::complex_from_json(pair[0]);
        p.beta(i) = detail::complex_from_json(pair[1]);
    }
    return p;
}

inline json measure_result_to_json(const MeasureResult& r) {
    return json{{"k", r.k},
                {"n", r.n},
                {"value", r.value},
                {"restarts_agreeing", r.restarts_agreeing},
                {"best_params", params_to_json(r.best_params)}};
}

// ---------------------------------------------------------------------------
// Kraus sets
// ---------------------------------------------------------------------------

inline json kraus_set_to_json(const KrausChannel& ch) {
    json ops = json::array();
    for (const auto& op : ch.operators)
        ops.push_back(json{{"rows", matrix_rows_to_json(op.matrix)}});
    return json{{"n", ch.n}, {"operators", ops}};
}

// Parses the operator list without enforcing trace preservation; callers
// classify first and report the verdict themselves.
inline std::vector<SubspaceKraus> parse_kraus_operators(const json& j, int* n_out) {
    int n = detail::require_dim(j);
    const json& ops = detail::require(j, "operators");
    if (!ops.is_array() || ops.empty()) throw ParseError("\"operators\" must be a non-empty array");
    std::vector<SubspaceKraus> out;
    out.reserve(ops.size());
    for (const auto& o : ops)
        out.push_back(SubspaceKraus::from_matrix(parse_matrix_rows(detail::require(o, "rows"), n)));
    if (n_out != nullptr) *n_out = n;
    return out;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    DynamicsSpec spec;
    std::vector<int> ks;
    OptimizerConfig optimizer;
    int stride = 10;
};

inline Eigen::MatrixXd parse_coupling_matrix(const json& j, int n, const char* what) {
    if (j.is_object()) {
        const json& u = detail::require(j, "uniform");
        if (!u.is_number()) throw ParseError(std::string(what) + ".uniform must be a number");
        Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, u.get<double>());
        m.diagonal().setZero();
        return m;
    }
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw ParseError(std::string(what) + " must be an n x n array or {\"uniform\": x}");
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ParseError(std::string(what) + " rows must hold n numbers");
        for (int c = 0; c < n; ++c) {
            if (!row[static_cast<std::size_t>(c)].is_number())
                throw ParseError(std::string(what) + " entries must be numbers");
            m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

inline OptimizerConfig parse_optimizer_config(const json& j) {
    OptimizerConfig cfg;
    if (j.contains("restarts")) cfg.restarts = j["restarts"].get<int>();
    if (j.contains("max_iterations")) cfg.max_iterations = j["max_iterations"].get<int>();
    if (j.contains("convergence_tol")) cfg.convergence_tol = j["convergence_tol"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("include_appendix_starts"))
        cfg.include_appendix_starts = j["include_appendix_starts"].get<bool>();
    return cfg;
}

inline RunConfig parse_run_config(const json& j) {
    RunConfig rc;
    int n = detail::require_dim(j);
    rc.spec.n = n;
    rc.spec.lambda = parse_coupling_matrix(detail::require(j, "lambda"), n, "lambda");
    rc.spec.gamma = parse_coupling_matrix(detail::require(j, "gamma"), n, "gamma");
    const json& tmax = detail::require(j, "t_max");
    if (!tmax.is_number()) throw ParseError("t_max must be a number");
    rc.spec.t_max = tmax.get<double>();
    if (j.contains("dt")) rc.spec.dt = j["dt"].get<double>();
    rc.spec.initial = parse_state_or_density(detail::require(j, "initial"));
    if (rc.spec.initial.n() != n) throw ParseError("initial state dimension mismatch");
    if (j.contains("ks")) {
        for (const auto& k : j["ks"]) rc.ks.push_back(k.get<int>());
    }
    if (j.contains("optimizer")) rc.optimizer = parse_optimizer_config(j["optimizer"]);
    if (j.contains("stride")) rc.stride = j["stride"].get<int>();
    return rc;
}

// ---------------------------------------------------------------------------
// Series output
// ---------------------------------------------------------------------------

inline std::string format_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string series_header(const TimeSeries& ts, char sep = ',') {
    std::ostringstream os;
    os << 't';
    const int n = ts.populations.empty() ? 0 : static_cast<int>(ts.populations.front().size());
    for (int i = 1; i <= n; ++i) os << sep << "q_" << i;
    os << sep << "IPR";
    for (int k : ts.ks) os << sep << "T_" << k << "_normalized";
    return os.str();
}

inline void write_series(std::ostream& os, const TimeSeries& ts, char sep = ',',
                         const char* comment_prefix = "") {
    os << comment_prefix << series_header(ts, sep) << '\n';
    for (std::size_t r = 0; r < ts.size(); ++r) {
        os << format_sig12(ts.times[r]);
        for (Eigen::Index i = 0; i < ts.populations[r].size(); ++i)
            os << sep << format_sig12(ts.populations[r](i));
        os << sep << format_sig12(ts.iprs[r]);
        if (!ts.tau_normalized.empty())
            for (double v : ts.tau_normalized[r]) os << sep << format_sig12(v);
        os << '\n';
    }
}

inline void write_series_csv(const std::string& path, const TimeSeries& ts) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path);
    write_series(f, ts, ',');
}

inline void write_series_dat(const std::string& path, const TimeSeries& ts) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path);
    write_series(f, ts, ' ', "# ");
}

// ---------------------------------------------------------------------------
// Files and manifests
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline json parse_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON");
    return j;
}

inline json load_json_file(const std::string& path) { return parse_json_text(read_file(path)); }

inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cohmeter
