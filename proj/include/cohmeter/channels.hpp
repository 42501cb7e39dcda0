// channels.hpp — quantum channels as Kraus sets on the single-excitation
// subspace, incoherence classification, and the explicit channels used by
// the dynamics experiments.
//
// Conventions (fixed here and relied on everywhere):
//   * single-unit basis order (|0>, |1>): sigma_z = diag(-1, +1),
//     sigma_+ = |1><0|, P_0 = diag(1, 0), P_1 = diag(0, 1);
//   * n-unit product basis: unit 0 is the most significant bit, so the
//     state with only unit i excited has index 2^(n-1-i);
//   * site indices are 0-based throughout the API.

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "cohmeter/hilbert.hpp"

namespace cohmeter {

// ---------------------------------------------------------------------------
// Classification of subspace operators
// ---------------------------------------------------------------------------
//
// On the subspace, incoherent Kraus operators are exactly the diagonal
// matrices (products of dephasing elements), the scaled matrix units
// (a single hopping element), and zero (two or more hopping factors).

enum class KrausClass { Dephasing, Hopping, Coherent, Annihilating };

inline constexpr double kEntryZeroTol = 1e-12;

inline bool is_incoherent(KrausClass c) { return c != KrausClass::Coherent; }

inline const char* to_string(KrausClass c) {
    switch (c) {
        case KrausClass::Dephasing: return "dephasing";
        case KrausClass::Hopping: return "hopping";
        case KrausClass::Coherent: return "coherent";
        case KrausClass::Annihilating: return "annihilating";
    }
    return "unknown";
}

// Shape-based classification. Zero matrices report Annihilating; operators
// built by the constructors below may carry a more specific tag when the
// construction form is known (e.g. a hopping element whose coefficient
// happens to vanish).
inline KrausClass classify_subspace(const Matrix& m, int* hop_to = nullptr,
                                    int* hop_from = nullptr) {
    const int n = static_cast<int>(m.rows());
    int nonzero = 0;
    int row = -1, col = -1;
    double offdiag_max = 0.0;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (std::abs(m(r, c)) > kEntryZeroTol) {
                ++nonzero;
                row = r;
                col = c;
                if (r != c) offdiag_max = std::max(offdiag_max, std::abs(m(r, c)));
            }
        }
    }
    if (nonzero == 0) return KrausClass::Annihilating;
    if (offdiag_max <= kEntryZeroTol) return KrausClass::Dephasing;
    if (nonzero == 1 && row != col) {
        if (hop_to != nullptr) *hop_to = row;
        if (hop_from != nullptr) *hop_from = col;
        return KrausClass::Hopping;
    }
    return KrausClass::Coherent;
}

struct SubspaceKraus {
    int n = 0;
    Matrix matrix;
    KrausClass classification = KrausClass::Annihilating;
    int hop_to = -1;    // set when classification == Hopping: matrix = c E_{to,from}
    int hop_from = -1;
    // Amplitude of the generating full-space operator on the no-excitation
    // sector. Needed to embed a pair operator into a larger system, where
    // other units can hold the excitation while the pair sits in its vacuum.
    Complex vacuum{0.0, 0.0};

    static SubspaceKraus from_matrix(Matrix m, Complex vacuum = Complex(0.0, 0.0)) {
        SubspaceKraus op;
        op.n = static_cast<int>(m.rows());
        op.classification = classify_subspace(m, &op.hop_to, &op.hop_from);
        op.matrix = std::move(m);
        op.vacuum = vacuum;
        return op;
    }
};

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------
struct KrausChannel {
    int n = 0;
    std::vector<SubspaceKraus> operators;

    Matrix completeness() const {
        Matrix s = Matrix::Zero(n, n);
        for (const auto& op : operators) s += op.matrix.adjoint() * op.matrix;
        return s;
    }

    double completeness_defect() const {
        return (completeness() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    }

    bool all_incoherent() const {
        for (const auto& op : operators)
            if (!is_incoherent(op.classification)) return false;
        return true;
    }

    // Validates dimensions and trace preservation (sum F^dag F = identity).
    static KrausChannel checked(int n, std::vector<SubspaceKraus> ops, double tol = 1e-10) {
        KrausChannel ch;
        ch.n = n;
        for (const auto& op : ops)
            if (op.matrix.rows() != n || op.matrix.cols() != n)
                throw DimensionMismatch("Kraus operator dimension mismatch");
        ch.operators = std::move(ops);
        double defect = ch.completeness_defect();
        if (defect > tol)
            throw NotTracePreserving("sum F^dag F deviates from identity by " +
                                     std::to_string(defect));
        return ch;
    }
};

inline KrausChannel identity_channel(int n) {
    return KrausChannel::checked(
        n, {SubspaceKraus::from_matrix(Matrix::Identity(n, n), Complex(1.0, 0.0))});
}

inline DensityMatrix apply(const KrausChannel& channel, const DensityMatrix& rho) {
    if (channel.n != rho.n()) throw DimensionMismatch("channel/state dimension mismatch");
    double defect = channel.completeness_defect();
    if (defect > 1e-8)
        throw NotTracePreserving("channel is not trace preserving: defect " +
                                 std::to_string(defect));
    Matrix out = Matrix::Zero(channel.n, channel.n);
    for (const auto& op : channel.operators)
        out += op.matrix * rho.entries() * op.matrix.adjoint();
    out = ((out + out.adjoint()) / 2.0).eval();
    return density_from_parts(std::move(out));
}

// ---------------------------------------------------------------------------
// Elementary incoherent operators
// ---------------------------------------------------------------------------

// Local dephasing element: u1 on site ell, u2 on every other site. Its
// full-space parent is (u1+u2)/2 * identity + (u1-u2)/2 * sigma_z on unit
// ell, whose vacuum amplitude is u2.
inline SubspaceKraus elementary_dephasing(int n, int ell, Complex u1, Complex u2) {
    if (ell < 0 || ell >= n) throw IndexOutOfRange("dephasing site out of range");
    Matrix m = Matrix::Identity(n, n) * u2;
    m(ell, ell) = u1;
    SubspaceKraus op;
    op.n = n;
    op.matrix = std::move(m);
    op.classification = KrausClass::Dephasing;
    op.vacuum = u2;
    return op;
}

// Hopping element |Psi_j><Psi_ell|.
inline SubspaceKraus elementary_hopping(int n, int j, int ell) {
    if (j < 0 || j >= n || ell < 0 || ell >= n) throw IndexOutOfRange("hopping site out of range");
    if (j == ell) throw SameSite("hopping requires two distinct sites");
    Matrix m = Matrix::Zero(n, n);
    m(j, ell) = Complex(1.0, 0.0);
    SubspaceKraus op;
    op.n = n;
    op.matrix = std::move(m);
    op.classification = KrausClass::Hopping;
    op.hop_to = j;
    op.hop_from = ell;
    op.vacuum = Complex(0.0, 0.0);
    return op;
}

// ---------------------------------------------------------------------------
// The two-site relaxation channel
// ---------------------------------------------------------------------------
//
// Kraus set of the two-site pure-hopping-plus-dephasing master equation at
// decay factor Gamma = exp(-gamma t), restricted to the single-excitation
// subspace {|10>, |01>}:
//
//   F1 = sqrt((1-G^2)/2) sig+ x sig-     -> sqrt((1-G^2)/2) E_01   (hop 1->0)
//   F2 = sqrt((1-G^2)/2) sig- x sig+     -> sqrt((1-G^2)/2) E_10
//   F3 = sqrt(1-G) P1 x P1               -> 0                (needs 2 excitations)
//   F4 = sqrt(1-G) P0 x P0               -> 0, vacuum sqrt(1-G)
//   F5 = (1-G)/sqrt(2) P1 x P0           -> (1-G)/sqrt(2) E_00
//   F6 = (1-G)/sqrt(2) P0 x P1           -> (1-G)/sqrt(2) E_11
//   F7 = sqrt(G) 1 x 1                   -> sqrt(G) I, vacuum sqrt(G)
//
// Completeness holds exactly: (1-G^2)/2 + (1-G)^2/2 + G = 1. The tags follow
// the construction form: F1, F2 are hopping elements, F3..F7 dephasing.
inline KrausChannel kraus_two_site(double gamma_t) {
    if (!(gamma_t > 0.0) || gamma_t > 1.0) throw InvalidGamma("Gamma_t must lie in (0, 1]");
    const double g = gamma_t;
    const double hop = std::sqrt((1.0 - g * g) / 2.0);
    const double deph = (1.0 - g) / std::sqrt(2.0);

    auto unit = [](int r, int c) {
        Matrix m = Matrix::Zero(2, 2);
        m(r, c) = Complex(1.0, 0.0);
        return m;
    };

    std::vector<SubspaceKraus> ops(7);
    ops[0].matrix = hop * unit(0, 1);
    ops[0].classification = KrausClass::Hopping;
    ops[0].hop_to = 0;
    ops[0].hop_from = 1;
    ops[1].matrix = hop * unit(1, 0);
    ops[1].classification = KrausClass::Hopping;
    ops[1].hop_to = 1;
    ops[1].hop_from = 0;
    ops[2].matrix = Matrix::Zero(2, 2);
    ops[2].classification = KrausClass::Dephasing;
    ops[3].matrix = Matrix::Zero(2, 2);
    ops[3].classification = KrausClass::Dephasing;
    ops[3].vacuum = std::sqrt(1.0 - g);
    ops[4].matrix = deph * unit(0, 0);
    ops[4].classification = KrausClass::Dephasing;
    ops[5].matrix = deph * unit(1, 1);
    ops[5].classification = KrausClass::Dephasing;
    ops[6].matrix = std::sqrt(g) * Matrix::Identity(2, 2);
    ops[6].classification = KrausClass::Dephasing;
    ops[6].vacuum = std::sqrt(g);
    for (auto& op : ops) op.n = 2;
    return KrausChannel::checked(2, std::move(ops), 1e-12);
}

// ---------------------------------------------------------------------------
// Embedding and composition
// ---------------------------------------------------------------------------

// A two-site channel attached to a pair of sites of a larger system.
struct PairChannel {
    int site_a = 0;  // plays the local role of site 0
    int site_b = 1;  // plays the local role of site 1
    KrausChannel two_site;
};

// Embeds each pair operator into the n-site subspace: the 2x2 block lands on
// rows/columns (site_a, site_b), and every other site keeps the operator's
// vacuum amplitude on its diagonal (the pair holds no excitation there).
inline KrausChannel embed_pair(int n, const PairChannel& pc) {
    if (pc.two_site.n != 2) throw DimensionMismatch("pair channel must act on two sites");
    if (pc.site_a < 0 || pc.site_a >= n || pc.site_b < 0 || pc.site_b >= n)
        throw IndexOutOfRange("pair site out of range");
    if (pc.site_a == pc.site_b) throw SameSite("pair sites must differ");

    const int i = pc.site_a;
    const int j = pc.site_b;
    std::vector<SubspaceKraus> ops;
    ops.reserve(pc.two_site.operators.size());
    for (const auto& op : pc.two_site.operators) {
        Matrix m = Matrix::Zero(n, n);
        m(i, i) = op.matrix(0, 0);
        m(i, j) = op.matrix(0, 1);
        m(j, i) = op.matrix(1, 0);
        m(j, j) = op.matrix(1, 1);
        for (int s = 0; s < n; ++s)
            if (s != i && s != j) m(s, s) = op.vacuum;
        SubspaceKraus out;
        out.n = n;
        out.matrix = std::move(m);
        out.classification = op.classification;
        if (op.classification == KrausClass::Hopping) {
            out.hop_to = op.hop_to == 0 ? i : j;
            out.hop_from = op.hop_from == 0 ? i : j;
        }
        // Re-derive the shape for dephasing entries that picked up support.
        if (op.classification != KrausClass::Hopping)
            out.classification = classify_subspace(out.matrix) == KrausClass::Coherent
                                     ? KrausClass::Coherent
                                     : op.classification;
        ops.push_back(std::move(out));
    }
    return KrausChannel::checked(n, std::move(ops), 1e-10);
}

// Composition `second after first`. Products with norm <= 1e-12 are dropped
// and mutually proportional products are merged (replacing {c_a M} by
// sqrt(sum |c_a|^2) M leaves the channel and the completeness sum unchanged).
// Throws ExplosionGuard when the raw product count would exceed `cap`.
inline KrausChannel compose(const KrausChannel& first, const KrausChannel& second,
                            std::size_t cap = 100000, double check_tol = 1e-9) {
    if (first.n != second.n) throw DimensionMismatch("cannot compose channels of different size");
    const int n = first.n;
    if (first.operators.size() * second.operators.size() > cap)
        throw ExplosionGuard("Kraus product count exceeds cap");

    std::vector<Matrix> reps;    // pivot-normalized representatives
    std::vector<double> weight2; // accumulated |coefficient|^2

    for (const auto& b : second.operators) {
        for (const auto& a : first.operators) {
            Matrix m = b.matrix * a.matrix;
            // Pivot: first entry of maximal modulus (row-major scan).
            int pr = 0, pc = 0;
            double pmag = 0.0;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    if (std::abs(m(r, c)) > pmag) {
                        pmag = std::abs(m(r, c));
                        pr = r;
                        pc = c;
                    }
            if (pmag <= 1e-12) continue;  // pruned
            Complex coeff = m(pr, pc);
            m /= coeff;
            bool merged = false;
            for (std::size_t idx = 0; idx < reps.size(); ++idx) {
                if ((reps[idx] - m).cwiseAbs().maxCoeff() <= 1e-12) {
                    weight2[idx] += std::norm(coeff);
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                reps.push_back(std::move(m));
                weight2.push_back(std::norm(coeff));
            }
        }
    }

    std::vector<SubspaceKraus> ops;
    ops.reserve(reps.size());
    for (std::size_t idx = 0; idx < reps.size(); ++idx)
        ops.push_back(SubspaceKraus::from_matrix(reps[idx] * std::sqrt(weight2[idx])));
    return KrausChannel::checked(n, std::move(ops), check_tol);
}

// Ordered Trotter product: m repetitions of the given pair channels, each
// already built at time slice t/m by the caller. The composed set is
// re-verified trace preserving within m * 1e-10.
inline KrausChannel trotter_compose(int n, const std::vector<PairChannel>& pairs, int m,
                                    std::size_t cap = 100000) {
    if (m < 1) throw InvalidState("trotter repetition count must be >= 1");
    std::vector<KrausChannel> embedded;
    embedded.reserve(pairs.size());
    for (const auto& pc : pairs) embedded.push_back(embed_pair(n, pc));

    const double tol = static_cast<double>(m) * 1e-10;
    KrausChannel acc = identity_channel(n);
    for (int rep = 0; rep < m; ++rep)
        for (const auto& ch : embedded) acc = compose(acc, ch, cap, tol);
    double defect = acc.completeness_defect();
    if (defect > tol)
        throw NotTracePreserving("Trotter composition lost trace preservation: defect " +
                                 std::to_string(defect));
    return acc;
}

// Superoperator view: the n^2 x n^2 matrix acting on column-major vec(rho).
inline Matrix superoperator(const KrausChannel& ch) {
    const int n = ch.n;
    Matrix s = Matrix::Zero(n * n, n * n);
    for (const auto& op : ch.operators) {
        const Matrix& f = op.matrix;
        Matrix fc = f.conjugate();
        for (int bc = 0; bc < n; ++bc)
            for (int br = 0; br < n; ++br)
                s.block(br * n, bc * n, n, n) += fc(br, bc) * f;
    }
    return s;
}

inline DensityMatrix apply_superoperator(const Matrix& s, const DensityMatrix& rho) {
    const int n = rho.n();
    Vector v = Eigen::Map<const Vector>(rho.entries().data(), n * n);
    Vector w = s * v;
    Matrix out = Eigen::Map<const Matrix>(w.data(), n, n);
    out = ((out + out.adjoint()) / 2.0).eval();
    double tr = out.trace().real();
    if (std::abs(tr) > 1e-12) out /= tr;
    return density_from_parts(std::move(out));
}

// ---------------------------------------------------------------------------
// Full-space operators and the locality decomposition
// ---------------------------------------------------------------------------

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

inline Matrix unit_identity() { return Matrix::Identity(2, 2); }
inline Matrix unit_sigma_z() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    return m;
}
inline Matrix unit_sigma_plus() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}
inline Matrix unit_sigma_minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}
inline Matrix unit_proj_ground() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    return m;
}
inline Matrix unit_proj_excited() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 1) = 1.0;
    return m;
}

// b * identity + d * sigma_z; conserves the excitation number of a unit.
inline Matrix unit_sigma_zero(Complex b, Complex d) {
    return b * unit_identity() + d * unit_sigma_z();
}

struct FullSpaceOperator {
    int n = 0;
    Matrix matrix;  // 2^n x 2^n in the product basis

    static FullSpaceOperator from_matrix(int n, Matrix m) {
        if (n < 1 || n > 8) throw DimensionTooLarge("full-space operators limited to n <= 8");
        const Eigen::Index dim = Eigen::Index(1) << n;
        if (m.rows() != dim || m.cols() != dim)
            throw DimensionMismatch("full-space matrix must be 2^n x 2^n");
        return {n, std::move(m)};
    }
};

// Operator acting as `op` on `site` and identity elsewhere.
inline FullSpaceOperator embed_single(int n, int site, const Matrix& op) {
    if (site < 0 || site >= n) throw IndexOutOfRange("site out of range");
    Matrix acc = Matrix::Identity(1, 1);
    for (int u = 0; u < n; ++u) acc = kron(acc, u == site ? op : unit_identity());
    return FullSpaceOperator::from_matrix(n, std::move(acc));
}

// Product over a list of (site, op) factors, identity on unlisted sites.
inline FullSpaceOperator embed_product(int n, const std::vector<std::pair<int, Matrix>>& factors) {
    Matrix acc = Matrix::Identity(1, 1);
    for (int u = 0; u < n; ++u) {
        const Matrix* chosen = nullptr;
        for (const auto& [site, op] : factors)
            if (site == u) chosen = &op;
        acc = kron(acc, chosen != nullptr ? *chosen : unit_identity());
    }
    return FullSpaceOperator::from_matrix(n, std::move(acc));
}

inline Matrix full_number_operator(int n) {
    const Eigen::Index dim = Eigen::Index(1) << n;
    Matrix m = Matrix::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        int count = 0;
        for (int u = 0; u < n; ++u)
            if ((b >> (n - 1 - u)) & 1) ++count;
        m(b, b) = static_cast<double>(count);
    }
    return m;
}

// Index of the basis state with only site i excited.
inline Eigen::Index excited_index(int n, int i) { return Eigen::Index(1) << (n - 1 - i); }

// Restriction of a full-space operator to the single-excitation subspace.
inline Matrix subspace_restriction(const FullSpaceOperator& op) {
    Matrix s(op.n, op.n);
    for (int a = 0; a < op.n; ++a)
        for (int b = 0; b < op.n; ++b)
            s(a, b) = op.matrix(excited_index(op.n, a), excited_index(op.n, b));
    return s;
}

enum class FactorKind { Sigma0, SigmaPlus, SigmaMinus };

struct FullSpaceDecomposition {
    bool is_excitation_conserving = false;
    bool is_local_product = false;
    std::vector<Matrix> factors;           // one 2x2 factor per unit when local
    std::vector<FactorKind> factor_kinds;  // classification of each factor
    // Rank of the stacked pair {ground block, excited block} at the first
    // cut: 1 when the blocks are proportional (product-compatible sigma_0
    // branch), 2 otherwise.
    int first_cut_block_rank = 0;
};

namespace detail {

inline constexpr double kBlockZeroTol = 1e-12;
inline constexpr double kBlockPropTol = 1e-10;

// Recursive locality test over the remaining units; appends the factors.
inline bool factorize_local(const Matrix& m, int units, std::vector<Matrix>& factors,
                            std::vector<FactorKind>& kinds) {
    if (m.cwiseAbs().maxCoeff() <= kBlockZeroTol) {
        // Zero operator: trivially a product of zeros.
        for (int u = 0; u < units; ++u) {
            factors.push_back(Matrix::Zero(2, 2));
            kinds.push_back(FactorKind::Sigma0);
        }
        return true;
    }
    if (units == 1) {
        const bool d00 = std::abs(m(0, 0)) > kBlockZeroTol;
        const bool d11 = std::abs(m(1, 1)) > kBlockZeroTol;
        const bool lo = std::abs(m(1, 0)) > kBlockZeroTol;
        const bool hi = std::abs(m(0, 1)) > kBlockZeroTol;
        if (!lo && !hi) {
            factors.push_back(m);
            kinds.push_back(FactorKind::Sigma0);
            return true;
        }
        if (lo && !hi && !d00 && !d11) {
            factors.push_back(m);
            kinds.push_back(FactorKind::SigmaPlus);
            return true;
        }
        if (hi && !lo && !d00 && !d11) {
            factors.push_back(m);
            kinds.push_back(FactorKind::SigmaMinus);
            return true;
        }
        return false;
    }

    const Eigen::Index h = m.rows() / 2;
    Matrix b00 = m.block(0, 0, h, h);
    Matrix b01 = m.block(0, h, h, h);
    Matrix b10 = m.block(h, 0, h, h);
    Matrix b11 = m.block(h, h, h, h);
    const double n00 = b00.cwiseAbs().maxCoeff();
    const double n01 = b01.cwiseAbs().maxCoeff();
    const double n10 = b10.cwiseAbs().maxCoeff();
    const double n11 = b11.cwiseAbs().maxCoeff();

    if (n01 <= kBlockZeroTol && n10 <= kBlockZeroTol) {
        // sigma_0 branch: diagonal blocks must be proportional.
        if (n00 <= kBlockZeroTol) {
            Matrix f = Matrix::Zero(2, 2);
            f(1, 1) = 1.0;
            factors.push_back(std::move(f));
            kinds.push_back(FactorKind::Sigma0);
            return factorize_local(b11, units - 1, factors, kinds);
        }
        if (n11 <= kBlockZeroTol) {
            Matrix f = Matrix::Zero(2, 2);
            f(0, 0) = 1.0;
            factors.push_back(std::move(f));
            kinds.push_back(FactorKind::Sigma0);
            return factorize_local(b00, units - 1, factors, kinds);
        }
        Eigen::Index pr = 0, pc = 0;
        b00.cwiseAbs().maxCoeff(&pr, &pc);
        const Complex c = b11(pr, pc) / b00(pr, pc);
        if ((b11 - c * b00).cwiseAbs().maxCoeff() > kBlockPropTol * std::max(n00, n11))
            return false;
        Matrix f = Matrix::Zero(2, 2);
        f(0, 0) = 1.0;
        f(1, 1) = c;
        factors.push_back(std::move(f));
        kinds.push_back(FactorKind::Sigma0);
        return factorize_local(b00, units - 1, factors, kinds);
    }
    if (n10 > kBlockZeroTol && n01 <= kBlockZeroTol && n00 <= kBlockZeroTol &&
        n11 <= kBlockZeroTol) {
        factors.push_back(unit_sigma_plus());
        kinds.push_back(FactorKind::SigmaPlus);
        return factorize_local(b10, units - 1, factors, kinds);
    }
    if (n01 > kBlockZeroTol && n10 <= kBlockZeroTol && n00 <= kBlockZeroTol &&
        n11 <= kBlockZeroTol) {
        factors.push_back(unit_sigma_minus());
        kinds.push_back(FactorKind::SigmaMinus);
        return factorize_local(b01, units - 1, factors, kinds);
    }
    return false;
}

}  // namespace detail

// Tests excitation conservation (commutation with the total number operator)
// and locality (recursive block factorization into sigma_0 / sigma_+ /
// sigma_- unit factors). When local, the factors multiply back to the input:
// kron(factors...) == matrix.
inline FullSpaceDecomposition decompose_full(const FullSpaceOperator& op) {
    if (op.n > 8) throw DimensionTooLarge("decompose_full limited to n <= 8");
    FullSpaceDecomposition out;

    Matrix num = full_number_operator(op.n);
    out.is_excitation_conserving =
        (op.matrix * num - num * op.matrix).cwiseAbs().maxCoeff() <= 1e-10;

    const Eigen::Index h = op.matrix.rows() / 2;
    Matrix b00 = op.matrix.block(0, 0, h, h);
    Matrix b11 = op.matrix.block(h, h, h, h);
    Matrix stacked(2, h * h);
    stacked.row(0) = Eigen::Map<const Vector>(b00.data(), h * h).transpose();
    stacked.row(1) = Eigen::Map<const Vector>(b11.data(), h * h).transpose();
    Eigen::JacobiSVD<Matrix> svd(stacked);
    const auto& sv = svd.singularValues();
    if (sv(0) > detail::kBlockZeroTol) {
        out.first_cut_block_rank = 1;
        if (sv.size() > 1 && sv(1) > detail::kBlockPropTol * sv(0)) out.first_cut_block_rank = 2;
    }

    out.is_local_product =
        detail::factorize_local(op.matrix, op.n, out.factors, out.factor_kinds);
    if (!out.is_local_product) {
        out.factors.clear();
        out.factor_kinds.clear();
    }
    return out;
}

}  // namespace cohmeter
