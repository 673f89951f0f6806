#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpsketch/errors.hpp"
#include "lpsketch/lp_model.hpp"
#include "lpsketch/rng.hpp"
#include "lpsketch/sketch.hpp"
#include "lpsketch/solver.hpp"

namespace lpsketch {

using BitVector = std::vector<int>;

// Fixed-width codec: 7 bits per character, big endian. Exact round trip.
inline BitVector text_to_bits(const std::string& s) {
    BitVector bits;
    bits.reserve(s.size() * 7);
    for (unsigned char c : s) {
        if (c > 127) throw NonAscii("character outside 7-bit range");
        for (int bit = 6; bit >= 0; --bit) bits.push_back((c >> bit) & 1);
    }
    return bits;
}

inline std::string bits_to_text(const BitVector& bits) {
    if (bits.size() % 7 != 0)
        throw BadLength("bit count must be divisible by 7");
    std::string s;
    s.reserve(bits.size() / 7);
    for (std::size_t i = 0; i < bits.size(); i += 7) {
        int c = 0;
        for (int bit = 0; bit < 7; ++bit) c = (c << 1) | bits[i + bit];
        s.push_back(static_cast<char>(c));
    }
    return s;
}

// Compact codec: each character as its binary value without leading
// zeros (a space takes 6 bits, letters take 7). This is the packing whose
// bit counts the published experiments quote; it is not self-delimiting,
// so decoding needs the per-character widths of the sent text.
inline int compact_bit_length(unsigned char c) {
    int len = 1;
    while (c >>= 1) ++len;
    return len;
}

inline BitVector text_to_bits_compact(const std::string& s) {
    BitVector bits;
    for (unsigned char c : s) {
        if (c > 127) throw NonAscii("character outside 7-bit range");
        const int len = compact_bit_length(c);
        for (int bit = len - 1; bit >= 0; --bit) bits.push_back((c >> bit) & 1);
    }
    return bits;
}

inline std::string bits_to_text_compact(const BitVector& bits,
                                        const std::string& reference) {
    std::string out;
    std::size_t pos = 0;
    for (unsigned char c : reference) {
        const int len = compact_bit_length(c);
        if (pos + static_cast<std::size_t>(len) > bits.size())
            throw BadLength("bit stream shorter than the reference profile");
        int v = 0;
        for (int bit = 0; bit < len; ++bit) v = (v << 1) | bits[pos++];
        out.push_back(static_cast<char>(v));
    }
    if (pos != bits.size())
        throw BadLength("bit stream longer than the reference profile");
    return out;
}

// Codeword map z = Qw with an m x n parity matrix A satisfying AQ = 0.
// A is built as G N' where N spans the left null space of Q, so its rank
// is n - m by construction.
struct EccCode {
    Index m = 0;  // message bits
    Index n = 0;  // codeword length
    Matrix Q;     // n x m, full column rank
    Matrix A;     // m x n, AQ = 0
    std::uint64_t seed = 0;
};

struct NoiseModel {
    double delta = 0.5;  // amplitude bound
    double rate = 0.1;   // per-character corruption probability
    std::uint64_t seed = 0;

    void validate() const {
        if (!(delta > 0.0)) throw Error("noise delta must be positive");
        if (!(rate >= 0.0 && rate <= 1.0)) throw Error("noise rate must lie in [0,1]");
    }
};

inline EccCode make_code(Index m, Index n, std::uint64_t seed) {
    if (!(1 <= m && m < n)) throw DimensionMismatch("code needs 1 <= m < n");

    auto eng = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < 3; ++attempt) {
        Matrix Q(n, m);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < m; ++j) Q(i, j) = normal(eng);

        Eigen::BDCSVD<Matrix> svd(Q);
        const auto& sv = svd.singularValues();
        if (!(sv(m - 1) > 1e-9 * sv(0))) continue;

        Eigen::HouseholderQR<Matrix> qr(Q);
        Matrix full = qr.householderQ();
        Matrix N = full.rightCols(n - m);  // orthonormal, N'Q = 0

        Matrix G(m, n - m);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < n - m; ++j) G(i, j) = normal(eng);

        EccCode code;
        code.m = m;
        code.n = n;
        code.Q = std::move(Q);
        code.A = G * N.transpose();
        code.seed = seed;
        if ((code.A * code.Q).cwiseAbs().maxCoeff() > 1e-9)
            throw NumericalFailure("parity construction lost orthogonality");
        return code;
    }
    throw RankFailure("encoding matrix stayed rank deficient after 3 resamples");
}

inline Vector encode(const EccCode& code, const BitVector& w) {
    if (static_cast<Index>(w.size()) != code.m)
        throw DimensionMismatch("message length must equal code.m");
    Vector wr(code.m);
    for (Index i = 0; i < code.m; ++i) wr(i) = static_cast<double>(w[static_cast<std::size_t>(i)]);
    return code.Q * wr;
}

// Each component independently gains Uniform[-delta, delta] with
// probability rate. The draw sequence depends only on the seed, never on
// z, so two codewords under the same seed receive the identical error
// vector.
inline Vector add_noise(const Vector& z, const NoiseModel& noise) {
    noise.validate();
    auto eng = make_engine(noise.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_real_distribution<double> amp(-noise.delta, noise.delta);
    Vector out = z;
    for (Index i = 0; i < z.size(); ++i)
        if (unif(eng) < noise.rate) out(i) += amp(eng);
    return out;
}

struct DecodeDiagnostics {
    double l1_norm = 0.0;
    Index nonzeros = 0;
    double solve_seconds = 0.0;
    Index parity_rank = 0;  // rank of the (possibly projected) parity system
    Index clamped = 0;      // recovered components outside [-0.5, 1.5]
    Index rows = 0;         // parity rows actually solved against
};

// min |x|_1 subject to Ax = A z_bar, via the positive/negative split; with
// a projector only the equality block is projected. The error estimate x
// gives z' = z_bar - x and w = round((Q'Q)^{-1} Q' z').
inline std::pair<BitVector, DecodeDiagnostics> decode(
    const EccCode& code, const Vector& z_bar,
    const std::optional<Projector>& projector = std::nullopt) {
    if (z_bar.size() != code.n)
        throw DimensionMismatch("received word length must equal code.n");

    Vector b = code.A * z_bar;
    Matrix M;
    Vector rhs;
    if (projector) {
        if (projector->m != code.m)
            throw DimensionMismatch("projector must act on the parity rows");
        M = apply(*projector, code.A);
        rhs = apply(*projector, b);
    } else {
        M = code.A;
        rhs = b;
    }

    const Index rows = M.rows(), n = code.n;
    Matrix Asplit(rows, 2 * n);
    Asplit.leftCols(n) = M;
    Asplit.rightCols(n) = -M;

    const auto t0 = std::chrono::steady_clock::now();
    auto res = solve(make_lp(Vector::Ones(2 * n), Asplit, rhs));
    DecodeDiagnostics diag;
    diag.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (res.status != SolveStatus::Optimal)
        throw NumericalFailure("l1 decoding program did not reach an optimum");

    Vector x = res.x.head(n) - res.x.tail(n);
    diag.l1_norm = x.lpNorm<1>();
    diag.nonzeros = (x.cwiseAbs().array() > 1e-7).count();
    diag.rows = rows;
    Eigen::ColPivHouseholderQR<Matrix> mqr(M);
    mqr.setThreshold(1e-10);
    diag.parity_rank = mqr.rank();

    Vector zprime = z_bar - x;
    Vector w_real = code.Q.colPivHouseholderQr().solve(zprime);
    BitVector w(static_cast<std::size_t>(code.m));
    for (Index i = 0; i < code.m; ++i) {
        const double v = w_real(i);
        if (v < -0.5 || v > 1.5) ++diag.clamped;
        w[static_cast<std::size_t>(i)] = v >= 0.5 ? 1 : 0;
    }
    return {std::move(w), diag};
}

enum class EccEncoding { Compact, Fixed7 };

inline const char* to_string(EccEncoding e) {
    return e == EccEncoding::Compact ? "compact" : "fixed7";
}

struct EccRunReport {
    bool bits_recovered = false;
    bool text_recovered = false;
    int bit_errors = 0;
    std::string text;
    double solve_seconds = 0.0;
    double total_seconds = 0.0;
    DecodeDiagnostics diagnostics;
};

struct EccDemoReport {
    std::string sent_text;
    EccEncoding encoding = EccEncoding::Compact;
    Index m = 0, n = 0, k = 0;
    double q = 0.01, rate = 0.0, delta = 0.0;
    std::uint64_t seed = 0;
    EccRunReport unprojected;
    EccRunReport projected;
};

// End-to-end demo: encode -> sparse noise -> decode twice (plain and
// projected parity system). The code length follows the published
// redundancy policy n = round(m / 0.91).
inline EccDemoReport run_ecc_demo(const std::string& text, const NoiseModel& noise,
                                  std::optional<Index> k_override, double epsilon,
                                  double q, std::uint64_t seed,
                                  EccEncoding encoding = EccEncoding::Compact) {
    if (text.empty()) throw BadLength("text must be nonempty");
    noise.validate();

    EccDemoReport rep;
    rep.sent_text = text;
    rep.encoding = encoding;
    rep.q = q;
    rep.rate = noise.rate;
    rep.delta = noise.delta;
    rep.seed = seed;

    const BitVector sent = encoding == EccEncoding::Compact ? text_to_bits_compact(text)
                                                            : text_to_bits(text);
    const Index m = static_cast<Index>(sent.size());
    Index n = static_cast<Index>(std::llround(static_cast<double>(m) / 0.91));
    if (n <= m) n = m + 1;
    rep.m = m;
    rep.n = n;

    auto code = make_code(m, n, derive_seed(seed, 0));
    Vector z = encode(code, sent);
    NoiseModel channel = noise;
    channel.seed = derive_seed(seed, 1);
    Vector z_bar = add_noise(z, channel);

    auto run = [&](const std::optional<Projector>& T) {
        EccRunReport r;
        const auto t0 = std::chrono::steady_clock::now();
        auto [bits, diag] = decode(code, z_bar, T);
        r.total_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.solve_seconds = diag.solve_seconds;
        r.diagnostics = diag;
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i] != sent[i]) ++r.bit_errors;
        r.bits_recovered = r.bit_errors == 0;
        r.text = encoding == EccEncoding::Compact ? bits_to_text_compact(bits, text)
                                                  : bits_to_text(bits);
        r.text_recovered = r.text == text;
        return r;
    };

    rep.unprojected = run(std::nullopt);

    rep.k = k_override ? *k_override : projected_dimension(n, epsilon);
    auto T = sample_projector(ProjectorKind::Sparse, rep.k, m, derive_seed(seed, 2), q);
    rep.projected = run(T);
    return rep;
}

inline void to_json(nlohmann::json& j, const DecodeDiagnostics& d) {
    j = nlohmann::json{{"l1_norm", d.l1_norm},       {"nonzeros", d.nonzeros},
                       {"solve_seconds", d.solve_seconds}, {"parity_rank", d.parity_rank},
                       {"clamped", d.clamped},       {"rows", d.rows}};
}

inline void to_json(nlohmann::json& j, const EccRunReport& r) {
    j = nlohmann::json{{"bits_recovered", r.bits_recovered},
                       {"text_recovered", r.text_recovered},
                       {"bit_errors", r.bit_errors},
                       {"text", r.text},
                       {"solve_seconds", r.solve_seconds},
                       {"total_seconds", r.total_seconds},
                       {"diagnostics", r.diagnostics}};
}

inline void to_json(nlohmann::json& j, const EccDemoReport& rep) {
    j = nlohmann::json{{"sent_text", rep.sent_text},
                       {"encoding", to_string(rep.encoding)},
                       {"m", rep.m},
                       {"n", rep.n},
                       {"k", rep.k},
                       {"q", rep.q},
                       {"rate", rep.rate},
                       {"delta", rep.delta},
                       {"seed", rep.seed},
                       {"unprojected", rep.unprojected},
                       {"projected", rep.projected}};
}

}  // namespace lpsketch
