#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lpsketch/errors.hpp"
#include "lpsketch/lp_model.hpp"
#include "lpsketch/rng.hpp"

namespace lpsketch {

enum class ProjectorKind { Gaussian, Rademacher, Sparse, GaussianOrthogonal };

inline const char* to_string(ProjectorKind k) {
    switch (k) {
        case ProjectorKind::Gaussian: return "gaussian";
        case ProjectorKind::Rademacher: return "rademacher";
        case ProjectorKind::Sparse: return "sparse";
        case ProjectorKind::GaussianOrthogonal: return "gaussian_orthogonal";
    }
    return "unknown";
}

inline ProjectorKind projector_kind_from_string(const std::string& s) {
    if (s == "gaussian") return ProjectorKind::Gaussian;
    if (s == "rademacher") return ProjectorKind::Rademacher;
    if (s == "sparse") return ProjectorKind::Sparse;
    if (s == "gaussian_orthogonal") return ProjectorKind::GaussianOrthogonal;
    throw Error("unknown projector kind: " + s);
}

// A k x m random map with E|Ty|^2 = |y|^2 for every fixed y. Entries hold
// the raw sample times the scale factor: 1/sqrt(k) for gaussian and
// rademacher, 1/sqrt(2qk) for sparse, sqrt(m/k) on orthonormal rows for
// gaussian_orthogonal. Entries regenerate bit-identically from
// (kind, q, k, m, seed).
struct Projector {
    ProjectorKind kind = ProjectorKind::Gaussian;
    double q = 0.0;  // sparse only: P(+1) = P(-1) = q
    Index k = 0;
    Index m = 0;
    std::uint64_t seed = 0;
    Matrix entries;
};

// k = ceil(1.8/eps^2 * ln n) + 1
inline Index projected_dimension(Index n, double epsilon) {
    if (n < 2) throw BadEpsilon("projected_dimension requires n >= 2");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw BadEpsilon("epsilon must lie in (0,1)");
    return static_cast<Index>(
               std::ceil(1.8 / (epsilon * epsilon) * std::log(static_cast<double>(n)))) +
           1;
}

inline Projector sample_projector(ProjectorKind kind, Index k, Index m,
                                  std::uint64_t seed, double q = 1.0 / 6.0) {
    if (k < 1 || m < 1) throw DimensionMismatch("projector needs k >= 1, m >= 1");
    if (kind == ProjectorKind::Sparse && !(q > 0.0 && q <= 0.5))
        throw BadSparsity("sparse parameter q must lie in (0, 1/2]");

    Projector T;
    T.kind = kind;
    T.q = kind == ProjectorKind::Sparse ? q : 0.0;
    T.k = k;
    T.m = m;
    T.seed = seed;
    T.entries.resize(k, m);

    auto eng = make_engine(seed);
    switch (kind) {
        case ProjectorKind::Gaussian: {
            std::normal_distribution<double> normal(0.0, 1.0);
            const double scale = 1.0 / std::sqrt(static_cast<double>(k));
            for (Index i = 0; i < k; ++i)
                for (Index j = 0; j < m; ++j) T.entries(i, j) = scale * normal(eng);
            break;
        }
        case ProjectorKind::Rademacher: {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            const double scale = 1.0 / std::sqrt(static_cast<double>(k));
            for (Index i = 0; i < k; ++i)
                for (Index j = 0; j < m; ++j)
                    T.entries(i, j) = unif(eng) < 0.5 ? scale : -scale;
            break;
        }
        case ProjectorKind::Sparse: {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            const double scale = 1.0 / std::sqrt(2.0 * q * static_cast<double>(k));
            for (Index i = 0; i < k; ++i) {
                for (Index j = 0; j < m; ++j) {
                    const double u = unif(eng);
                    T.entries(i, j) = u < q ? scale : (u < 2.0 * q ? -scale : 0.0);
                }
            }
            break;
        }
        case ProjectorKind::GaussianOrthogonal: {
            // Orthonormal rows from the QR factorization of a gaussian
            // sample, scaled so unit vectors keep unit expected square norm.
            std::normal_distribution<double> normal(0.0, 1.0);
            Matrix raw(k, m);
            for (Index i = 0; i < k; ++i)
                for (Index j = 0; j < m; ++j) raw(i, j) = normal(eng);
            if (k > m)
                throw DimensionMismatch("gaussian_orthogonal requires k <= m");
            Eigen::HouseholderQR<Matrix> qr(raw.transpose());
            Matrix thinQ = qr.householderQ() * Matrix::Identity(m, k);
            T.entries = std::sqrt(static_cast<double>(m) / static_cast<double>(k)) *
                        thinQ.transpose();
            break;
        }
    }
    return T;
}

template <typename Derived>
auto apply(const Projector& T, const Eigen::MatrixBase<Derived>& M) {
    if (M.rows() != T.m)
        throw DimensionMismatch("projector expects " + std::to_string(T.m) +
                                " rows, got " + std::to_string(M.rows()));
    return (T.entries * M).eval();
}

// Block map [[I_h, 0], [0, T]]: leaves the first h rows of a stacked
// matrix unchanged and projects the rest.
inline Matrix extended_projector(const Projector& T, Index h) {
    if (h < 0) throw DimensionMismatch("block size must be nonnegative");
    Matrix E = Matrix::Zero(h + T.k, h + T.m);
    E.topLeftCorner(h, h).setIdentity();
    E.bottomRightCorner(T.k, T.m) = T.entries;
    return E;
}

struct DistortionStats {
    double epsilon = 0.0;
    std::size_t n_pairs = 0;
    double fraction_within = 0.0;           // pairwise distances inside (1 +- eps)
    double max_relative_error = 0.0;        // worst |d' - d| / d over pairs
    double inner_product_max_violation = 0.0;    // max |<Tu,Tv> - <u,v>| / (|u||v|)
    double inner_product_fraction_within = 0.0;  // deviations <= eps |u||v|
};

inline DistortionStats distortion_stats(const Projector& T,
                                        const std::vector<Vector>& points,
                                        double epsilon) {
    if (points.size() < 2) throw DimensionMismatch("need at least two points");
    for (const auto& p : points)
        if (p.size() != T.m) throw DimensionMismatch("point length must equal T.m");

    std::vector<Vector> proj;
    proj.reserve(points.size());
    for (const auto& p : points) proj.push_back(apply(T, p));

    DistortionStats s;
    s.epsilon = epsilon;
    std::size_t within = 0, ip_within = 0, ip_pairs = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            ++s.n_pairs;
            const double d = (points[i] - points[j]).norm();
            const double dp = (proj[i] - proj[j]).norm();
            if (d == 0.0) {
                ++within;
            } else {
                if ((1.0 - epsilon) * d <= dp && dp <= (1.0 + epsilon) * d) ++within;
                s.max_relative_error =
                    std::max(s.max_relative_error, std::abs(dp - d) / d);
            }

            const double nu = points[i].norm(), nv = points[j].norm();
            if (nu > 0.0 && nv > 0.0) {
                ++ip_pairs;
                const double dev =
                    std::abs(proj[i].dot(proj[j]) - points[i].dot(points[j])) /
                    (nu * nv);
                s.inner_product_max_violation =
                    std::max(s.inner_product_max_violation, dev);
                if (dev <= epsilon) ++ip_within;
            }
        }
    }
    s.fraction_within = static_cast<double>(within) / static_cast<double>(s.n_pairs);
    s.inner_product_fraction_within =
        ip_pairs == 0 ? 1.0
                      : static_cast<double>(ip_within) / static_cast<double>(ip_pairs);
    return s;
}

// Entries are never stored; they regenerate from the seed.
inline void to_json(nlohmann::json& j, const Projector& T) {
    j = nlohmann::json{
        {"kind", to_string(T.kind)}, {"q", T.q}, {"k", T.k}, {"m", T.m}, {"seed", T.seed}};
}

inline void from_json(const nlohmann::json& j, Projector& T) {
    const auto kind = projector_kind_from_string(j.at("kind").get<std::string>());
    const double q = j.value("q", 1.0 / 6.0);
    T = sample_projector(kind, j.at("k").get<Index>(), j.at("m").get<Index>(),
                         j.at("seed").get<std::uint64_t>(),
                         kind == ProjectorKind::Sparse ? q : 1.0 / 6.0);
}

inline void to_json(nlohmann::json& j, const DistortionStats& s) {
    j = nlohmann::json{{"epsilon", s.epsilon},
                       {"n_pairs", s.n_pairs},
                       {"fraction_within", s.fraction_within},
                       {"max_relative_error", s.max_relative_error},
                       {"inner_product_max_violation", s.inner_product_max_violation},
                       {"inner_product_fraction_within", s.inner_product_fraction_within}};
}

}  // namespace lpsketch
