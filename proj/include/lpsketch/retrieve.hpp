#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <optional>

#include "lpsketch/errors.hpp"
#include "lpsketch/lp_model.hpp"
#include "lpsketch/project.hpp"
#include "lpsketch/rng.hpp"
#include "lpsketch/sketch.hpp"
#include "lpsketch/solver.hpp"

namespace lpsketch {

enum class RetrievalMethod { BasisAlg2, Pseudoinverse };

inline const char* to_string(RetrievalMethod m) {
    return m == RetrievalMethod::BasisAlg2 ? "basis_alg2" : "pseudoinverse";
}

struct RetrievalReport {
    Vector x;
    RetrievalMethod method = RetrievalMethod::Pseudoinverse;
    std::vector<Index> basis_used;
    QualityMetrics metrics;       // against the original instance
    bool has_reference = false;   // obj metric uses a known optimal value
    bool dual_lift_feasible = false;
    bool singular_basis = false;  // Alg. 2 fell back to least squares
    bool rank_deficient = false;  // pseudoinverse fell back to min-norm LS
    double condition_estimate = 0.0;
    double z_gap = 0.0;           // spread between the m-th and (m+1)-th z value
    double projected_objective = 0.0;
};

// y_prox = T' y_T
inline Vector dual_lift(const Projector& T, const Vector& y_T) {
    if (y_T.size() != T.k)
        throw DimensionMismatch("dual length must equal projector row count");
    return T.entries.transpose() * y_T;
}

namespace detail {

inline void fill_metrics(RetrievalReport& rep, const StandardFormLp& lp,
                         std::optional<double> reference_objective) {
    const double v_cand = lp.c.dot(rep.x);
    if (reference_objective) {
        rep.metrics = quality_metrics(lp, rep.x, *reference_objective, v_cand);
        rep.has_reference = true;
    } else {
        rep.metrics = quality_metrics(lp, rep.x, v_cand, v_cand);
        rep.has_reference = false;
    }
}

}  // namespace detail

// Picks the m columns whose scaled dual slacks z_j = (c_j - A_j'y) / |A_j|
// are smallest (ties to the lower index) and solves the square system on
// them. A numerically singular pick is reported and answered by least
// squares instead of failing.
inline RetrievalReport retrieve_basis_alg2(const StandardFormLp& lp, const Vector& y_prox,
                                           std::optional<double> reference_objective =
                                               std::nullopt) {
    lp.validate();
    if (y_prox.size() != lp.rows())
        throw DimensionMismatch("y_prox length must equal row count");
    const Index m = lp.rows(), n = lp.cols();

    Vector z(n);
    for (Index j = 0; j < n; ++j) {
        const double nrm = lp.A.col(j).norm();
        if (nrm == 0.0) throw ZeroColumn(static_cast<long>(j));
        z(j) = (lp.c(j) - lp.A.col(j).dot(y_prox)) / nrm;
    }

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return z(a) < z(b); });

    RetrievalReport rep;
    rep.method = RetrievalMethod::BasisAlg2;
    rep.basis_used.assign(order.begin(), order.begin() + m);
    std::sort(rep.basis_used.begin(), rep.basis_used.end());
    rep.z_gap = m < n ? z(order[static_cast<std::size_t>(m)]) -
                            z(order[static_cast<std::size_t>(m - 1)])
                      : 0.0;

    Matrix AB(m, m);
    for (Index i = 0; i < m; ++i) AB.col(i) = lp.A.col(rep.basis_used[static_cast<std::size_t>(i)]);

    Eigen::JacobiSVD<Matrix> svd(AB, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(m - 1);
    rep.condition_estimate = smin > 0.0 ? smax / smin
                                        : std::numeric_limits<double>::infinity();

    Vector xB;
    if (rep.condition_estimate > 1e12) {
        rep.singular_basis = true;
        xB = svd.solve(lp.b);  // least-squares fallback
    } else {
        xB = AB.partialPivLu().solve(lp.b);
    }

    rep.x = Vector::Zero(n);
    for (Index i = 0; i < m; ++i) rep.x(rep.basis_used[static_cast<std::size_t>(i)]) = xB(i);
    rep.dual_lift_feasible = ((lp.A.transpose() * y_prox - lp.c).array() <= 1e-8).all();
    detail::fill_metrics(rep, lp, reference_objective);
    return rep;
}

// Least-squares reconstruction on the columns H: the solution of the
// normal equations A_H'A_H x_H = A_H'b, with zero fill outside H. A rank
// deficient A_H is answered by the minimum-norm solution and flagged.
inline RetrievalReport retrieve_pseudoinverse(const StandardFormLp& lp,
                                              const std::vector<Index>& H,
                                              std::optional<double> reference_objective =
                                                  std::nullopt) {
    lp.validate();
    if (H.empty()) throw DimensionMismatch("basis H must be nonempty");
    for (Index j : H)
        if (j < 0 || j >= lp.cols())
            throw DimensionMismatch("basis H contains an out-of-range column");

    const Index m = lp.rows();
    const Index h = static_cast<Index>(H.size());
    Matrix AH(m, h);
    for (Index i = 0; i < h; ++i) AH.col(i) = lp.A.col(H[static_cast<std::size_t>(i)]);

    RetrievalReport rep;
    rep.method = RetrievalMethod::Pseudoinverse;
    rep.basis_used = H;
    std::sort(rep.basis_used.begin(), rep.basis_used.end());

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(AH);
    cod.setThreshold(1e-12);
    rep.rank_deficient = cod.rank() < std::min(m, h);
    Vector xH = cod.solve(lp.b);  // least squares; min-norm when rank deficient

    rep.x = Vector::Zero(lp.cols());
    for (Index i = 0; i < h; ++i) rep.x(H[static_cast<std::size_t>(i)]) += xH(i);
    detail::fill_metrics(rep, lp, reference_objective);
    return rep;
}

struct PipelineOptions {
    ProjectorKind kind = ProjectorKind::Sparse;
    double q = 1.0 / 6.0;
    std::optional<Index> k_override;
};

// normalize -> pick k -> sample T -> project -> solve projected ->
// retrieve -> denormalize -> metrics against the original instance.
// Deterministic given master_seed.
inline RetrievalReport full_pipeline(const StandardFormLp& lp, double epsilon,
                                     RetrievalMethod method, std::uint64_t master_seed,
                                     std::optional<double> reference_objective =
                                         std::nullopt,
                                     const PipelineOptions& opts = {}) {
    auto norm = normalize(lp);
    const Index m = lp.rows(), n = lp.cols();
    const Index k = opts.k_override ? *opts.k_override : projected_dimension(n, epsilon);
    auto T = sample_projector(opts.kind, k, m, derive_seed(master_seed, 0), opts.q);

    SolveResult prj;
    bool budgeted = false;
    if (lp.theta) {
        // The budget speaks about original variables; in normalized
        // coordinates the row carries weights |b| / |A_j|.
        budgeted = true;
        Matrix PA = apply(T, norm.lp.A);
        Vector pb = apply(T, norm.lp.b);
        Matrix A2(k + 1, n + 1);
        A2.topLeftCorner(k, n) = PA;
        A2.topRightCorner(k, 1).setZero();
        for (Index j = 0; j < n; ++j)
            A2(k, j) = norm.rhs_scale / norm.column_scales(j);
        A2(k, n) = 1.0;
        Vector b2(k + 1);
        b2.head(k) = pb;
        b2(k) = *lp.theta;
        Vector c2 = Vector::Zero(n + 1);
        c2.head(n) = norm.lp.c;
        prj = solve(make_lp(c2, A2, b2));
    } else {
        prj = solve(project_lp(norm.lp, T).projected);
    }

    if (prj.status == SolveStatus::Infeasible)
        throw InfeasibleProjection("projected problem is infeasible");
    if (prj.status != SolveStatus::Optimal)
        throw NumericalFailure("projected problem is unbounded");

    Vector y_T = budgeted ? Vector(prj.y.head(k)) : prj.y;
    Vector y_prox = dual_lift(T, y_T) / norm.rhs_scale;

    RetrievalReport rep;
    if (method == RetrievalMethod::Pseudoinverse) {
        std::vector<Index> H;
        for (Index j : prj.basis)
            if (j < n) H.push_back(j);  // budget slack has no original column
        if (H.empty()) throw NumericalFailure("projected basis has no original columns");
        rep = retrieve_pseudoinverse(lp, H, reference_objective);
        rep.dual_lift_feasible =
            ((lp.A.transpose() * y_prox - lp.c).array() <= 1e-8).all();
    } else {
        rep = retrieve_basis_alg2(lp, y_prox, reference_objective);
    }
    rep.projected_objective = prj.objective;
    return rep;
}

// The raw optimum of the projected problem mapped back to original
// variables, with no retrieval step. Used to observe that it misses the
// original constraints.
inline Vector raw_projected_solution(const StandardFormLp& lp, double epsilon,
                                     std::uint64_t master_seed,
                                     const PipelineOptions& opts = {}) {
    auto norm = normalize(lp);
    const Index k =
        opts.k_override ? *opts.k_override : projected_dimension(lp.cols(), epsilon);
    auto T = sample_projector(opts.kind, k, lp.rows(), derive_seed(master_seed, 0), opts.q);
    auto prj = solve(project_lp(norm.lp, T).projected);
    if (prj.status == SolveStatus::Infeasible)
        throw InfeasibleProjection("projected problem is infeasible");
    if (prj.status != SolveStatus::Optimal)
        throw NumericalFailure("projected problem is unbounded");
    return denormalize_solution(prj.x, norm);
}

inline void to_json(nlohmann::json& j, const RetrievalReport& rep) {
    j = nlohmann::json{
        {"method", to_string(rep.method)},
        {"x", std::vector<double>(rep.x.data(), rep.x.data() + rep.x.size())},
        {"basis_used", rep.basis_used},
        {"metrics",
         {{"feas", rep.metrics.feas},
          {"neg", rep.metrics.neg},
          {"obj", rep.metrics.obj},
          {"obj_absolute_gap", rep.metrics.obj_absolute_gap}}},
        {"has_reference", rep.has_reference},
        {"dual_lift_feasible", rep.dual_lift_feasible},
        {"singular_basis", rep.singular_basis},
        {"rank_deficient", rep.rank_deficient},
        {"condition_estimate", rep.condition_estimate},
        {"z_gap", rep.z_gap},
        {"projected_objective", rep.projected_objective}};
}

}  // namespace lpsketch
