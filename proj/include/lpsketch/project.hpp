#pragma once

#include <cmath>
#include <ostream>
#include <random>

#include "lpsketch/errors.hpp"
#include "lpsketch/lp_model.hpp"
#include "lpsketch/rng.hpp"
#include "lpsketch/sketch.hpp"
#include "lpsketch/solver.hpp"

namespace lpsketch {

// P_T: same costs and variables, constraints TAx = Tb. A relaxation of the
// original problem; with theta set it is the budgeted variant.
struct ProjectedLp {
    StandardFormLp original;
    Projector projector;
    StandardFormLp projected;
};

inline ProjectedLp project_lp(const StandardFormLp& lp, const Projector& T) {
    lp.validate();
    if (T.m != lp.rows())
        throw DimensionMismatch("projector row space does not match instance");
    ProjectedLp out;
    out.original = lp;
    out.projector = T;
    out.projected.c = lp.c;
    out.projected.A = apply(T, lp.A);
    out.projected.b = apply(T, lp.b);
    out.projected.theta = lp.theta;
    return out;
}

inline ProjectedLp project_lp_with_budget(const StandardFormLp& lp, const Projector& T,
                                          double theta) {
    if (!(theta > 0.0)) throw Error("budget theta must be strictly positive");
    ProjectedLp out = project_lp(lp, T);
    if (std::isinf(theta))
        out.projected.theta.reset();  // +inf sentinel: plain projection
    else
        out.projected.theta = theta;
    return out;
}

inline SolveResult solve_projected(const ProjectedLp& plp) {
    if (plp.projected.theta)
        return solve_with_budget(plp.projected, *plp.projected.theta);
    return solve(plp.projected);
}

// Membership certificate: multipliers if member, Farkas dual if not.
// For hull queries the non-member certificate lives in the lifted
// (m+1)-dimensional system that carries the convexity row.
struct MembershipResult {
    bool member = false;
    Vector certificate;
};

// Decides target in cone{A}, i.e. feasibility of {lambda >= 0 : A lambda = target}.
inline MembershipResult in_cone(const Matrix& A, const Vector& target) {
    if (A.rows() != target.size())
        throw DimensionMismatch("target length must match row count");
    auto res = solve(make_lp(Vector::Zero(A.cols()), A, target));
    MembershipResult out;
    if (res.status == SolveStatus::Optimal) {
        out.member = true;
        out.certificate = res.x;
    } else if (res.status == SolveStatus::Infeasible) {
        out.member = false;
        out.certificate = res.farkas;
    } else {
        throw NumericalFailure("membership feasibility problem cannot be unbounded");
    }
    return out;
}

// Decides target in conv{A}: feasibility of {lambda >= 0, sum = 1, A lambda = target}.
inline MembershipResult in_conv_hull(const Matrix& A, const Vector& target) {
    if (A.rows() != target.size())
        throw DimensionMismatch("target length must match row count");
    Matrix Ah(A.rows() + 1, A.cols());
    Ah.topRows(A.rows()) = A;
    Ah.bottomRows(1).setOnes();
    Vector bh(A.rows() + 1);
    bh.head(A.rows()) = target;
    bh(A.rows()) = 1.0;
    auto res = solve(make_lp(Vector::Zero(A.cols()), Ah, bh));
    MembershipResult out;
    if (res.status == SolveStatus::Optimal) {
        out.member = true;
        out.certificate = res.x;
    } else if (res.status == SolveStatus::Infeasible) {
        out.member = false;
        out.certificate = res.farkas;
    } else {
        throw NumericalFailure("membership feasibility problem cannot be unbounded");
    }
    return out;
}

// |x|_A = min { sum(lambda) : A lambda = x, lambda >= 0 }
inline double a_norm(const Matrix& A, const Vector& x) {
    if (A.rows() != x.size())
        throw DimensionMismatch("x length must match row count");
    auto res = solve(make_lp(Vector::Ones(A.cols()), A, x));
    if (res.status == SolveStatus::Infeasible)
        throw NotInCone("x is not in the cone of the columns of A");
    if (res.status != SolveStatus::Optimal)
        throw NumericalFailure("A-norm program did not reach an optimum");
    return res.objective;
}

enum class TrialKind { Cone, Hull, Feasibility, Infeasibility };

inline const char* to_string(TrialKind k) {
    switch (k) {
        case TrialKind::Cone: return "cone";
        case TrialKind::Hull: return "hull";
        case TrialKind::Feasibility: return "feasibility";
        case TrialKind::Infeasibility: return "infeasibility";
    }
    return "unknown";
}

struct TrialConfig {
    Index m = 0;
    Index n = 0;
    double density = 1.0;
    ProjectorKind kind = ProjectorKind::Sparse;
    double q = 1.0 / 6.0;
};

namespace detail {

inline Matrix random_dense_matrix(Index m, Index n, double density,
                                  std::mt19937_64& eng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix A(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
            const double keep = unif(eng);
            const double val = unif(eng);
            A(i, j) = keep < density ? val : 0.0;
        }
    return A;
}

inline Matrix unit_columns_or_resample(Index m, Index n, double density,
                                       std::mt19937_64& eng) {
    for (int attempt = 0; attempt < 10; ++attempt) {
        Matrix A = random_dense_matrix(m, n, density, eng);
        bool ok = true;
        for (Index j = 0; j < n && ok; ++j) ok = A.col(j).norm() > 0.0;
        if (!ok) continue;
        for (Index j = 0; j < n; ++j) A.col(j) /= A.col(j).norm();
        return A;
    }
    throw DegenerateInstance("could not sample a matrix without zero columns");
}

}  // namespace detail

// Runs `trials` independent experiments of the requested kind and reports
// the fraction whose projected answer matches the original answer. Member
// and feasible cases project correctly by linearity, so every kind except
// Feasibility generates NOT-member / infeasible instances and the rate
// isolates the interesting direction. One CSV row per trial when a sink
// is given: seed,original_answer,projected_answer,k,epsilon.
inline double preservation_trial(TrialKind kind, const TrialConfig& cfg, double epsilon,
                                 int trials, std::uint64_t master_seed,
                                 std::ostream* csv = nullptr) {
    if (trials < 1) throw Error("preservation_trial requires trials >= 1");
    if (cfg.m < 1 || cfg.n < 1) throw DimensionMismatch("trial sizes must be positive");

    const Index k = projected_dimension(cfg.n, epsilon);
    int matches = 0;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(t));
        auto eng = make_engine(seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);

        bool original_answer = false;  // member / feasible
        bool projected_answer = false;

        switch (kind) {
            case TrialKind::Feasibility: {
                Matrix A = detail::random_dense_matrix(cfg.m, cfg.n, cfg.density, eng);
                Vector x(cfg.n);
                for (Index j = 0; j < cfg.n; ++j) x(j) = unif(eng);
                auto lp = make_lp(Vector::Ones(cfg.n), A, A * x);
                auto norm = normalize(lp);
                auto T = sample_projector(cfg.kind, k, cfg.m, derive_seed(seed, 1), cfg.q);
                original_answer = true;
                projected_answer =
                    solve(project_lp(norm.lp, T).projected).status == SolveStatus::Optimal;
                break;
            }
            case TrialKind::Infeasibility: {
                Matrix A = detail::random_dense_matrix(cfg.m, cfg.n, cfg.density, eng);
                Vector y(cfg.m);
                for (Index i = 0; i < cfg.m; ++i) y(i) = 0.1 + 0.9 * unif(eng);
                auto lp = make_lp(Vector::Ones(cfg.n), A, -y);
                auto norm = normalize(lp);
                auto T = sample_projector(cfg.kind, k, cfg.m, derive_seed(seed, 1), cfg.q);
                original_answer = false;
                projected_answer =
                    solve(project_lp(norm.lp, T).projected).status == SolveStatus::Optimal;
                break;
            }
            case TrialKind::Cone: {
                Matrix A = detail::unit_columns_or_resample(cfg.m, cfg.n, cfg.density, eng);
                Vector y(cfg.m);
                for (Index i = 0; i < cfg.m; ++i) y(i) = 0.1 + 0.9 * unif(eng);
                Vector target = -y / y.norm();  // certified outside cone{A} since A >= 0
                auto T = sample_projector(cfg.kind, k, cfg.m, derive_seed(seed, 1), cfg.q);
                original_answer = false;
                projected_answer =
                    in_cone(apply(T, A), apply(T, target)).member;
                break;
            }
            case TrialKind::Hull: {
                Matrix A = detail::unit_columns_or_resample(cfg.m, cfg.n, cfg.density, eng);
                Vector u(cfg.m);
                for (Index i = 0; i < cfg.m; ++i) u(i) = unif(eng);
                Vector target = 1.5 * u / u.norm();  // norm 1.5 > 1 >= any hull point
                auto T = sample_projector(cfg.kind, k, cfg.m, derive_seed(seed, 1), cfg.q);
                original_answer = false;
                projected_answer =
                    in_conv_hull(apply(T, A), apply(T, target)).member;
                break;
            }
        }

        if (projected_answer == original_answer) ++matches;
        if (csv) {
            (*csv) << seed << ',' << (original_answer ? 1 : 0) << ','
                   << (projected_answer ? 1 : 0) << ',' << k << ',' << epsilon << '\n';
        }
    }
    return static_cast<double>(matches) / static_cast<double>(trials);
}

}  // namespace lpsketch
