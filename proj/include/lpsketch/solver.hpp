#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lpsketch/errors.hpp"
#include "lpsketch/lp_model.hpp"

namespace lpsketch {

enum class SolveStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

struct SolveResult {
    SolveStatus status = SolveStatus::Optimal;
    double objective = 0.0;
    Vector x;                        // primal solution, iff Optimal
    Vector y;                        // dual solution, iff Optimal
    std::vector<Index> basis;        // basic column ids (sorted), iff Optimal
    Vector farkas;                   // certificate y with y'A >= 0, y'b < 0, iff Infeasible
    long iterations = 0;
    std::vector<Index> dropped_rows;  // redundant equality rows removed in phase 1
};

inline void to_json(nlohmann::json& j, const SolveResult& res) {
    j = nlohmann::json{{"status", to_string(res.status)}};
    if (res.status == SolveStatus::Optimal) {
        j["objective"] = res.objective;
        j["x"] = std::vector<double>(res.x.data(), res.x.data() + res.x.size());
        j["y"] = std::vector<double>(res.y.data(), res.y.data() + res.y.size());
        j["basis"] = res.basis;
    }
}

namespace detail {

// Dense two-phase revised simplex with an explicit basis inverse kept
// up to date by eta row operations and periodically refactorized.
//
// Rows are flipped up front so b >= 0. Redundant equality rows (detected
// when a zero-level artificial cannot be pivoted out at the end of phase 1)
// are dropped; the reported dual carries 0 for dropped rows. For a
// full-row-rank A the reported basis has cardinality m.
class RevisedSimplex {
public:
    RevisedSimplex(const Matrix& A, const Vector& b, const Vector& c)
        : A_(A), b_(b), c_(c), m_(A.rows()), n_(A.cols()) {
        sign_ = Vector::Ones(m_);
        for (Index i = 0; i < m_; ++i) {
            if (b_(i) < 0.0) {
                sign_(i) = -1.0;
                b_(i) = -b_(i);
                A_.row(i) = -A_.row(i);
            }
        }
        kept_rows_.resize(m_);
        for (Index i = 0; i < m_; ++i) kept_rows_[i] = i;
        a_max_ = A_.size() > 0 ? A_.cwiseAbs().maxCoeff() : 0.0;
    }

    SolveResult run() {
        SolveResult res;
        const Index m_orig = m_;

        // Phase 1: minimize the sum of artificial variables.
        start_phase1();
        Vector cost1 = Vector::Zero(n_);
        run_phase(cost1, /*phase1=*/true);

        const double infeas = phase1_objective();
        const double feas_tol = 1e-8 * (1.0 + b_.lpNorm<1>());
        if (infeas > feas_tol) {
            res.status = SolveStatus::Infeasible;
            res.iterations = iterations_;
            Vector y1 = phase1_dual();
            res.farkas = Vector::Zero(m_orig);
            for (Index i = 0; i < m_; ++i)
                res.farkas(kept_rows_[i]) = -sign_(kept_rows_[i]) * y1(i);
            return res;
        }

        drive_out_artificials(res.dropped_rows);
        refactorize();

        // Phase 2 on the (possibly reduced) full-rank system.
        const bool unbounded = run_phase(c_, /*phase1=*/false);
        res.iterations = iterations_;
        if (unbounded) {
            res.status = SolveStatus::Unbounded;
            return res;
        }

        refactorize();
        res.status = SolveStatus::Optimal;
        res.x = Vector::Zero(n_);
        for (Index i = 0; i < m_; ++i) res.x(basis_[i]) = xB_(i);
        res.objective = c_.dot(res.x);

        Vector cB(m_);
        for (Index i = 0; i < m_; ++i) cB(i) = c_(basis_[i]);
        Vector yhat = binv_.transpose() * cB;
        res.y = Vector::Zero(m_orig);
        for (Index i = 0; i < m_; ++i)
            res.y(kept_rows_[i]) = sign_(kept_rows_[i]) * yhat(i);

        res.basis.assign(basis_.begin(), basis_.end());
        std::sort(res.basis.begin(), res.basis.end());
        return res;
    }

private:
    static constexpr double kOptTol = 1e-9;
    static constexpr double kPivotTol = 1e-9;
    static constexpr double kDegenTol = 1e-11;
    static constexpr int kRefactorEvery = 100;

    Matrix A_;
    Vector b_, c_;
    Index m_, n_;
    Vector sign_;                   // indexed by original row id
    std::vector<Index> kept_rows_;  // current row -> original row id
    double a_max_ = 0.0;

    std::vector<Index> basis_;      // per current row; >= n_ means artificial
    std::vector<char> in_basis_;    // over structural columns
    Matrix binv_;
    Vector xB_;
    long iterations_ = 0;
    long pivots_since_refactor_ = 0;

    bool is_artificial(Index id) const { return id >= n_; }

    void start_phase1() {
        basis_.resize(m_);
        for (Index i = 0; i < m_; ++i) basis_[i] = n_ + i;
        in_basis_.assign(static_cast<std::size_t>(n_), 0);
        binv_ = Matrix::Identity(m_, m_);
        xB_ = b_;
    }

    Vector basic_costs(const Vector& cost, bool phase1) const {
        Vector cB(m_);
        for (Index i = 0; i < m_; ++i)
            cB(i) = is_artificial(basis_[i]) ? (phase1 ? 1.0 : 0.0) : cost(basis_[i]);
        return cB;
    }

    double phase1_objective() const {
        double s = 0.0;
        for (Index i = 0; i < m_; ++i)
            if (is_artificial(basis_[i])) s += xB_(i);
        return s;
    }

    Vector phase1_dual() const {
        Vector cB = Vector::Zero(m_);
        for (Index i = 0; i < m_; ++i)
            if (is_artificial(basis_[i])) cB(i) = 1.0;
        return binv_.transpose() * cB;
    }

    // Returns true when the phase detects an unbounded ray (phase 2 only).
    bool run_phase(const Vector& cost, bool phase1) {
        const long cap = 50 * static_cast<long>(m_ + n_);
        const long bland_after = 10 * static_cast<long>(m_);
        const double otol = kOptTol * (1.0 + (phase1 ? 1.0 : cost.cwiseAbs().maxCoeff()));
        long phase_iters = 0;
        long degenerate = 0;
        bool bland = false;

        while (true) {
            if (++phase_iters > cap)
                throw NumericalFailure("simplex iteration cap exceeded");
            ++iterations_;

            Vector cB = basic_costs(cost, phase1);
            Vector y = binv_.transpose() * cB;
            Vector d = cost - A_.transpose() * y;

            Index enter = -1;
            if (!bland) {
                double best = -otol;
                for (Index j = 0; j < n_; ++j) {
                    if (in_basis_[static_cast<std::size_t>(j)]) continue;
                    if (d(j) < best) {
                        best = d(j);
                        enter = j;
                    }
                }
            } else {
                for (Index j = 0; j < n_; ++j) {
                    if (in_basis_[static_cast<std::size_t>(j)]) continue;
                    if (d(j) < -otol) {
                        enter = j;
                        break;
                    }
                }
            }
            if (enter < 0) return false;  // phase optimum

            Vector w = binv_ * A_.col(enter);

            double theta = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < m_; ++i) {
                if (w(i) > kPivotTol) {
                    const double ratio = std::max(xB_(i), 0.0) / w(i);
                    if (ratio < theta) theta = ratio;
                }
            }
            if (!std::isfinite(theta)) {
                if (phase1)
                    throw NumericalFailure("phase-1 ray found; numerical breakdown");
                return true;  // unbounded
            }

            // Leaving row among near-ties: prefer artificials, then large
            // pivots; Bland mode takes the smallest basic variable id.
            const double tie = theta + 1e-9 * (1.0 + theta);
            Index leave = -1;
            if (bland) {
                Index best_id = -1;
                for (Index i = 0; i < m_; ++i) {
                    if (w(i) > kPivotTol && std::max(xB_(i), 0.0) / w(i) <= tie) {
                        if (best_id < 0 || basis_[i] < best_id) {
                            best_id = basis_[i];
                            leave = i;
                        }
                    }
                }
            } else {
                bool best_art = false;
                double best_piv = 0.0;
                for (Index i = 0; i < m_; ++i) {
                    if (w(i) > kPivotTol && std::max(xB_(i), 0.0) / w(i) <= tie) {
                        const bool art = is_artificial(basis_[i]);
                        if (leave < 0 || (art && !best_art) ||
                            (art == best_art && w(i) > best_piv)) {
                            leave = i;
                            best_art = art;
                            best_piv = w(i);
                        }
                    }
                }
            }

            if (theta <= kDegenTol) {
                if (++degenerate > bland_after) bland = true;
            }

            pivot(enter, leave, w, theta);
        }
    }

    void pivot(Index enter, Index leave, const Vector& w, double theta) {
        xB_ -= theta * w;
        xB_(leave) = theta;

        const Index old = basis_[leave];
        if (!is_artificial(old)) in_basis_[static_cast<std::size_t>(old)] = 0;
        basis_[leave] = enter;
        in_basis_[static_cast<std::size_t>(enter)] = 1;

        const double piv = w(leave);
        binv_.row(leave) /= piv;
        for (Index i = 0; i < m_; ++i) {
            if (i == leave) continue;
            const double f = w(i);
            if (f != 0.0) binv_.row(i) -= f * binv_.row(leave);
        }

        if (++pivots_since_refactor_ >= kRefactorEvery) refactorize();
    }

    void refactorize() {
        Matrix B(m_, m_);
        for (Index i = 0; i < m_; ++i) {
            if (is_artificial(basis_[i]))
                B.col(i) = Vector::Unit(m_, basis_[i] - n_);
            else
                B.col(i) = A_.col(basis_[i]);
        }
        Eigen::PartialPivLU<Matrix> lu(B);
        binv_ = lu.inverse();
        if (!binv_.allFinite())
            throw NumericalFailure("singular basis during refactorization");
        xB_ = binv_ * b_;
        pivots_since_refactor_ = 0;
    }

    // At the end of a feasible phase 1, swap zero-level artificials for
    // structural columns where possible; rows that admit no pivot are
    // linearly dependent on the rest and get dropped.
    void drive_out_artificials(std::vector<Index>& dropped) {
        std::vector<Index> redundant;
        for (Index r = 0; r < m_; ++r) {
            if (!is_artificial(basis_[r])) continue;
            Eigen::RowVectorXd rowvec = binv_.row(r) * A_;
            Index enter = -1;
            double best = 0.0;
            for (Index j = 0; j < n_; ++j) {
                if (in_basis_[static_cast<std::size_t>(j)]) continue;
                const double a = std::abs(rowvec(j));
                if (a > best) {
                    best = a;
                    enter = j;
                }
            }
            const double tol = 1e-8 * (1.0 + binv_.row(r).lpNorm<1>() * a_max_);
            if (enter >= 0 && best > tol) {
                Vector w = binv_ * A_.col(enter);
                pivot(enter, r, w, std::max(xB_(r), 0.0) / w(r));
            } else {
                redundant.push_back(r);
            }
        }
        if (redundant.empty()) return;

        std::vector<Index> keep;
        keep.reserve(m_ - static_cast<Index>(redundant.size()));
        std::vector<char> is_red(static_cast<std::size_t>(m_), 0);
        for (Index r : redundant) {
            is_red[static_cast<std::size_t>(r)] = 1;
            dropped.push_back(kept_rows_[r]);
        }
        for (Index i = 0; i < m_; ++i)
            if (!is_red[static_cast<std::size_t>(i)]) keep.push_back(i);

        Matrix A2(static_cast<Index>(keep.size()), n_);
        Vector b2(static_cast<Index>(keep.size()));
        std::vector<Index> basis2, kept2;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            A2.row(static_cast<Index>(i)) = A_.row(keep[i]);
            b2(static_cast<Index>(i)) = b_(keep[i]);
            basis2.push_back(basis_[keep[i]]);
            kept2.push_back(kept_rows_[keep[i]]);
        }
        A_ = std::move(A2);
        b_ = std::move(b2);
        basis_ = std::move(basis2);
        kept_rows_ = std::move(kept2);
        m_ = A_.rows();
        std::sort(dropped.begin(), dropped.end());
    }
};

}  // namespace detail

inline SolveResult solve(const StandardFormLp& lp) {
    lp.validate();
    return detail::RevisedSimplex(lp.A, lp.b, lp.c).run();
}

// Appends the budget row sum(x) + s = theta (row and slack column last, so
// original variable ids are stable). x is reported over the original n
// variables; y, basis, and farkas are over the extended system: y and
// farkas have m+1 entries (budget multiplier last) and basis may contain
// the slack id n.
inline SolveResult solve_with_budget(const StandardFormLp& lp, double theta) {
    lp.validate();
    if (!(theta > 0.0)) throw Error("budget theta must be strictly positive");
    if (std::isinf(theta)) return solve(lp);

    const Index m = lp.rows(), n = lp.cols();
    Matrix A(m + 1, n + 1);
    A.topLeftCorner(m, n) = lp.A;
    A.topRightCorner(m, 1).setZero();
    A.bottomLeftCorner(1, n).setOnes();
    A(m, n) = 1.0;
    Vector b(m + 1);
    b.head(m) = lp.b;
    b(m) = theta;
    Vector c = Vector::Zero(n + 1);
    c.head(n) = lp.c;

    SolveResult res = detail::RevisedSimplex(A, b, c).run();
    if (res.status == SolveStatus::Optimal) res.x.conservativeResize(n);
    return res;
}

namespace detail {

inline bool next_combination(std::vector<Index>& idx, Index n) {
    const Index k = static_cast<Index>(idx.size());
    for (Index i = k - 1; i >= 0; --i) {
        if (idx[i] < n - (k - i)) {
            ++idx[i];
            for (Index j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

struct BasisCandidate {
    double objective = std::numeric_limits<double>::infinity();
    bool dual_feasible = false;
    Vector x, y;
    std::vector<Index> basis;
    bool found = false;
};

inline BasisCandidate enumerate_bases(const Matrix& A, const Vector& b, const Vector& c) {
    const Index m = A.rows(), n = A.cols();
    BasisCandidate best;
    if (m > n) return best;
    std::vector<Index> idx(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
    do {
        Matrix B(m, m);
        for (Index i = 0; i < m; ++i) B.col(i) = A.col(idx[static_cast<std::size_t>(i)]);
        Eigen::FullPivLU<Matrix> lu(B);
        if (lu.rank() < m) continue;
        Vector xB = lu.solve(b);
        if ((xB.array() < -1e-9).any()) continue;

        double obj = 0.0;
        for (Index i = 0; i < m; ++i) obj += c(idx[static_cast<std::size_t>(i)]) * xB(i);

        Vector y = B.transpose().fullPivLu().solve(
            [&] { Vector cB(m); for (Index i = 0; i < m; ++i) cB(i) = c(idx[static_cast<std::size_t>(i)]); return cB; }());
        const bool dual_ok = ((c - A.transpose() * y).array() >= -1e-7).all();

        const bool better = obj < best.objective - 1e-10 ||
                            (obj < best.objective + 1e-10 && dual_ok && !best.dual_feasible);
        if (!best.found || better) {
            best.found = true;
            best.objective = obj;
            best.dual_feasible = dual_ok;
            best.y = y;
            best.x = Vector::Zero(n);
            for (Index i = 0; i < m; ++i) best.x(idx[static_cast<std::size_t>(i)]) = xB(i);
            best.basis.assign(idx.begin(), idx.end());
            std::sort(best.basis.begin(), best.basis.end());
        }
    } while (next_combination(idx, n));
    return best;
}

}  // namespace detail

// Exhaustive test oracle: enumerates all C(n, m) bases. Unboundedness is
// decided by minimizing c over the normalized recession cone
// {d >= 0, Ad = 0, sum(d) = 1}, itself solved by basis enumeration.
inline SolveResult brute_force_optimum(const StandardFormLp& lp) {
    lp.validate();
    const Index m = lp.rows(), n = lp.cols();
    if (n > 12 || m > 6)
        throw TooLarge("brute_force_optimum is limited to n <= 12, m <= 6");

    SolveResult res;
    auto best = detail::enumerate_bases(lp.A, lp.b, lp.c);
    if (!best.found) {
        res.status = SolveStatus::Infeasible;
        return res;
    }

    Matrix Aray(m + 1, n);
    Aray.topRows(m) = lp.A;
    Aray.bottomRows(1).setOnes();
    Vector bray = Vector::Zero(m + 1);
    bray(m) = 1.0;
    auto ray = detail::enumerate_bases(Aray, bray, lp.c);
    if (ray.found && ray.objective < -1e-9) {
        res.status = SolveStatus::Unbounded;
        return res;
    }

    res.status = SolveStatus::Optimal;
    res.objective = best.objective;
    res.x = best.x;
    res.y = best.y;
    res.basis = best.basis;
    return res;
}

}  // namespace lpsketch
