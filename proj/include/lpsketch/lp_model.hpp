#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <string>

#include "lpsketch/errors.hpp"

namespace lpsketch {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// min { c.x : A x = b, x >= 0 }, optionally with the budget sum(x) <= theta.
struct StandardFormLp {
    Vector c;
    Matrix A;
    Vector b;
    std::optional<double> theta;

    Index rows() const { return A.rows(); }
    Index cols() const { return A.cols(); }

    void validate() const {
        if (A.rows() < 1 || A.cols() < 1)
            throw DimensionMismatch("constraint matrix must be at least 1x1");
        if (c.size() != A.cols())
            throw DimensionMismatch("cost vector length does not match column count");
        if (b.size() != A.rows())
            throw DimensionMismatch("rhs length does not match row count");
        if (theta && !(*theta > 0.0))
            throw Error("budget theta must be strictly positive");
    }
};

inline StandardFormLp make_lp(Vector c, Matrix A, Vector b,
                              std::optional<double> theta = std::nullopt) {
    StandardFormLp lp{std::move(c), std::move(A), std::move(b), theta};
    lp.validate();
    return lp;
}

// Instance with unit-norm columns and unit-norm rhs, plus the scales needed
// to map solutions back. The cost is rescaled as c_j * |b| / |A_j| so that
// objective values of corresponding points agree between the two instances.
struct NormalizedLp {
    StandardFormLp lp;
    Vector column_scales;  // original |A_j|, length n
    double rhs_scale;      // original |b|
};

struct QualityMetrics {
    double feas = 0.0;
    double neg = 0.0;
    double obj = 0.0;
    // Set when the reference value is zero and obj is an absolute gap.
    bool obj_absolute_gap = false;
};

inline NormalizedLp normalize(const StandardFormLp& lp) {
    lp.validate();
    const double bnorm = lp.b.norm();
    if (bnorm == 0.0) throw ZeroRhs();

    const Index n = lp.cols();
    Vector scales(n);
    for (Index j = 0; j < n; ++j) {
        scales(j) = lp.A.col(j).norm();
        if (scales(j) == 0.0) throw ZeroColumn(static_cast<long>(j));
    }

    StandardFormLp out;
    out.A = lp.A.array().rowwise() / scales.transpose().array();
    out.b = lp.b / bnorm;
    out.c = (lp.c.array() * bnorm / scales.array()).matrix();
    out.theta = lp.theta;
    return NormalizedLp{std::move(out), std::move(scales), bnorm};
}

// x_j = |b| * x~_j / |A_j|
inline Vector denormalize_solution(const Vector& x_tilde, const NormalizedLp& norm) {
    if (x_tilde.size() != norm.column_scales.size())
        throw DimensionMismatch("solution length does not match column count");
    return (x_tilde.array() * norm.rhs_scale / norm.column_scales.array()).matrix();
}

// feas = sum_i |A^i x - b_i| / |b|_1
// neg  = sum_{x_j<0} |x_j| / |x|_1            (0 when x = 0)
// obj  = |v_ref - v_cand| / |v_ref|           (absolute gap, flagged, when v_ref = 0)
inline QualityMetrics quality_metrics(const StandardFormLp& lp, const Vector& x,
                                      double v_reference, double v_candidate) {
    if (x.size() != lp.cols())
        throw DimensionMismatch("solution length does not match column count");
    QualityMetrics q;

    const double b1 = lp.b.lpNorm<1>();
    if (!(b1 > 0.0)) throw Error("quality metrics require |b|_1 > 0");
    q.feas = (lp.A * x - lp.b).lpNorm<1>() / b1;

    const double x1 = x.lpNorm<1>();
    if (x1 > 0.0) {
        double negsum = 0.0;
        for (Index j = 0; j < x.size(); ++j)
            if (x(j) < 0.0) negsum += -x(j);
        q.neg = negsum / x1;
    }

    if (v_reference != 0.0) {
        q.obj = std::abs(v_reference - v_candidate) / std::abs(v_reference);
    } else {
        q.obj = std::abs(v_reference - v_candidate);
        q.obj_absolute_gap = true;
    }
    return q;
}

// --- JSON instance format: {"m","n","c","A","b"[,"theta"]} ---

inline void to_json(nlohmann::json& j, const StandardFormLp& lp) {
    j = nlohmann::json{{"m", lp.rows()}, {"n", lp.cols()}};
    j["c"] = std::vector<double>(lp.c.data(), lp.c.data() + lp.c.size());
    auto rows = nlohmann::json::array();
    for (Index i = 0; i < lp.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Index jj = 0; jj < lp.cols(); ++jj) row.push_back(lp.A(i, jj));
        rows.push_back(std::move(row));
    }
    j["A"] = std::move(rows);
    j["b"] = std::vector<double>(lp.b.data(), lp.b.data() + lp.b.size());
    if (lp.theta) j["theta"] = *lp.theta;
}

inline void from_json(const nlohmann::json& j, StandardFormLp& lp) {
    const Index m = j.at("m").get<Index>();
    const Index n = j.at("n").get<Index>();
    const auto c = j.at("c").get<std::vector<double>>();
    const auto b = j.at("b").get<std::vector<double>>();
    if (static_cast<Index>(c.size()) != n || static_cast<Index>(b.size()) != m)
        throw DimensionMismatch("instance file fields disagree with m/n");
    lp.c = Eigen::Map<const Vector>(c.data(), n);
    lp.b = Eigen::Map<const Vector>(b.data(), m);
    lp.A.resize(m, n);
    const auto& rows = j.at("A");
    if (static_cast<Index>(rows.size()) != m)
        throw DimensionMismatch("instance file row count disagrees with m");
    for (Index i = 0; i < m; ++i) {
        const auto row = rows[i].get<std::vector<double>>();
        if (static_cast<Index>(row.size()) != n)
            throw DimensionMismatch("instance file column count disagrees with n");
        for (Index jj = 0; jj < n; ++jj) lp.A(i, jj) = row[jj];
    }
    if (j.contains("theta"))
        lp.theta = j.at("theta").get<double>();
    else
        lp.theta.reset();
    lp.validate();
}

inline void save_lp(const StandardFormLp& lp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << nlohmann::json(lp).dump(2) << "\n";
}

inline StandardFormLp load_lp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    nlohmann::json j;
    in >> j;
    return j.get<StandardFormLp>();
}

}  // namespace lpsketch
