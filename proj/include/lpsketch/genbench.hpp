#pragma once

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lpsketch/errors.hpp"
#include "lpsketch/lp_model.hpp"
#include "lpsketch/retrieve.hpp"
#include "lpsketch/rng.hpp"
#include "lpsketch/sketch.hpp"
#include "lpsketch/solver.hpp"

namespace lpsketch {

struct GenConfig {
    Index m = 0;
    Index n = 0;
    double density = 1.0;
    std::uint64_t seed = 0;
    bool feasible = true;

    void validate() const {
        if (m < 1 || n < 1) throw DimensionMismatch("sizes must be positive");
        if (m > n) throw Error("generator requires m <= n");
        if (!(density > 0.0 && density <= 1.0))
            throw Error("density must lie in (0, 1]");
    }
};

inline void to_json(nlohmann::json& j, const GenConfig& c) {
    j = nlohmann::json{{"m", c.m},
                       {"n", c.n},
                       {"density", c.density},
                       {"seed", c.seed},
                       {"feasible", c.feasible}};
}

inline void from_json(const nlohmann::json& j, GenConfig& c) {
    c.m = j.at("m").get<Index>();
    c.n = j.at("n").get<Index>();
    c.density = j.value("density", 1.0);
    c.seed = j.value("seed", std::uint64_t{0});
    c.feasible = j.value("feasible", true);
    c.validate();
}

namespace detail {

inline Matrix masked_uniform_matrix(Index m, Index n, double density,
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

inline bool has_zero_line(const Matrix& A) {
    for (Index i = 0; i < A.rows(); ++i)
        if (A.row(i).cwiseAbs().maxCoeff() == 0.0) return true;
    for (Index j = 0; j < A.cols(); ++j)
        if (A.col(j).cwiseAbs().maxCoeff() == 0.0) return true;
    return false;
}

inline Matrix sample_constraint_matrix(const GenConfig& cfg, std::mt19937_64& eng) {
    for (int attempt = 0; attempt < 10; ++attempt) {
        Matrix A = masked_uniform_matrix(cfg.m, cfg.n, cfg.density, eng);
        if (!has_zero_line(A)) return A;
    }
    throw DegenerateInstance("matrix kept a zero row or column after 10 resamples");
}

}  // namespace detail

// A entries uniform on [0,1] kept with probability density; planted x >= 0
// uniform on [0,1]; b = A x; c = 1. Feasible by construction.
inline std::pair<StandardFormLp, Vector> gen_feasible(const GenConfig& cfg) {
    cfg.validate();
    if (!cfg.feasible) throw Error("gen_feasible needs cfg.feasible = true");
    auto eng = make_engine(cfg.seed);
    Matrix A = detail::sample_constraint_matrix(cfg, eng);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector x(cfg.n);
    for (Index j = 0; j < cfg.n; ++j) x(j) = unif(eng);
    return {make_lp(Vector::Ones(cfg.n), A, A * x), x};
}

// Farkas construction: y > 0 entrywise makes y'A >= 0 automatic for the
// nonnegative A, and b = -y gives b.y = -|y|^2 < 0.
inline std::pair<StandardFormLp, Vector> gen_infeasible(const GenConfig& cfg) {
    cfg.validate();
    if (cfg.feasible) throw Error("gen_infeasible needs cfg.feasible = false");
    auto eng = make_engine(cfg.seed);
    Matrix A = detail::sample_constraint_matrix(cfg, eng);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    Vector y(cfg.m);
    for (Index i = 0; i < cfg.m; ++i) y(i) = unif(eng);
    return {make_lp(Vector::Ones(cfg.n), A, -y), y};
}

struct BenchRecord {
    Index m = 0;
    Index n = 0;
    double density = 0.0;
    Index k = 0;
    double epsilon = 0.0;
    std::optional<std::uint64_t> seed;  // empty on per-cell mean rows
    double org_time = 0.0;
    double prj_time = 0.0;
    std::optional<double> status_match;  // infeasible runs: 1/0 (mean rows: rate)
    std::optional<double> feas1, feas2, neg1, neg2, obj1, obj2;  // feasible runs
};

// One per-instance record per (cell, instance): generates, solves the
// original with wall-clock timing, and for feasible cells runs one
// projector sample (sigma = 1) through the projected solve plus both
// retrievals. prj_time covers sampling + multiplication + projected solve
// + pseudoinverse retrieval. Failures land in the record, never abort.
// Cells run on up to `threads` workers; instance seeds derive from the
// (cell, instance) counter, so the records match the sequential run apart
// from the timing columns.
inline std::vector<BenchRecord> run_bench(const std::vector<GenConfig>& grid,
                                          double epsilon, int instances_per_cell,
                                          std::uint64_t master_seed,
                                          ProjectorKind kind = ProjectorKind::Sparse,
                                          double q = 1.0 / 6.0, int threads = 1) {
    using clock = std::chrono::steady_clock;
    auto seconds_since = [](clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    std::vector<std::vector<BenchRecord>> per_cell(grid.size());
    auto run_cell = [&](std::size_t cell) {
        const GenConfig& base = grid[cell];
        std::vector<BenchRecord>& records = per_cell[cell];
        for (int inst = 0; inst < instances_per_cell; ++inst) {
            const std::uint64_t seed = derive_seed(
                master_seed, cell * static_cast<std::uint64_t>(instances_per_cell) + inst);
            GenConfig cfg = base;
            cfg.seed = seed;

            BenchRecord rec;
            rec.m = cfg.m;
            rec.n = cfg.n;
            rec.density = cfg.density;
            rec.epsilon = epsilon;
            rec.k = projected_dimension(cfg.n, epsilon);
            rec.seed = seed;

            try {
                if (cfg.feasible) {
                    auto [lp, xstar] = gen_feasible(cfg);
                    auto t0 = clock::now();
                    auto org = solve(lp);
                    rec.org_time = seconds_since(t0);
                    if (org.status != SolveStatus::Optimal)
                        throw NumericalFailure("planted instance did not solve");

                    auto t1 = clock::now();
                    auto pinv = full_pipeline(lp, epsilon, RetrievalMethod::Pseudoinverse,
                                              seed, org.objective, {kind, q, {}});
                    rec.prj_time = seconds_since(t1);
                    auto alg2 = full_pipeline(lp, epsilon, RetrievalMethod::BasisAlg2,
                                              seed, org.objective, {kind, q, {}});
                    rec.feas1 = alg2.metrics.feas;
                    rec.neg1 = alg2.metrics.neg;
                    rec.obj1 = alg2.metrics.obj;
                    rec.feas2 = pinv.metrics.feas;
                    rec.neg2 = pinv.metrics.neg;
                    rec.obj2 = pinv.metrics.obj;
                } else {
                    auto [lp, cert] = gen_infeasible(cfg);
                    auto t0 = clock::now();
                    auto org = solve(lp);
                    rec.org_time = seconds_since(t0);

                    auto norm = normalize(lp);
                    auto t1 = clock::now();
                    auto T = sample_projector(kind, rec.k, cfg.m, derive_seed(seed, 0), q);
                    auto prj = solve(project_lp(norm.lp, T).projected);
                    rec.prj_time = seconds_since(t1);
                    rec.status_match = prj.status == org.status ? 1.0 : 0.0;
                }
            } catch (const Error&) {
                // leave optional fields empty; the row records the attempt
            }
            records.push_back(std::move(rec));
        }
    };

    if (threads <= 1 || grid.size() <= 1) {
        for (std::size_t cell = 0; cell < grid.size(); ++cell) run_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const std::size_t workers =
            std::min<std::size_t>(static_cast<std::size_t>(threads), grid.size());
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t cell = next.fetch_add(1); cell < grid.size();
                     cell = next.fetch_add(1))
                    run_cell(cell);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<BenchRecord> records;
    for (auto& chunk : per_cell)
        for (auto& rec : chunk) records.push_back(std::move(rec));
    return records;
}

// Per-cell mean rows: seed left empty, optional metrics averaged over the
// instances that reported them.
inline std::vector<BenchRecord> cell_means(const std::vector<BenchRecord>& records) {
    struct Acc {
        BenchRecord sum;
        int count = 0;
        std::map<std::string, std::pair<double, int>> opt;
    };
    std::map<std::tuple<Index, Index, double, double, int>, Acc> cells;
    for (const auto& r : records) {
        const int klass = r.status_match ? 0 : (r.feas2 ? 1 : 2);
        auto& acc = cells[{r.m, r.n, r.density, r.epsilon, klass}];
        if (acc.count == 0) {
            acc.sum.m = r.m;
            acc.sum.n = r.n;
            acc.sum.density = r.density;
            acc.sum.epsilon = r.epsilon;
            acc.sum.k = r.k;
        }
        acc.sum.org_time += r.org_time;
        acc.sum.prj_time += r.prj_time;
        ++acc.count;
        auto add = [&](const char* name, const std::optional<double>& v) {
            if (v) {
                auto& slot = acc.opt[name];
                slot.first += *v;
                ++slot.second;
            }
        };
        add("status_match", r.status_match);
        add("feas1", r.feas1);
        add("feas2", r.feas2);
        add("neg1", r.neg1);
        add("neg2", r.neg2);
        add("obj1", r.obj1);
        add("obj2", r.obj2);
    }

    std::vector<BenchRecord> means;
    for (auto& [key, acc] : cells) {
        BenchRecord rec = acc.sum;
        rec.org_time /= acc.count;
        rec.prj_time /= acc.count;
        auto get = [&](const char* name) -> std::optional<double> {
            auto it = acc.opt.find(name);
            if (it == acc.opt.end() || it->second.second == 0) return std::nullopt;
            return it->second.first / it->second.second;
        };
        rec.status_match = get("status_match");
        rec.feas1 = get("feas1");
        rec.feas2 = get("feas2");
        rec.neg1 = get("neg1");
        rec.neg2 = get("neg2");
        rec.obj1 = get("obj1");
        rec.obj2 = get("obj2");
        means.push_back(std::move(rec));
    }
    return means;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw IoError("double formatting failed");
    return std::string(buf, ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw IoError("bad numeric field: " + s);
    return v;
}

}  // namespace detail

inline constexpr const char* kBenchCsvHeader =
    "m,n,dens,k,eps,seed,org_time,prj_time,status_match,feas1,feas2,neg1,neg2,obj1,obj2";

inline void write_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
    out << kBenchCsvHeader << '\n';
    auto opt = [](const std::optional<double>& v) {
        return v ? detail::format_double(*v) : std::string();
    };
    for (const auto& r : records) {
        out << r.m << ',' << r.n << ',' << detail::format_double(r.density) << ','
            << r.k << ',' << detail::format_double(r.epsilon) << ','
            << (r.seed ? std::to_string(*r.seed) : std::string()) << ','
            << detail::format_double(r.org_time) << ','
            << detail::format_double(r.prj_time) << ',' << opt(r.status_match) << ','
            << opt(r.feas1) << ',' << opt(r.feas2) << ',' << opt(r.neg1) << ','
            << opt(r.neg2) << ',' << opt(r.obj1) << ',' << opt(r.obj2) << '\n';
    }
}

inline void write_csv(const std::vector<BenchRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_csv(records, out);
}

inline std::vector<BenchRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("missing CSV header");
    if (line != kBenchCsvHeader) throw IoError("unexpected CSV header: " + line);

    std::vector<BenchRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        f.resize(15);
        BenchRecord r;
        r.m = static_cast<Index>(std::stoll(f[0]));
        r.n = static_cast<Index>(std::stoll(f[1]));
        r.density = detail::parse_double(f[2]);
        r.k = static_cast<Index>(std::stoll(f[3]));
        r.epsilon = detail::parse_double(f[4]);
        if (!f[5].empty()) r.seed = std::stoull(f[5]);
        r.org_time = detail::parse_double(f[6]);
        r.prj_time = detail::parse_double(f[7]);
        auto opt = [](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return detail::parse_double(s);
        };
        r.status_match = opt(f[8]);
        r.feas1 = opt(f[9]);
        r.feas2 = opt(f[10]);
        r.neg1 = opt(f[11]);
        r.neg2 = opt(f[12]);
        r.obj1 = opt(f[13]);
        r.obj2 = opt(f[14]);
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<BenchRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    return read_csv(in);
}

}  // namespace lpsketch
