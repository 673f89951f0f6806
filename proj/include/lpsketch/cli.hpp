#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lpsketch/ecc.hpp"
#include "lpsketch/genbench.hpp"
#include "lpsketch/lp_model.hpp"
#include "lpsketch/project.hpp"
#include "lpsketch/retrieve.hpp"
#include "lpsketch/sketch.hpp"
#include "lpsketch/solver.hpp"

namespace lpsketch {

namespace detail {

inline void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot open for writing: " + out_path);
        out << text;
        if (text.empty() || text.back() != '\n') out << '\n';
    }
}

inline std::uint64_t seed_or_env(std::optional<std::uint64_t> seed) {
    if (seed) return *seed;
    if (const char* env = std::getenv("LPSKETCH_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw Error("LPSKETCH_SEED is not a valid integer");
        }
    }
    return 0;
}

}  // namespace detail

// Subcommands: gen, solve, project, retrieve, bench, jll-check, ecc.
// Exit codes: 0 success, 1 usage error, 2 numerical or solver failure.
// Every run accepts --seed (falling back to LPSKETCH_SEED) and --out.
inline int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"random-projection LP toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    std::string out_path;
    app.add_option("--seed", seed, "master seed (env LPSKETCH_SEED as fallback)");
    app.add_option("--out", out_path, "output path (default: stdout)");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random instance");
    Index gen_m = 50, gen_n = 80;
    double gen_density = 0.5;
    bool gen_infeas = false;
    std::string gen_aux;
    gen->add_option("--m", gen_m, "rows");
    gen->add_option("--n", gen_n, "columns");
    gen->add_option("--density", gen_density, "matrix density in (0,1]");
    gen->add_flag("--infeasible", gen_infeas, "Farkas-infeasible instead of planted");
    gen->add_option("--aux-out", gen_aux, "file for the planted solution / certificate");

    // solve
    auto* slv = app.add_subcommand("solve", "solve an instance file");
    std::string slv_in;
    std::optional<double> slv_theta;
    slv->add_option("--in", slv_in, "instance JSON")->required();
    slv->add_option("--theta", slv_theta, "budget on sum(x)");

    // project
    auto* prj = app.add_subcommand("project", "write the projected instance");
    std::string prj_in, prj_kind = "sparse", prj_projector_out;
    double prj_eps = 0.2, prj_q = 1.0 / 6.0;
    std::optional<Index> prj_k;
    prj->add_option("--in", prj_in, "instance JSON")->required();
    prj->add_option("--eps", prj_eps, "distortion target");
    prj->add_option("--k", prj_k, "override the projected row count");
    prj->add_option("--kind", prj_kind, "gaussian|rademacher|sparse|gaussian_orthogonal");
    prj->add_option("--q", prj_q, "sparse nonzero probability per sign");
    prj->add_option("--projector-out", prj_projector_out, "file for the projector");

    // retrieve
    auto* ret = app.add_subcommand("retrieve", "projected solve plus retrieval");
    std::string ret_in, ret_method = "pinv", ret_kind = "sparse";
    double ret_eps = 0.2, ret_q = 1.0 / 6.0;
    std::optional<Index> ret_k;
    std::optional<double> ret_reference;
    bool ret_solve_reference = false;
    ret->add_option("--in", ret_in, "instance JSON")->required();
    ret->add_option("--eps", ret_eps, "distortion target");
    ret->add_option("--k", ret_k, "override the projected row count");
    ret->add_option("--method", ret_method, "alg2|pinv");
    ret->add_option("--kind", ret_kind, "projector kind");
    ret->add_option("--q", ret_q, "sparse nonzero probability per sign");
    ret->add_option("--reference", ret_reference, "known optimal value");
    ret->add_flag("--solve-reference", ret_solve_reference,
                  "solve the original for the reference value");

    // bench
    auto* bch = app.add_subcommand("bench", "run the benchmark harness");
    std::string bch_grid;
    double bch_eps = 0.2;
    int bch_per_cell = 10;
    std::optional<int> bch_cells;
    bool bch_means = false;
    std::string bch_kind = "sparse";
    double bch_q = 1.0 / 6.0;
    int bch_threads = 1;
    std::optional<Index> bch_m, bch_n;
    std::optional<double> bch_density;
    bch->add_option("--grid", bch_grid, "JSON list of generator configs")->required();
    bch->add_option("--eps", bch_eps, "distortion target");
    bch->add_option("--per-cell", bch_per_cell, "instances per cell");
    bch->add_option("--cells", bch_cells, "use only the first N grid cells");
    bch->add_option("--m", bch_m, "override every cell's row count");
    bch->add_option("--n", bch_n, "override every cell's column count");
    bch->add_option("--density", bch_density, "override every cell's density");
    bch->add_flag("--means", bch_means, "append per-cell mean rows");
    bch->add_option("--kind", bch_kind, "projector kind");
    bch->add_option("--q", bch_q, "sparse nonzero probability per sign");
    bch->add_option("--threads", bch_threads, "parallel workers over grid cells");

    // jll-check
    auto* jll = app.add_subcommand("jll-check", "empirical concentration statistics");
    Index jll_m = 1000, jll_points = 50;
    double jll_eps = 0.2, jll_q = 1.0 / 6.0;
    std::optional<Index> jll_k;
    std::string jll_kind = "gaussian";
    jll->add_option("--m", jll_m, "ambient dimension");
    jll->add_option("--points", jll_points, "number of random points");
    jll->add_option("--eps", jll_eps, "distortion target");
    jll->add_option("--k", jll_k, "override the projected dimension");
    jll->add_option("--kind", jll_kind, "projector kind");
    jll->add_option("--q", jll_q, "sparse nonzero probability per sign");

    // ecc
    auto* ecc = app.add_subcommand("ecc", "error-correcting-code demo");
    std::string ecc_text, ecc_encoding = "compact";
    double ecc_rate = 0.1, ecc_delta = 0.5, ecc_eps = 0.3, ecc_q = 0.01;
    std::optional<Index> ecc_k;
    ecc->add_option("--text", ecc_text, "message text")->required();
    ecc->add_option("--rate", ecc_rate, "per-character corruption probability");
    ecc->add_option("--delta", ecc_delta, "noise amplitude bound");
    ecc->add_option("--k", ecc_k, "projected parity rows");
    ecc->add_option("--eps", ecc_eps, "distortion target when --k is absent");
    ecc->add_option("--q", ecc_q, "sparse nonzero probability per sign");
    ecc->add_option("--encoding", ecc_encoding, "compact|fixed7");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        const std::uint64_t master = detail::seed_or_env(seed);

        if (gen->parsed()) {
            GenConfig cfg{gen_m, gen_n, gen_density, master, !gen_infeas};
            auto [lp, aux] = gen_infeas ? gen_infeasible(cfg) : gen_feasible(cfg);
            detail::emit(nlohmann::json(lp).dump(2), out_path);
            if (!gen_aux.empty()) {
                nlohmann::json j{{gen_infeas ? "certificate" : "planted_x",
                                  std::vector<double>(aux.data(), aux.data() + aux.size())}};
                detail::emit(j.dump(2), gen_aux);
            }
            return 0;
        }

        if (slv->parsed()) {
            auto lp = load_lp(slv_in);
            auto res = slv_theta ? solve_with_budget(lp, *slv_theta) : solve(lp);
            detail::emit(nlohmann::json(res).dump(2), out_path);
            return 0;
        }

        if (prj->parsed()) {
            auto lp = load_lp(prj_in);
            const Index k = prj_k ? *prj_k : projected_dimension(lp.cols(), prj_eps);
            auto T = sample_projector(projector_kind_from_string(prj_kind), k, lp.rows(),
                                      master, prj_q);
            auto plp = project_lp(lp, T);
            detail::emit(nlohmann::json(plp.projected).dump(2), out_path);
            if (!prj_projector_out.empty())
                detail::emit(nlohmann::json(T).dump(2), prj_projector_out);
            return 0;
        }

        if (ret->parsed()) {
            auto lp = load_lp(ret_in);
            std::optional<double> reference = ret_reference;
            if (ret_solve_reference) {
                auto org = solve(lp);
                if (org.status != SolveStatus::Optimal)
                    throw NumericalFailure("original instance is not optimal");
                reference = org.objective;
            }
            PipelineOptions opts;
            opts.kind = projector_kind_from_string(ret_kind);
            opts.q = ret_q;
            opts.k_override = ret_k;
            const auto method = ret_method == "alg2" ? RetrievalMethod::BasisAlg2
                                                     : RetrievalMethod::Pseudoinverse;
            auto rep = full_pipeline(lp, ret_eps, method, master, reference, opts);
            detail::emit(nlohmann::json(rep).dump(2), out_path);
            return 0;
        }

        if (bch->parsed()) {
            std::ifstream in(bch_grid);
            if (!in) throw IoError("cannot open grid file: " + bch_grid);
            nlohmann::json j;
            in >> j;
            auto grid = j.get<std::vector<GenConfig>>();
            if (bch_cells && *bch_cells >= 0 &&
                static_cast<std::size_t>(*bch_cells) < grid.size())
                grid.resize(static_cast<std::size_t>(*bch_cells));
            for (auto& cell : grid) {
                if (bch_m) cell.m = *bch_m;
                if (bch_n) cell.n = *bch_n;
                if (bch_density) cell.density = *bch_density;
                cell.validate();
            }
            auto records = run_bench(grid, bch_eps, bch_per_cell, master,
                                     projector_kind_from_string(bch_kind), bch_q,
                                     bch_threads);
            if (bch_means) {
                auto means = cell_means(records);
                records.insert(records.end(), means.begin(), means.end());
            }
            std::ostringstream csv;
            write_csv(records, csv);
            detail::emit(csv.str(), out_path);
            return 0;
        }

        if (jll->parsed()) {
            const Index k = jll_k ? *jll_k : projected_dimension(jll_points, jll_eps);
            auto T = sample_projector(projector_kind_from_string(jll_kind), k, jll_m,
                                      derive_seed(master, 0), jll_q);
            auto eng = make_engine(derive_seed(master, 1));
            std::normal_distribution<double> normal(0.0, 1.0);
            std::vector<Vector> pts;
            for (Index p = 0; p < jll_points; ++p) {
                Vector v(jll_m);
                for (Index i = 0; i < jll_m; ++i) v(i) = normal(eng);
                pts.push_back(std::move(v));
            }
            auto stats = distortion_stats(T, pts, jll_eps);
            nlohmann::json out = stats;
            out["k"] = k;
            detail::emit(out.dump(2), out_path);
            return 0;
        }

        if (ecc->parsed()) {
            const auto encoding =
                ecc_encoding == "fixed7" ? EccEncoding::Fixed7 : EccEncoding::Compact;
            auto rep = run_ecc_demo(ecc_text, NoiseModel{ecc_delta, ecc_rate, 0}, ecc_k,
                                    ecc_eps, ecc_q, master, encoding);
            detail::emit(nlohmann::json(rep).dump(2), out_path);
            return 0;
        }

        std::cerr << "usage error: no subcommand\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace lpsketch
