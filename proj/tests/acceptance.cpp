// Acceptance suite: one line per criterion, nonzero exit when any
// asserted criterion fails. Criterion 10 is reported, never asserted.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "lpsketch/ecc.hpp"
#include "lpsketch/genbench.hpp"
#include "lpsketch/lp_model.hpp"
#include "lpsketch/project.hpp"
#include "lpsketch/retrieve.hpp"
#include "lpsketch/rng.hpp"
#include "lpsketch/sketch.hpp"
#include "lpsketch/solver.hpp"

using namespace lpsketch;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %-38s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

void report_info(int id, const std::string& name, const std::string& detail) {
    std::printf("[INFO] %2d. %-38s %s\n", id, name.c_str(), detail.c_str());
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double wall(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. projected_dimension reproduces the nine published k values exactly.
void criterion1() {
    const std::vector<std::pair<Index, Index>> expected = {
        {600, 289},  {700, 296},  {800, 302},  {1200, 321}, {1400, 327},
        {1600, 333}, {1800, 339}, {2100, 346}, {2400, 352}};
    bool ok = true;
    for (auto [n, k] : expected) ok = ok && projected_dimension(n, 0.2) == k;
    report(1, "k-formula fidelity", ok, ok ? "9/9 values exact" : "mismatch");
}

// 2. 50 Farkas-infeasible instances, m=200 n=300 dens=0.3, sparse q=1/6:
//    projected LP infeasible in >= 95%.
void criterion2() {
    const int trials = 50;
    int preserved = 0;
    for (int t = 0; t < trials; ++t) {
        GenConfig cfg{200, 300, 0.3, derive_seed(20250, t), false};
        try {
            auto [lp, cert] = gen_infeasible(cfg);
            auto norm = normalize(lp);
            const Index k = projected_dimension(300, 0.2);
            auto T = sample_projector(ProjectorKind::Sparse, k, 200,
                                      derive_seed(cfg.seed, 1), 1.0 / 6.0);
            if (solve(project_lp(norm.lp, T).projected).status ==
                SolveStatus::Infeasible)
                ++preserved;
        } catch (const Error&) {
        }
    }
    const double rate = preserved / static_cast<double>(trials);
    report(2, "infeasibility preservation", rate >= 0.95,
           "rate " + std::to_string(rate));
}

struct FeasibleRun {
    StandardFormLp lp;
    double org_objective = 0.0;
    RetrievalReport pinv;
};

// 3 + 4 share the same 50 feasible instances at m=200 n=300 dens=0.3.
std::vector<FeasibleRun> feasible_runs() {
    std::vector<FeasibleRun> runs;
    for (int t = 0; t < 50; ++t) {
        GenConfig cfg{200, 300, 0.3, derive_seed(20350, t), true};
        FeasibleRun run;
        run.org_objective = -1.0;  // stays negative when the run fails
        try {
            auto [lp, planted] = gen_feasible(cfg);
            auto org = solve(lp);
            if (org.status == SolveStatus::Optimal) {
                run.pinv = full_pipeline(lp, 0.2, RetrievalMethod::Pseudoinverse,
                                         cfg.seed, org.objective);
                run.org_objective = org.objective;
                run.lp = std::move(lp);
            }
        } catch (const Error&) {
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

void criterion3(const std::vector<FeasibleRun>& runs) {
    int optimal = 0, relaxed = 0;
    for (const auto& r : runs) {
        if (r.org_objective < 0.0) continue;
        ++optimal;  // full_pipeline threw on non-optimal projections
        if (r.pinv.projected_objective <= r.org_objective + 1e-7) ++relaxed;
    }
    const bool ok = optimal == 50 && relaxed == 50;
    report(3, "feasibility one-sidedness", ok,
           "optimal " + std::to_string(optimal) + "/50, v(P_T)<=v(P) " +
               std::to_string(relaxed) + "/50");
}

void criterion4(const std::vector<FeasibleRun>& runs) {
    int feas_ok = 0;
    std::vector<double> negs, objs;
    for (const auto& r : runs) {
        if (r.org_objective < 0.0) continue;
        if (r.pinv.metrics.feas <= 1e-6) ++feas_ok;
        negs.push_back(r.pinv.metrics.neg);
        objs.push_back(r.pinv.metrics.obj);
    }
    const double med_neg = median(negs), med_obj = median(objs);
    const bool ok = feas_ok == 50 && med_neg <= 0.15 && med_obj <= 0.15;
    char detail[128];
    std::snprintf(detail, sizeof(detail), "feas2<=1e-6 %d/50, med neg2 %.4f, med obj2 %.4f",
                  feas_ok, med_neg, med_obj);
    report(4, "pseudoinverse retrieval quality", ok, detail);
}

// 5. true optimal dual fed to the basis retrieval recovers the
//    brute-force-verified optimum on nondegenerate 6x10 instances.
void criterion5() {
    int done = 0, ok = 0;
    for (std::uint64_t attempt = 0; done < 25 && attempt < 400; ++attempt) {
        std::mt19937_64 eng(derive_seed(20550, attempt));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        Matrix A(6, 10);
        for (Index i = 0; i < 6; ++i)
            for (Index j = 0; j < 10; ++j) A(i, j) = unif(eng);
        Vector x(10), c(10);
        for (Index j = 0; j < 10; ++j) x(j) = unif(eng);
        for (Index j = 0; j < 10; ++j) c(j) = 0.5 + unif(eng);
        auto lp = make_lp(c, A, A * x);

        auto res = solve(lp);
        if (res.status != SolveStatus::Optimal) continue;
        // nondegeneracy: strictly positive basics, strictly positive
        // reduced costs off the basis
        Vector slack = lp.c - lp.A.transpose() * res.y;
        bool nondeg = true;
        std::vector<char> basic(10, 0);
        for (Index j : res.basis) basic[static_cast<std::size_t>(j)] = 1;
        for (Index j = 0; j < 10 && nondeg; ++j)
            nondeg = basic[static_cast<std::size_t>(j)] ? res.x(j) > 1e-6
                                                        : slack(j) > 1e-6;
        if (!nondeg) continue;
        ++done;

        auto oracle = brute_force_optimum(lp);
        auto rep = retrieve_basis_alg2(lp, res.y, res.objective);
        const bool exact = oracle.status == SolveStatus::Optimal &&
                           rep.basis_used == oracle.basis &&
                           (rep.x - oracle.x).lpNorm<Eigen::Infinity>() <= 1e-8;
        if (exact) ++ok;
    }
    report(5, "basis retrieval exactness oracle", done == 25 && ok == 25,
           std::to_string(ok) + "/" + std::to_string(done) + " exact recoveries");
}

// 6. raw projected solutions violate the original constraints. Needs a
//    genuinely compressive scale: k(320) = 261 < m = 300.
void criterion6() {
    const int trials = 50;
    int violated = 0;
    for (int t = 0; t < trials; ++t) {
        GenConfig cfg{300, 320, 0.3, derive_seed(20650, t), true};
        try {
            auto [lp, planted] = gen_feasible(cfg);
            Vector xprime = raw_projected_solution(lp, 0.2, cfg.seed);
            if ((lp.A * xprime - lp.b).lpNorm<1>() > 1e-6 * lp.b.lpNorm<1>()) ++violated;
        } catch (const Error&) {
        }
    }
    const double rate = violated / static_cast<double>(trials);
    report(6, "projected solutions miss F(P)", rate >= 0.95,
           "violation rate " + std::to_string(rate));
}

// 7. distance and inner-product concentration, 10 projector seeds.
void criterion7() {
    const Index m = 1000;
    const Index k = projected_dimension(50, 0.2);
    std::vector<Vector> pts;
    std::mt19937_64 eng(20750);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int p = 0; p < 50; ++p) {
        Vector v(m);
        for (Index i = 0; i < m; ++i) v(i) = normal(eng);
        pts.push_back(std::move(v));
    }
    int good = 0;
    double worst_frac = 1.0, worst_ip = 1.0;
    for (int s = 0; s < 10; ++s) {
        auto T = sample_projector(ProjectorKind::Gaussian, k, m, derive_seed(20751, s));
        auto st = distortion_stats(T, pts, 0.2);
        worst_frac = std::min(worst_frac, st.fraction_within);
        worst_ip = std::min(worst_ip, st.inner_product_fraction_within);
        if (st.fraction_within >= 0.9 && st.inner_product_fraction_within >= 0.9) ++good;
    }
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "%d/10 seeds, worst dist frac %.4f, worst ip frac %.4f", good,
                  worst_frac, worst_ip);
    report(7, "JLL concentration", good == 10, detail);
}

// 8. solver agrees with the enumeration oracle on 200 small instances.
void criterion8() {
    int agree = 0;
    for (int t = 0; t < 200; ++t) {
        std::mt19937_64 eng(derive_seed(20850, t));
        std::uniform_int_distribution<Index> msize(1, 4), nsize(2, 8);
        std::uniform_real_distribution<double> sym(-1.0, 1.0);
        const Index m = msize(eng);
        const Index n = std::max(nsize(eng), m);
        Matrix A(m, n);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < n; ++j) A(i, j) = sym(eng);
        Vector b(m), c(n);
        for (Index i = 0; i < m; ++i) b(i) = sym(eng);
        for (Index j = 0; j < n; ++j) c(j) = sym(eng);
        auto lp = make_lp(c, A, b);
        auto fast = solve(lp);
        auto oracle = brute_force_optimum(lp);
        const bool same_status = fast.status == oracle.status;
        const bool same_value =
            fast.status != SolveStatus::Optimal ||
            std::abs(fast.objective - oracle.objective) <= 1e-8 * (1.0 + std::abs(oracle.objective));
        if (same_status && same_value) ++agree;
    }
    report(8, "solver vs enumeration oracle", agree == 200,
           std::to_string(agree) + "/200 agree");
}

// 9. the published 233-bit sentence at n=256, k=61, q=1/100, noise
//    rate 0.1, delta 0.5: perfect text recovery; plus desk-scale
//    unprojected recovery in >= 9/10 seeds.
void criterion9() {
    const std::string sentence = "Ibis redibis non morieris in bello";
    const auto bits = text_to_bits_compact(sentence);
    bool paper_ok = bits.size() == 233;

    EccDemoReport rep;
    try {
        rep = run_ecc_demo(sentence, NoiseModel{0.5, 0.1, 0}, Index{61}, 0.3, 0.01,
                           20950, EccEncoding::Compact);
        paper_ok = paper_ok && rep.m == 233 && rep.n == 256 && rep.k == 61 &&
                   rep.unprojected.text_recovered && rep.projected.text_recovered;
    } catch (const Error&) {
        paper_ok = false;
    }

    int desk_ok = 0;
    for (int s = 0; s < 10; ++s) {
        try {
            auto code = make_code(100, 120, derive_seed(20951, s));
            std::mt19937_64 eng(derive_seed(20952, s));
            BitVector w(100);
            for (auto& b : w) b = static_cast<int>(eng() & 1u);
            Vector z_bar = add_noise(encode(code, w),
                                     NoiseModel{0.5, 0.05, derive_seed(20953, s)});
            auto [out, diag] = decode(code, z_bar);
            if (out == w) ++desk_ok;
        } catch (const Error&) {
        }
    }
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "m=%lld n=%lld k=%lld text %s/%s, desk %d/10",
                  static_cast<long long>(rep.m), static_cast<long long>(rep.n),
                  static_cast<long long>(rep.k),
                  rep.unprojected.text_recovered ? "ok" : "lost",
                  rep.projected.text_recovered ? "ok" : "lost", desk_ok);
    report(9, "error-correction round trip", paper_ok && desk_ok >= 9, detail);
}

// 10. timing trend across m in {200, 350, 500}: reported, threshold-free.
void criterion10() {
    std::vector<double> ratios;
    std::string detail;
    for (Index m : {Index{200}, Index{350}, Index{500}}) {
        const Index n = static_cast<Index>(std::llround(1.4 * static_cast<double>(m)));
        std::vector<GenConfig> grid = {{m, n, 0.7, 0, false}};
        auto records = run_bench(grid, 0.2, 2, derive_seed(21050, m));
        double org = 0.0, prj = 0.0;
        for (const auto& r : records) {
            org += r.org_time;
            prj += r.prj_time;
        }
        const double ratio = org > 0.0 ? prj / org : 0.0;
        ratios.push_back(ratio);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "m=%lld prj/org=%.3f  ",
                      static_cast<long long>(m), ratio);
        detail += buf;
    }
    const bool decreasing = ratios[0] >= ratios[1] && ratios[1] >= ratios[2];
    report_info(10, "timing trend (threshold-free)",
                detail + (decreasing ? "(decreasing)" : "(not monotone on this host)"));
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion1();
    criterion2();
    auto runs = feasible_runs();
    criterion3(runs);
    criterion4(runs);
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::printf("acceptance finished in %.1f s with %d failing criteria\n", wall(t0),
                failures);
    return failures == 0 ? 0 : 1;
}
