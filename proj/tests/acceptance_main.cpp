// Acceptance suite: one line per criterion, every tolerance pinned in code.
// Exit status 0 only when all criteria pass inside their runtime budgets.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oscil/oscillation.hpp"
#include "oscil/psi.hpp"
#include "oscil/regions2d.hpp"
#include "oscil/regions_md.hpp"
#include "oscil/report.hpp"
#include "oscil/rng.hpp"

using namespace oscil;

namespace {

constexpr std::uint64_t kSeed = 20250809;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) {
        detail += (detail.empty() ? "" : "; ") + what;
    }
};

Rat random_rat_up_to_64(const RngStream& rng, std::uint64_t idx) {
    Int den = rng.uniform_bits(2 * idx, 64) + 1;
    Int num = rng.uniform_bits(2 * idx + 1, 64) % (den + 1);
    return Rat(num, den);
}

// --- C1: oracle equivalence -------------------------------------------------

Outcome criterion1() {
    Outcome out;
    RngStream rng(kSeed, 1);
    long checked = 0;
    for (long i = 0; i < 1000; ++i) {
        Rat alpha = random_rat_up_to_64(rng, i);
        long t = 1 + static_cast<long>(rng.below(5000 + i, 1000));
        PsiRecord cf = psi_cf_1d(alpha, t);
        PsiRecord nv = psi_naive(MatrixTheta::scalar(alpha), t);
        out.require(cf.value == nv.value, "cf vs naive mismatch at sample " + std::to_string(i));
        ++checked;
        if (!out.pass) break;
    }
    RngStream rng2(kSeed, 2);
    for (long i = 0; out.pass && i < 50; ++i) {
        Rat a = i % 2 ? rng2.uniform_rat(4 * i, 128) : random_rat_up_to_64(rng2, 4000 + i);
        Rat b = i % 2 ? rng2.uniform_rat(4 * i + 1, 128) : random_rat_up_to_64(rng2, 5000 + i);
        auto sweep = psi_form2_sweep(a, b, 30);
        MatrixTheta theta = MatrixTheta::row2(a, b);
        for (long t = 1; t <= 30; ++t)
            out.require(sweep[t - 1].value == psi_naive(theta, t).value,
                        "form2 sweep vs naive mismatch");
    }
    for (long i = 0; out.pass && i < 50; ++i) {
        long m = 2 + (i % 2);
        std::vector<Rat> alphas;
        for (long j = 0; j < m; ++j) alphas.push_back(rng2.uniform_rat(100 * i + j + 7000, 128));
        auto sweep = psi_simul_sweep(alphas, 30);
        MatrixTheta theta = MatrixTheta::column(alphas);
        for (long t = 1; t <= 30; ++t)
            out.require(sweep[t - 1].value == psi_naive(theta, t).value,
                        "simul sweep vs naive mismatch");
    }
    out.note(std::to_string(checked) + " cf samples + 100 sweep matrices");
    return out;
}

// --- C2: Dirichlet invariants ------------------------------------------------

Outcome criterion2() {
    Outcome out;
    RngStream rng(kSeed, 3);
    for (long i = 0; i < 1000; ++i) {
        Rat a = rng.uniform_rat(2 * i, 128), b = rng.uniform_rat(2 * i + 1, 128);
        long t = 1 + static_cast<long>(rng.below(9000 + i, 40));
        Rat v = psi_form2_sweep(a, b, t).back().value;
        out.require(v <= Rat(1, t * t + 2 * t), "form2 Dirichlet violated");
        if (!out.pass) break;
    }
    RngStream rng2(kSeed, 4);
    for (long i = 0; out.pass && i < 1000; ++i) {
        long m = 2 + (i % 2);
        long Q = 1 + static_cast<long>(rng2.below(8000 + i, m == 2 ? 25 : 10));
        std::vector<Rat> alphas;
        for (long j = 0; j < m; ++j) alphas.push_back(rng2.uniform_rat(100 * i + j, 128));
        long T = 1;
        for (long j = 0; j < m; ++j) T *= Q;
        Rat v = psi_simul_sweep(alphas, T).back().value;
        out.require(v <= Rat(1, Q), "simul Dirichlet violated");
    }
    out.note("1000 samples per regime, zero violations");
    return out;
}

// --- C3: exact sums vs paper bounds ------------------------------------------

Outcome criterion3() {
    Outcome out;
    Lemma2Result l2 = lemma2_sum(4);
    out.require(l2.sum == Rat(4) + Rat(142, 105), "lemma2(4) != 4 + 142/105");
    for (long k : {4L, 16L, 64L, 128L})
        out.require(lemma2_sum(k).bound_ok, "lemma2 bound failed at k=" + std::to_string(k));
    Lemma6Result l6 = lemma6_sum(4, 2);
    out.require(l6.sum == Rat(61, 144), "lemma6(m=2,k=4) != 61/144");
    for (long m : {2L, 3L})
        for (long k : {4L, 100L, 500L})
            out.require(lemma6_sum(k, m).ok, "lemma6 bound failed");
    out.note("lemma2 k in {4,16,64,128}, lemma6 m in {2,3} x k in {4,100,500}, exact");
    return out;
}

// --- C4: counting oracles ------------------------------------------------------

Outcome criterion4() {
    Outcome out;
    RngStream rng(kSeed, 5);
    long done = 0;
    for (std::uint64_t trial = 0; done < 1000; ++trial) {
        long span = 6 + static_cast<long>(rng.below(trial + 1, 40));
        auto poly = testgen::random_convex_lattice_polygon(rng, trial, span);
        if (!poly) continue;
        ++done;
        if (!jarnik_check(*poly).ok) {
            out.require(false, "jarnik failed");
            break;
        }
    }
    RngStream rng2(kSeed, 6);
    done = 0;
    for (std::uint64_t trial = 0; out.pass && done < 10000; ++trial) {
        long span = 4 + static_cast<long>(rng2.below(trial + 1, 30));
        auto poly = testgen::random_convex_lattice_polygon(rng2, trial, span);
        if (!poly) continue;
        auto pts = poly->lattice_points();
        PickStatus st = pick_bound_check(pts, poly->area());
        if (st == PickStatus::hypothesis_not_met) continue;
        ++done;
        out.require(st == PickStatus::ok, "pick bound failed");
    }
    RngStream rng3(kSeed, 7);
    done = 0;
    for (std::uint64_t i = 0; out.pass && done < 1000; ++i) {
        long x1 = 2 + static_cast<long>(rng3.below(8 * i + 1, 50));
        long x2 = 2 + static_cast<long>(rng3.below(8 * i + 2, 50));
        long y1 = 2 + static_cast<long>(rng3.below(8 * i + 3, 50));
        long y2 = 2 + static_cast<long>(rng3.below(8 * i + 4, 50));
        Mat2 m{x1, x2, y1, y2};
        if (m.singular()) continue;
        Rat side(1 + static_cast<long>(rng3.below(8 * i + 5, 10)));
        Rat cx(static_cast<long>(rng3.below(8 * i + 6, 300)), 10);
        Rat cy(static_cast<long>(rng3.below(8 * i + 7, 300)), 10);
        ++done;
        Lemma1Result r = lemma1_count_check(CenterLattice(m, Rat(1, 10), 4),
                                            Square({cx, cy}, side));
        out.require(r.ok, "lemma1 bound failed");
    }
    RngStream rng4(kSeed, 8);
    for (long i = 0; out.pass && i < 1000; ++i) {
        long mdim = 2 + (i % 2);
        long k = 16 + static_cast<long>(rng4.below(6 * i + 1, 3000));
        long lo = (k + 1) / 2;
        long q1 = lo + static_cast<long>(rng4.below(6 * i + 2, k - lo));
        long q2 = q1 + 1 + static_cast<long>(rng4.below(6 * i + 3, k - q1));
        Rat eps(1 + static_cast<long>(rng4.below(6 * i + 4, 30)), 31);
        Rat lam(1 + static_cast<long>(rng4.below(6 * i + 5, 10)), 10);
        StripD s(q1, q2, k, mdim, eps);
        RectC c = RectC::sized(q1, q2, lam, Rat(1, 10), Rat(-5, 7), Rat(3, 11));
        long count = static_cast<long>(d_region_points(s, c).size());
        out.require(Rat(count).pow(mdim) <= lemma11_bound_pow_m(s, lam),
                    "lemma11 bound failed");
    }
    out.note("jarnik 1000, pick 10000, lemma1 1000, lemma11 1000: zero violations");
    return out;
}

// --- C5: 2D measure cross-validation ------------------------------------------

Outcome criterion5() {
    Outcome out;
    Square S = Square::unit();
    MeasureEstimate exact =
        measure_mbar_2d(8, Rat(1, 10), S, MeasureMethod::exact_fiber_integration, 0, 0);
    MeasureEstimate mc =
        measure_mbar_2d(8, Rat(1, 10), S, MeasureMethod::point_mc, 1000000, kSeed);
    // 4 sigma with the distribution-free sigma bound 1/(2 sqrt(n))
    Rat four_sigma = Rat(2) * sqrt_upper(Rat(1, 1000000));
    Rat gap = (exact.value - mc.value).abs();
    out.require(gap <= four_sigma, "exact vs point-mc outside 4 sigma");
    out.note("exact " + exact.value.to_decimal_string() + ", mc " +
             mc.value.to_decimal_string() + ", |gap| " + gap.to_decimal_string() +
             " <= " + four_sigma.to_decimal_string());
    return out;
}

// --- C6: Lemma 3 bands at k = 50, 100 ------------------------------------------

Outcome criterion6() {
    Outcome out;
    Square S = Square::centered(Rat(1, 2), Rat(1, 2), Rat(1, 2));
    Rat eps(1, 100);
    MeasureEstimate est100 =
        measure_mbar_2d(100, eps, S, MeasureMethod::fiber_mc, 2000, kSeed);
    Lemma3Lemma4Report rep100 = lemma3_lemma4_band(est100);
    out.require(est100.value - est100.ci_halfwidth <= Rat(1, 160),
                "upper band estimate - CI > 5 eps lam^2 = 1/160");
    out.require(rep100.upper_ok && rep100.lemma4_ok, "lemma3/lemma4 band flags");
    out.require(rep100.lower_band_positive, "lower band not positive at eps=1/100");
    MeasureEstimate est50 = measure_mbar_2d(50, eps, S, MeasureMethod::fiber_mc, 1000, kSeed);
    Lemma3Lemma4Report rep50 = lemma3_lemma4_band(est50);
    // trend check: the margin over the lower band must not degrade as k
    // doubles, up to the Monte-Carlo noise of both runs
    Rat margin100 = est100.value - rep100.lower_band.hi;
    Rat margin50 = est50.value - rep50.lower_band.hi;
    out.require(margin100 >= margin50 - est50.ci_halfwidth - est100.ci_halfwidth,
                "lower-band margin degraded from k=50 to k=100");
    out.note("est(100) " + est100.value.to_decimal_string() + " +- " +
             est100.ci_halfwidth.to_decimal_string() + ", margin(50) " +
             margin50.to_decimal_string() + " -> margin(100) " +
             margin100.to_decimal_string());
    return out;
}

// --- C7: Lemma 5 / 14 bands (m = 2) ---------------------------------------------

Outcome criterion7() {
    Outcome out;
    Rat eps(1, 100), lam(1);
    MdEstimate est = measure_mbar_md(1000, eps, 2, BoxMd::unit(2), 10000000, kSeed);
    Lemma5Lemma14Report rep = lemma5_lemma14_check(est, lam);
    // bands re-derived exactly in rationals
    out.require(rep.lemma14_band == Rat(1, 15000) - Rat(289, 25000000),
                "lemma14 band mismatch");
    out.require(rep.lemma5_complement_band == Rat(2, 625), "lemma5 band mismatch");
    out.require(est.value >= rep.lemma14_band - est.ci_halfwidth,
                "estimate below lemma14 band - CI");
    out.require(est.value <= rep.lemma5_complement_band + est.ci_halfwidth,
                "estimate above lemma5 band + CI");
    out.note("estimate " + est.value.to_decimal_string() + " in [" +
             (rep.lemma14_band - est.ci_halfwidth).to_decimal_string() + ", " +
             (rep.lemma5_complement_band + est.ci_halfwidth).to_decimal_string() + "]");
    return out;
}

// --- C8: classification inclusions (m = 2) ---------------------------------------

Outcome criterion8() {
    Outcome out;
    ClassifyReport rep = classify_pairs(1000, 2, Rat(1, 5), Rat(1), Rat(1, 10), 0, kSeed);
    out.require(rep.meaningful_regime, "regime gate (1+delta) eps lam sqrt(k) > 6 not met");
    out.require(rep.total_pairs == 125250, "Tr_k size unexpected");
    out.require(rep.violations_j0_subset_j1 == 0, "J0 not contained in J1");
    out.require(rep.violations_j1_subset_v == 0, "J1 not contained in V cap Tr_k");
    out.require(rep.violations_collinear == 0, "collinearity violated");
    out.require(rep.violations_gamma == 0, "step bound gamma violated");
    out.require(rep.violations_sine == 0, "sin omega bound violated");
    out.require(rep.violations_lemma11 == 0, "lemma11 per-pair bound violated");
    out.require(rep.lemma13_ok_j1 && rep.lemma13_ok_v, "lemma13 count bound failed");
    std::ostringstream ss;
    ss << "full Tr_1000 (" << rep.total_pairs << " pairs): J0 " << rep.j0_count << ", J1 "
       << rep.j1_count << ", V cap Tr " << rep.v_count << ", lemma13 "
       << (rep.lemma13_trivial ? "trivially satisfied" : "satisfied");
    out.note(ss.str());
    return out;
}

// --- C9: oscillation experiments ---------------------------------------------------

Outcome criterion9() {
    Outcome out;
    for (Regime regime : {Regime::form2, Regime::simul}) {
        ExperimentConfig cfg;
        cfg.regime = regime;
        cfg.m = 2;
        cfg.eps = Rat(1, 2);
        cfg.T = 5000;
        cfg.pair_count = 100;
        cfg.seed = kSeed;
        ExperimentResult res = run_sign_experiment(cfg);
        for (const auto& p : res.pairs)
            out.require(p.degenerate || p.sign_changes >= 1,
                        std::string(regime_name(regime)) + ": pair without sign change");
        out.require(res.median_changes > res.median_changes_at_tenth,
                    std::string(regime_name(regime)) +
                        ": median at T=5000 not above median at T=500");
        out.require(res.total_implication_violations == 0,
                    std::string(regime_name(regime)) + ": hit sign implication violated");
        std::ostringstream ss;
        ss << regime_name(regime) << " changes min/med/max " << res.min_changes << "/"
           << res.median_changes << "/" << res.max_changes << " (med@500 "
           << res.median_changes_at_tenth << ")";
        out.note(ss.str());
    }
    return out;
}

// --- C10: Borel-Cantelli density (m = 2) ---------------------------------------------

Outcome criterion10() {
    Outcome out;
    ExperimentConfig cfg;
    cfg.regime = Regime::simul;
    cfg.m = 2;
    cfg.eps = Rat(1, 100);
    cfg.pair_count = 10000000;
    cfg.seed = kSeed;
    DensityResult d = density_sweep(cfg, 1000);
    Rat expect_band = (Rat(1) - Rat(2, 625)) * (Rat(1, 15000) - Rat(289, 25000000));
    out.require(d.band == expect_band, "density band not the re-derived rational");
    out.require(!d.vacuous, "band unexpectedly vacuous");
    out.require(d.psi_fraction >= d.band - d.ci_halfwidth,
                "empirical P(Psi_k) below band - CI");
    out.note("P(Psi_1000) = " + d.psi_fraction.to_decimal_string() + " (" +
             std::to_string(d.psi_hits) + "/10^7), band " + d.band.to_decimal_string() +
             ", CI " + d.ci_halfwidth.to_decimal_string() +
             (d.pass_strict ? ", strict pass" : ", criterion-form pass"));
    return out;
}

// --- C11: determinism ------------------------------------------------------------------

Outcome criterion11() {
    Outcome out;
    ExperimentConfig cfg;
    cfg.regime = Regime::simul;
    cfg.m = 2;
    cfg.eps = Rat(1, 2);
    cfg.T = 300;
    cfg.pair_count = 10;
    cfg.seed = kSeed;
    cfg.keep_diffs = true;
    cfg.threads = 1;
    ExperimentResult a = run_sign_experiment(cfg);
    cfg.threads = 3;
    ExperimentResult b = run_sign_experiment(cfg);
    std::string ja = json_dump(experiment_to_json(a));
    std::string jb = json_dump(experiment_to_json(b));
    out.require(ja == jb, "experiment JSON differs across thread hints");
    out.require(csv_hits_from_json(Json::parse(ja)) == csv_hits_from_json(Json::parse(jb)),
                "hits CSV differs");
    out.require(csv_diffs_from_json(Json::parse(ja)) == csv_diffs_from_json(Json::parse(jb)),
                "diffs CSV differs");
    ExperimentConfig dc = cfg;
    dc.pair_count = 100000;
    dc.threads = 1;
    DensityResult d1 = density_sweep(dc, 64);
    dc.threads = 4;
    DensityResult d2 = density_sweep(dc, 64);
    out.require(d1.psi_hits == d2.psi_hits && d1.phi_hits == d2.phi_hits,
                "density tallies differ across thread hints");
    Square S = Square::centered(Rat(1, 2), Rat(1, 2), Rat(1, 2));
    MeasureEstimate m1 = measure_mbar_2d(16, Rat(1, 10), S, MeasureMethod::point_mc, 20000,
                                         kSeed, 1);
    MeasureEstimate m2 = measure_mbar_2d(16, Rat(1, 10), S, MeasureMethod::point_mc, 20000,
                                         kSeed, 5);
    out.require(m1.value == m2.value, "measure tallies differ across thread hints");
    out.note("byte-identical reports and tallies for thread hints {1,3,4,5}");
    return out;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    std::vector<Criterion> criteria = {
        {1, "oracle equivalence (cf / sweeps vs naive)", 120, criterion1},
        {2, "Dirichlet invariants", 120, criterion2},
        {3, "exact sums vs paper bounds (lemmas 2, 6)", 60, criterion3},
        {4, "counting oracles (jarnik, pick, lemmas 1, 11)", 300, criterion4},
        {5, "2D measure: exact fiber integration vs point-MC", 300, criterion5},
        {6, "lemma 3/4 bands at k = 50, 100", 600, criterion6},
        {7, "lemma 5/14 bands at k = 1000 (10^7 samples)", 600, criterion7},
        {8, "classification inclusions over full Tr_1000", 600, criterion8},
        {9, "oscillation experiments (100 pairs, T = 5000)", 900, criterion9},
        {10, "Borel-Cantelli density at k = 1000 (10^7 pairs)", 900, criterion10},
        {11, "determinism across seeds and thread hints", 300, criterion11},
    };
    bool all_pass = true;
    for (const auto& c : criteria) {
        if (only && c.id != only) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_budget = secs <= c.budget_seconds;
        bool pass = out.pass && in_budget;
        all_pass = all_pass && pass;
        std::printf("[%s] C%-2d %s (%.1fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    in_budget ? "" : " OVER BUDGET");
        if (!out.detail.empty()) std::printf("        %s\n", out.detail.c_str());
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
