// oscil: irrationality-measure-function toolkit.
//
// Subcommands: psi, signs, measure2d, measure-md, lemma <id>, experiment,
// report.  Exit codes: 0 all checks passed, 2 a lemma check failed,
// 3 vacuous / below-threshold regime (informational), 4 input error,
// 5 resource cap.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oscil/brackets.hpp"
#include "oscil/geom.hpp"
#include "oscil/oscillation.hpp"
#include "oscil/psi.hpp"
#include "oscil/regions2d.hpp"
#include "oscil/regions_md.hpp"
#include "oscil/report.hpp"
#include "oscil/rng.hpp"

namespace {

using namespace oscil;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 2;
constexpr int kExitVacuous = 3;
constexpr int kExitInput = 4;
constexpr int kExitResource = 5;

std::string show(const Rat& r) {
    return r.to_fraction_string() + " (" + r.to_decimal_string() + ")";
}

std::vector<Rat> parse_rat_list(const std::string& text) {
    std::vector<Rat> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) out.push_back(Rat::parse(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<long> parse_long_list(const std::string& text) {
    std::vector<long> out;
    for (const Rat& r : parse_rat_list(text)) {
        if (!r.is_integer()) throw input_error("expected integer list, got " + text);
        out.push_back(static_cast<long>(r.num().get_si()));
    }
    return out;
}

// --- psi ----------------------------------------------------------------

int cmd_psi(const std::string& regime, const std::string& alpha, const std::string& beta,
            const std::string& alphas, long t, long sweep_T, const std::string& out_path) {
    MatrixTheta theta;
    if (regime == "1x1") {
        theta = MatrixTheta::scalar(Rat::parse(alpha));
    } else if (regime == "1x2") {
        theta = MatrixTheta::row2(Rat::parse(alpha), Rat::parse(beta));
    } else if (regime == "mx1") {
        theta = MatrixTheta::column(parse_rat_list(alphas));
    } else {
        throw input_error("psi: unknown regime '" + regime + "' (1x1, 1x2, mx1)");
    }
    if (sweep_T > 0) {
        auto records = psi_sweep(theta, sweep_T);
        std::ostringstream csv;
        csv << "t,psi,psi_dec\n";
        for (const auto& r : records)
            csv << r.t << ',' << r.value.to_fraction_string() << ','
                << r.value.to_decimal_string() << '\n';
        if (!out_path.empty()) {
            write_file(out_path, csv.str());
            std::printf("wrote %s (%ld rows)\n", out_path.c_str(), sweep_T);
        } else {
            std::fputs(csv.str().c_str(), stdout);
        }
        return kExitOk;
    }
    PsiRecord rec = theta.m == 1 && theta.n == 1 ? psi_cf_1d(theta.entries[0], t)
                                                 : psi_sweep(theta, t).back();
    std::printf("psi(%ld) = %s\n", t, show(rec.value).c_str());
    std::printf("witness x = (");
    for (std::size_t i = 0; i < rec.witness_x.size(); ++i)
        std::printf("%s%ld", i ? ", " : "", rec.witness_x[i]);
    std::printf("), nearest p = (");
    for (std::size_t i = 0; i < rec.witness_p.size(); ++i)
        std::printf("%s%s", i ? ", " : "", rec.witness_p[i].get_str().c_str());
    std::printf(")\n");
    return kExitOk;
}

// --- signs ---------------------------------------------------------------

int cmd_signs(const std::string& regime, const std::string& a1, const std::string& b1,
              const std::string& l1, const std::string& a2, const std::string& b2,
              const std::string& l2, long T, const std::string& out_path) {
    auto build = [&](const std::string& a, const std::string& b, const std::string& l) {
        if (regime == "1x1") return MatrixTheta::scalar(Rat::parse(a));
        if (regime == "1x2") return MatrixTheta::row2(Rat::parse(a), Rat::parse(b));
        if (regime == "mx1") return MatrixTheta::column(parse_rat_list(l));
        throw input_error("signs: unknown regime '" + regime + "'");
    };
    MatrixTheta theta = build(a1, b1, l1), theta2 = build(a2, b2, l2);
    SignSeq seq = sign_sequence(theta, theta2, T);
    std::printf("sign changes up to T=%ld: %ld\n", T, seq.sign_changes());
    std::printf("change positions:");
    for (long p : seq.change_positions) std::printf(" %ld", p);
    std::printf("\n");
    if (!out_path.empty()) {
        std::ostringstream csv;
        csv << "t,diff,diff_dec\n";
        for (long t = 1; t <= T; ++t)
            csv << t << ',' << seq.diff[t - 1].to_fraction_string() << ','
                << seq.diff[t - 1].to_decimal_string() << '\n';
        write_file(out_path, csv.str());
        std::printf("wrote %s\n", out_path.c_str());
    }
    return kExitOk;
}

// --- measures -------------------------------------------------------------

MeasureMethod parse_strategy(const std::string& s) {
    if (s == "exact" || s == "exact-fiber-integration")
        return MeasureMethod::exact_fiber_integration;
    if (s == "fiber-mc") return MeasureMethod::fiber_mc;
    if (s == "point-mc") return MeasureMethod::point_mc;
    throw input_error("unknown strategy '" + s + "' (exact, fiber-mc, point-mc)");
}

int cmd_measure2d(long k, const std::string& eps, const std::string& strategy, long samples,
                  std::uint64_t seed, const std::string& cx, const std::string& cy,
                  const std::string& side, unsigned threads) {
    Square S = Square::centered(Rat::parse(cx), Rat::parse(cy), Rat::parse(side));
    MeasureEstimate est =
        measure_mbar_2d(k, Rat::parse(eps), S, parse_strategy(strategy), samples, seed, threads);
    std::printf("mu(M%ld-bar cap S) [%s] = %s", k, measure_method_name(est.method),
                show(est.value).c_str());
    if (est.ci_halfwidth.sign() > 0)
        std::printf(" +- %s", est.ci_halfwidth.to_decimal_string().c_str());
    std::printf("\n");
    return kExitOk;
}

int cmd_measure_md(long k, const std::string& eps, long m, long samples, std::uint64_t seed,
                   const std::string& corner, const std::string& side, unsigned threads) {
    BoxMd box = side.empty() ? BoxMd::unit(m)
                             : BoxMd::cube(m, Rat::parse(corner), Rat::parse(side));
    MdEstimate est = measure_mbar_md(k, Rat::parse(eps), m, box, samples, seed, threads);
    std::printf("mu(M%ld-bar cap box) = %s +- %s  (%ld samples)\n", k,
                show(est.value).c_str(), est.ci_halfwidth.to_decimal_string().c_str(),
                est.samples);
    return kExitOk;
}

// --- lemma checks -----------------------------------------------------------

int lemma1(long x1, long x2, long y1, long y2, const std::string& eps, long k,
           const std::string& cx, const std::string& cy, const std::string& side) {
    CenterLattice lat(Mat2{x1, x2, y1, y2}, Rat::parse(eps), k);
    Lemma1Result r = lemma1_count_check(
        lat, Square::centered(Rat::parse(cx), Rat::parse(cy), Rat::parse(side)));
    std::printf("lattice points in S: %ld, bound %s + surds: %s\n", r.count,
                r.bound_rational_part.to_decimal_string().c_str(), r.ok ? "OK" : "FAIL");
    return r.ok ? kExitOk : kExitCheckFailed;
}

int lemma2(long k) {
    Lemma2Result r = lemma2_sum(k);
    std::printf("sum 1/Delta over E_%ld pairs (%ld ordered pairs) = %s <= 9k^2 ln k: %s\n", k,
                r.pair_count, show(r.sum).c_str(), r.bound_ok ? "OK" : "FAIL");
    return r.bound_ok ? kExitOk : kExitCheckFailed;
}

int lemma34(long k, const std::string& eps, const std::string& lam, const std::string& cx,
            const std::string& cy, const std::string& strategy, long samples,
            std::uint64_t seed, unsigned threads) {
    Square S = Square::centered(Rat::parse(cx), Rat::parse(cy), Rat::parse(lam));
    MeasureEstimate est = measure_mbar_2d(k, Rat::parse(eps), S, parse_strategy(strategy),
                                          samples, seed, threads);
    Lemma3Lemma4Report rep = lemma3_lemma4_band(est);
    std::printf("estimate = %s +- %s\n", show(est.value).c_str(),
                est.ci_halfwidth.to_decimal_string().c_str());
    std::printf("upper band 5 eps lam^2 = %s: %s (margin %s)\n",
                show(rep.upper_band).c_str(), rep.upper_ok ? "OK" : "FAIL",
                rep.upper_margin.to_decimal_string().c_str());
    std::printf("lower band in [%s, %s]%s: %s (margin %s)\n",
                rep.lower_band.lo.to_decimal_string().c_str(),
                rep.lower_band.hi.to_decimal_string().c_str(),
                rep.vacuous ? " VACUOUS" : "", rep.lower_ok ? "OK" : "FAIL",
                rep.lower_margin.to_decimal_string().c_str());
    std::printf("lemma 4 complement: lam^2 - estimate = %s >= %s: %s\n",
                show(rep.complement_value).c_str(), show(rep.lemma4_band).c_str(),
                rep.lemma4_ok ? "OK" : "FAIL");
    if (!(rep.upper_ok && rep.lower_ok && rep.lemma4_ok)) return kExitCheckFailed;
    return rep.vacuous ? kExitVacuous : kExitOk;
}

int lemma514(long k, const std::string& eps, long m, const std::string& lam, long samples,
             std::uint64_t seed, unsigned threads) {
    Rat lam_r = Rat::parse(lam);
    BoxMd box = BoxMd::cube(m, Rat(0), lam_r);
    MdEstimate est = measure_mbar_md(k, Rat::parse(eps), m, box, samples, seed, threads);
    Lemma5Lemma14Report rep = lemma5_lemma14_check(est, lam_r);
    std::printf("estimate = %s +- %s\n", show(est.value).c_str(),
                est.ci_halfwidth.to_decimal_string().c_str());
    std::printf("lemma 5 complement band 2(4 lam eps)^m = %s: %s (margin %s)\n",
                show(rep.lemma5_complement_band).c_str(), rep.lemma5_ok ? "OK" : "FAIL",
                rep.lemma5_margin.to_decimal_string().c_str());
    std::printf("lemma 14 band = %s%s: %s (margin %s)\n", show(rep.lemma14_band).c_str(),
                rep.lemma14_vacuous ? " VACUOUS" : "", rep.lemma14_ok ? "OK" : "FAIL",
                rep.lemma14_margin.to_decimal_string().c_str());
    if (!(rep.lemma5_ok && rep.lemma14_ok)) return kExitCheckFailed;
    return rep.lemma14_vacuous ? kExitVacuous : kExitOk;
}

int lemma6(long k, long m) {
    Lemma6Result r = lemma6_sum(k, m);
    std::printf("sum gcd^m/q2^m over Tr_%ld (%ld pairs) = %s <= 2k/5 = %s: %s\n", k,
                r.pair_count, show(r.sum).c_str(), Rat(2 * k, 5).to_fraction_string().c_str(),
                r.ok ? "OK" : "FAIL");
    return r.ok ? kExitOk : kExitCheckFailed;
}

std::optional<ConvexPolygon> testpoly(const RngStream& rng, std::uint64_t trial, long span);

int lemma_pick(long trials, long span, std::uint64_t seed) {
    RngStream rng(seed, 0x9C1);
    long done = 0, skipped = 0;
    for (std::uint64_t trial = 0; done < trials; ++trial) {
        if (trial > 50ULL * static_cast<unsigned long long>(trials) + 1000)
            throw resource_error("pick: generator kept collapsing");
        auto poly = testpoly(rng, trial, span);
        if (!poly) continue;
        auto pts = poly->lattice_points();
        PickStatus st = pick_bound_check(pts, poly->area());
        if (st == PickStatus::hypothesis_not_met) {
            ++skipped;
            continue;
        }
        ++done;
        if (st == PickStatus::violated) {
            std::printf("pick bound FAILED on a polygon with %zu points\n", pts.size());
            return kExitCheckFailed;
        }
    }
    std::printf("pick bound N <= 2 mu + 2: OK on %ld random convex polygons (%ld skipped)\n",
                done, skipped);
    return kExitOk;
}

int lemma_jarnik(long trials, long span, std::uint64_t seed) {
    RngStream rng(seed, 0x9C2);
    long done = 0;
    for (std::uint64_t trial = 0; done < trials; ++trial) {
        if (trial > 50ULL * static_cast<unsigned long long>(trials) + 1000)
            throw resource_error("jarnik: generator kept collapsing");
        auto poly = testpoly(rng, trial, span);
        if (!poly) continue;
        ++done;
        JarnikResult r = jarnik_check(*poly);
        if (!r.ok) {
            std::printf("jarnik FAILED: N=%ld P=%s\n", r.N, show(r.P).c_str());
            return kExitCheckFailed;
        }
    }
    std::printf("jarnik P-L < N < L+P: OK on %ld random convex lattice polygons\n", done);
    return kExitOk;
}

int lemma11(long k, long m, const std::string& eps, const std::string& lam,
            const std::string& delta, long trials, std::uint64_t seed) {
    RngStream rng(seed, 0x9C3);
    Rat eps_r = Rat::parse(eps), lam_r = Rat::parse(lam), delta_r = Rat::parse(delta);
    for (long i = 0; i < trials; ++i) {
        long lo = (k + 1) / 2;
        long q1 = lo + static_cast<long>(rng.below(3 * i, k - lo));
        long q2 = q1 + 1 + static_cast<long>(rng.below(3 * i + 1, k - q1));
        StripD s(q1, q2, k, m, eps_r);
        RectC c = RectC::sized(q1, q2, lam_r, delta_r, Rat(-1, 3) * lam_r * Rat(q1),
                               Rat(-2, 7) * lam_r * Rat(q2));
        long count = static_cast<long>(d_region_points(s, c).size());
        if (!(Rat(count).pow(m) <= lemma11_bound_pow_m(s, lam_r))) {
            std::printf("lemma 11 FAILED at (q1,q2)=(%ld,%ld)\n", q1, q2);
            return kExitCheckFailed;
        }
    }
    std::printf("lemma 11 count bound: OK on %ld random Tr_%ld pairs\n", trials, k);
    return kExitOk;
}

int lemma_classify(long k, long m, const std::string& eps, const std::string& lam,
                   const std::string& delta, long samples, std::uint64_t seed,
                   unsigned threads) {
    ClassifyReport rep = classify_pairs(k, m, Rat::parse(eps), Rat::parse(lam),
                                        Rat::parse(delta), samples, seed, threads);
    std::printf("pairs: %ld (J0 %ld, J1 %ld, V cap Tr %ld), regime gate %s\n",
                rep.total_pairs, rep.j0_count, rep.j1_count, rep.v_count,
                rep.meaningful_regime ? "satisfied" : "BELOW threshold (informational)");
    long viol = rep.violations_j0_subset_j1 + rep.violations_j1_subset_v +
                rep.violations_collinear + rep.violations_gamma + rep.violations_sine +
                rep.violations_lemma11;
    std::printf(
        "violations: J0 subset J1 %ld, J1 subset V %ld, collinear %ld, gamma %ld, sine %ld, "
        "lemma11 %ld\n",
        rep.violations_j0_subset_j1, rep.violations_j1_subset_v, rep.violations_collinear,
        rep.violations_gamma, rep.violations_sine, rep.violations_lemma11);
    std::printf("lemma 13 bound: J1 %s, V %s%s\n", rep.lemma13_ok_j1 ? "OK" : "FAIL",
                rep.lemma13_ok_v ? "OK" : "FAIL",
                rep.lemma13_trivial ? " (trivially satisfied: bound exceeds |Tr_k|)" : "");
    if (viol > 0 && rep.meaningful_regime) return kExitCheckFailed;
    if (!rep.lemma13_ok_j1 || !rep.lemma13_ok_v) return kExitCheckFailed;
    return rep.meaningful_regime ? kExitOk : kExitVacuous;
}

int lemma_totient(long m, long P) {
    TotientSeriesResult r = totient_series_check(m, P);
    std::printf("partial sum = %s, target in [%s, %s], tail <= %s: %s\n",
                show(r.partial).c_str(), r.target.lo.to_decimal_string().c_str(),
                r.target.hi.to_decimal_string().c_str(),
                r.tail_bound.to_decimal_string().c_str(), r.ok ? "OK" : "FAIL");
    return r.ok ? kExitOk : kExitCheckFailed;
}

// --- experiment / report ----------------------------------------------------

int cmd_experiment(const ExperimentConfig& cfg, const std::string& out_dir, bool density,
                   long density_k) {
    std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
    std::string dir = out_dir.empty() ? "." : out_dir;
    ExperimentResult res = run_sign_experiment(cfg);
    Json j = experiment_to_json(res);
    long kmax = cfg.ladder().empty() ? 0 : cfg.ladder().back();
    std::string base = dir + "/" + report_basename("experiment", cfg.seed, kmax);
    write_file(base + ".json", json_dump(j));
    write_file(base + ".csv", csv_hits_from_json(j));
    if (cfg.keep_diffs) write_file(base + "-diffs.csv", csv_diffs_from_json(j));
    std::printf("pairs %zu: changes min %ld median %ld max %ld (median at T/10: %ld)\n",
                res.pairs.size(), res.min_changes, res.median_changes, res.max_changes,
                res.median_changes_at_tenth);
    std::printf("degenerate %ld, implication violations %ld\n", res.degenerate_count,
                res.total_implication_violations);
    std::printf("wrote %s.json / .csv\n", base.c_str());
    int code = res.total_implication_violations == 0 ? kExitOk : kExitCheckFailed;
    if (density) {
        DensityResult d = density_sweep(cfg, density_k);
        Json dj = density_to_json(d);
        std::string dbase = dir + "/" + report_basename("density", cfg.seed, density_k);
        write_file(dbase + ".json", json_dump(dj));
        std::printf("density P(Psi_%ld) = %s +- %s vs band %s: %s%s\n", density_k,
                    d.psi_fraction.to_decimal_string().c_str(),
                    d.ci_halfwidth.to_decimal_string().c_str(),
                    d.band.to_decimal_string().c_str(),
                    d.pass_criterion ? "OK" : "FAIL", d.vacuous ? " (vacuous)" : "");
        if (!d.pass_criterion) code = kExitCheckFailed;
        else if (d.vacuous && code == kExitOk) code = kExitVacuous;
    }
    return code;
}

int cmd_report(const std::string& json_path, const std::string& csv_out,
               const std::string& diffs_out) {
    Json j = Json::parse(read_file(json_path));
    if (!csv_out.empty()) {
        write_file(csv_out, csv_hits_from_json(j));
        std::printf("wrote %s\n", csv_out.c_str());
    }
    if (!diffs_out.empty()) {
        write_file(diffs_out, csv_diffs_from_json(j));
        std::printf("wrote %s\n", diffs_out.c_str());
    }
    if (csv_out.empty() && diffs_out.empty())
        std::fputs(csv_hits_from_json(j).c_str(), stdout);
    return kExitOk;
}

std::optional<ConvexPolygon> testpoly(const RngStream& rng, std::uint64_t trial, long span) {
    std::vector<IPoint> pts;
    for (long j = 0; j < 12; ++j)
        pts.push_back({static_cast<long>(rng.below(trial * 64 + 2 * j, span + 1)),
                       static_cast<long>(rng.below(trial * 64 + 2 * j + 1, span + 1))});
    auto hull = convex_hull(pts);
    if (hull.size() < 3) return std::nullopt;
    return ConvexPolygon::from_lattice(hull);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oscil: exact computations around the irrationality measure function"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "degree-of-parallelism hint (0 = auto)");

    // psi
    auto* psi = app.add_subcommand("psi", "evaluate psi_Theta(t) or sweep t = 1..T");
    std::string p_regime = "1x2", p_alpha = "0", p_beta = "0", p_alphas;
    long p_t = 1, p_sweep = 0;
    std::string p_out;
    psi->add_option("--regime", p_regime, "1x1, 1x2 or mx1");
    psi->add_option("--alpha", p_alpha, "first entry (fraction p/q or decimal)");
    psi->add_option("--beta", p_beta, "second entry (1x2)");
    psi->add_option("--alphas", p_alphas, "comma list of entries (mx1)");
    psi->add_option("--t", p_t, "height for a single evaluation");
    psi->add_option("--sweep", p_sweep, "sweep heights 1..T and emit CSV");
    psi->add_option("--out", p_out, "CSV output path");

    // signs
    auto* signs = app.add_subcommand("signs", "sign sequence of psi_Theta - psi_Theta'");
    std::string s_regime = "1x2", s_a1 = "0", s_b1 = "0", s_l1, s_a2 = "0", s_b2 = "0", s_l2;
    long s_T = 100;
    std::string s_out;
    signs->add_option("--regime", s_regime, "1x1, 1x2 or mx1");
    signs->add_option("--alpha", s_a1, "Theta entry");
    signs->add_option("--beta", s_b1, "Theta entry (1x2)");
    signs->add_option("--alphas", s_l1, "Theta entries (mx1)");
    signs->add_option("--alpha2", s_a2, "Theta' entry");
    signs->add_option("--beta2", s_b2, "Theta' entry (1x2)");
    signs->add_option("--alphas2", s_l2, "Theta' entries (mx1)");
    signs->add_option("--T", s_T, "horizon");
    signs->add_option("--out", s_out, "per-t CSV output path");

    // measure2d
    auto* m2d = app.add_subcommand("measure2d", "mu(M_k-bar cap S) in the 1x2 regime");
    long m2_k = 8;
    std::string m2_eps = "1/10", m2_strategy = "point-mc", m2_cx = "1/2", m2_cy = "1/2",
                m2_side = "1";
    long m2_samples = 100000;
    std::uint64_t m2_seed = 1;
    m2d->add_option("--k", m2_k);
    m2d->add_option("--eps", m2_eps);
    m2d->add_option("--strategy", m2_strategy, "exact, fiber-mc or point-mc");
    m2d->add_option("--samples", m2_samples);
    m2d->add_option("--seed", m2_seed);
    m2d->add_option("--cx", m2_cx, "square center x");
    m2d->add_option("--cy", m2_cy, "square center y");
    m2d->add_option("--side", m2_side, "square side");

    // measure-md
    auto* mmd = app.add_subcommand("measure-md", "mu(M_k-bar cap box) in the mx1 regime");
    long md_k = 1000, md_m = 2, md_samples = 100000;
    std::string md_eps = "1/100", md_corner = "0", md_side;
    std::uint64_t md_seed = 1;
    mmd->add_option("--k", md_k);
    mmd->add_option("--m", md_m);
    mmd->add_option("--eps", md_eps);
    mmd->add_option("--samples", md_samples);
    mmd->add_option("--seed", md_seed);
    mmd->add_option("--corner", md_corner, "cube corner (default unit box)");
    mmd->add_option("--side", md_side, "cube side (default unit box)");

    // lemma
    auto* lemma = app.add_subcommand("lemma", "run one lemma/theorem check");
    std::string lemma_id;
    lemma->add_option("id", lemma_id, "1,2,3,4,5,6,7,11,12,13,14,jarnik,pick,totient")
        ->required();
    long l_k = 100, l_m = 2, l_x1 = 2, l_x2 = 1, l_y1 = 1, l_y2 = 1, l_trials = 1000,
         l_samples = 0, l_P = 10000, l_span = 24;
    std::string l_eps = "1/100", l_lam = "1/2", l_delta = "1/10", l_cx = "1/2", l_cy = "1/2",
                l_strategy = "fiber-mc";
    std::uint64_t l_seed = 1;
    long l_mc = 2000;
    lemma->add_option("--k", l_k);
    lemma->add_option("--m", l_m);
    lemma->add_option("--eps", l_eps);
    lemma->add_option("--lam", l_lam);
    lemma->add_option("--delta", l_delta);
    lemma->add_option("--x1", l_x1);
    lemma->add_option("--x2", l_x2);
    lemma->add_option("--y1", l_y1);
    lemma->add_option("--y2", l_y2);
    lemma->add_option("--cx", l_cx, "square center x");
    lemma->add_option("--cy", l_cy, "square center y");
    lemma->add_option("--trials", l_trials);
    lemma->add_option("--samples", l_samples, "0 = full enumeration (ids 12/13)");
    lemma->add_option("--mc-samples", l_mc, "Monte-Carlo samples/fibers (ids 3,4,5,14)");
    lemma->add_option("--strategy", l_strategy, "ids 3/4: exact, fiber-mc, point-mc");
    lemma->add_option("--P", l_P, "series cutoff (totient)");
    lemma->add_option("--span", l_span, "polygon coordinate span (jarnik/pick)");
    lemma->add_option("--seed", l_seed);

    // experiment
    auto* exp = app.add_subcommand("experiment", "random-pair oscillation harness");
    std::string e_config, e_regime, e_eps, e_lam, e_delta, e_ladder, e_outdir = ".";
    long e_m = -1, e_T = -1, e_pairs = -1, e_density_k = 0;
    long long e_maxpoints = -1;
    std::uint64_t e_seed = 0;
    bool e_seed_set = false, e_keep_diffs = false, e_density = false;
    exp->add_option("--config", e_config, "JSON config (flags override file values)");
    exp->add_option("--regime", e_regime, "1x2 or mx1");
    exp->add_option("--m", e_m);
    exp->add_option("--eps", e_eps);
    exp->add_option("--lam", e_lam);
    exp->add_option("--delta", e_delta);
    exp->add_option("--k-ladder", e_ladder, "comma list, strictly increasing");
    exp->add_option("--T", e_T);
    exp->add_option("--pairs", e_pairs);
    exp->add_option("--seed", e_seed)->each([&](const std::string&) { e_seed_set = true; });
    exp->add_option("--max-points", e_maxpoints);
    exp->add_flag("--keep-diffs", e_keep_diffs, "emit the per-(pair,t) diff table");
    exp->add_flag("--density", e_density, "also run a density sweep");
    exp->add_option("--density-k", e_density_k, "k for the density sweep");
    exp->add_option("--out-dir", e_outdir);

    // report
    auto* rep = app.add_subcommand("report", "re-render a JSON report to CSV");
    std::string r_json, r_csv, r_diffs;
    rep->add_option("--json", r_json)->required();
    rep->add_option("--csv", r_csv, "hits CSV output (stdout when omitted)");
    rep->add_option("--diffs-csv", r_diffs, "per-(pair,t) CSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*psi) return cmd_psi(p_regime, p_alpha, p_beta, p_alphas, p_t, p_sweep, p_out);
        if (*signs)
            return cmd_signs(s_regime, s_a1, s_b1, s_l1, s_a2, s_b2, s_l2, s_T, s_out);
        if (*m2d)
            return cmd_measure2d(m2_k, m2_eps, m2_strategy, m2_samples, m2_seed, m2_cx, m2_cy,
                                 m2_side, threads);
        if (*mmd)
            return cmd_measure_md(md_k, md_eps, md_m, md_samples, md_seed, md_corner, md_side,
                                  threads);
        if (*lemma) {
            if (lemma_id == "1")
                return lemma1(l_x1, l_x2, l_y1, l_y2, l_eps, l_k, l_cx, l_cy, l_lam);
            if (lemma_id == "2") return lemma2(l_k);
            if (lemma_id == "3" || lemma_id == "4")
                return lemma34(l_k, l_eps, l_lam, l_cx, l_cy, l_strategy, l_mc, l_seed,
                               threads);
            if (lemma_id == "5" || lemma_id == "14")
                return lemma514(l_k, l_eps, l_m, l_lam, l_mc, l_seed, threads);
            if (lemma_id == "6") return lemma6(l_k, l_m);
            if (lemma_id == "7" || lemma_id == "pick")
                return lemma_pick(l_trials, l_span, l_seed);
            if (lemma_id == "jarnik") return lemma_jarnik(l_trials, l_span, l_seed);
            if (lemma_id == "11")
                return lemma11(l_k, l_m, l_eps, l_lam, l_delta, l_trials, l_seed);
            if (lemma_id == "12" || lemma_id == "13")
                return lemma_classify(l_k, l_m, l_eps, l_lam, l_delta, l_samples, l_seed,
                                      threads);
            if (lemma_id == "totient") return lemma_totient(l_m, l_P);
            throw input_error("unknown lemma id '" + lemma_id + "'");
        }
        if (*exp) {
            ExperimentConfig cfg;
            if (!e_config.empty()) cfg = config_from_json(Json::parse(read_file(e_config)));
            if (!e_regime.empty()) {
                if (e_regime == "1x2")
                    cfg.regime = Regime::form2;
                else if (e_regime == "mx1")
                    cfg.regime = Regime::simul;
                else
                    throw input_error("unknown regime '" + e_regime + "'");
            }
            if (e_m >= 0) cfg.m = e_m;
            if (!e_eps.empty()) cfg.eps = Rat::parse(e_eps);
            if (!e_lam.empty()) cfg.lam = Rat::parse(e_lam);
            if (!e_delta.empty()) cfg.delta = Rat::parse(e_delta);
            if (!e_ladder.empty()) cfg.k_ladder = parse_long_list(e_ladder);
            if (e_T >= 0) cfg.T = e_T;
            if (e_pairs >= 0) cfg.pair_count = e_pairs;
            if (e_seed_set) cfg.seed = e_seed;
            if (e_maxpoints >= 0) cfg.max_points = e_maxpoints;
            if (e_keep_diffs) cfg.keep_diffs = true;
            cfg.threads = threads;
            long dk = e_density_k > 0
                          ? e_density_k
                          : (cfg.ladder().empty() ? 64 : cfg.ladder().back());
            return cmd_experiment(cfg, e_outdir, e_density, dk);
        }
        if (*rep) return cmd_report(r_json, r_csv, r_diffs);
    } catch (const input_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInput;
    } catch (const resource_error& e) {
        std::fprintf(stderr, "resource cap: %s\n", e.what());
        return kExitResource;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitInput;
}
