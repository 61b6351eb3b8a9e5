#pragma once

// Experiment harness: random matrix pairs, sign-change statistics of
// psi_theta - psi_theta', Borel-Cantelli style hits of
// Psi_k = (complement of M_k-bar) x M_k-bar and Phi_k with roles swapped,
// and empirical densities of Psi_k against the lemma-derived lower bands.

#include <algorithm>
#include <optional>
#include <vector>

#include "oscil/parallel.hpp"
#include "oscil/psi.hpp"
#include "oscil/regions2d.hpp"
#include "oscil/regions_md.hpp"
#include "oscil/rng.hpp"
#include "oscil/stats.hpp"

namespace oscil {

enum class Regime { form2, simul };  // (m=1, n=2) and (m>=2, n=1)

inline const char* regime_name(Regime r) { return r == Regime::form2 ? "1x2" : "mx1"; }

struct ExperimentConfig {
    Regime regime = Regime::form2;
    long m = 2;  // rows in the simul regime
    Rat eps{1, 2};  // maximizes Psi_k/Phi_k hit rates (product of complementary events)
    Rat lam{1, 2};
    Rat delta{1, 10};
    std::vector<long> k_ladder;  // defaulted from the regime when empty
    long T = 5000;
    long pair_count = 100;
    unsigned denom_bits = 128;
    std::uint64_t seed = 1;
    long long max_points = 1'000'000'000;
    unsigned threads = 0;
    bool keep_diffs = false;  // per-(pair, t) diff table in reports

    static std::vector<long> default_ladder(Regime regime) {
        std::vector<long> out;
        long top = regime == Regime::form2 ? 9 : 14;
        for (long p = 4; p <= top; ++p) out.push_back(1L << p);
        return out;
    }

    void validate() const {
        if (!(eps > Rat(0) && eps < Rat(1)))
            throw input_error("ExperimentConfig: eps must be in (0,1)");
        if (!(delta > Rat(0) && delta < Rat(1)))
            throw input_error("ExperimentConfig: delta must be in (0,1)");
        if (!(lam > Rat(0) && lam <= Rat(1)))
            throw input_error("ExperimentConfig: lam must be in (0,1]");
        if (regime == Regime::simul && m < 2)
            throw input_error("ExperimentConfig: simul regime needs m >= 2");
        if (T < 1) throw input_error("ExperimentConfig: T must be >= 1");
        if (pair_count < 0) throw input_error("ExperimentConfig: pair_count must be >= 0");
        if (denom_bits < 1 || denom_bits > 128)
            throw input_error("ExperimentConfig: denom_bits must be in [1, 128]");
        for (std::size_t i = 1; i < k_ladder.size(); ++i)
            if (k_ladder[i] <= k_ladder[i - 1])
                throw input_error("ExperimentConfig: k_ladder must be strictly increasing");
    }

    std::vector<long> ladder() const {
        return k_ladder.empty() ? default_ladder(regime) : k_ladder;
    }
    long entries_per_matrix() const { return regime == Regime::form2 ? 2 : m; }
};

struct PairSample {
    MatrixTheta theta, theta2;
    std::uint64_t seed = 0;
    long index = 0;
};

/// Deterministic dyadic sampling: entry j of matrix w in pair i draws the
/// counter (i * 2 + w) * dim + j of one keyed stream.
inline std::vector<PairSample> sample_pairs(const ExperimentConfig& cfg) {
    cfg.validate();
    RngStream rng(cfg.seed, 0x0A11);
    long dim = cfg.entries_per_matrix();
    std::vector<PairSample> out;
    out.reserve(cfg.pair_count);
    for (long i = 0; i < cfg.pair_count; ++i) {
        auto draw = [&](long which) {
            std::vector<Rat> entries;
            entries.reserve(dim);
            for (long j = 0; j < dim; ++j)
                entries.push_back(rng.uniform_rat(
                    static_cast<std::uint64_t>(i * 2 + which) * dim + j, cfg.denom_bits));
            return cfg.regime == Regime::form2
                       ? MatrixTheta::row2(entries[0], entries[1])
                       : MatrixTheta::column(std::move(entries));
        };
        out.push_back({draw(0), draw(1), cfg.seed, i});
    }
    return out;
}

struct KHit {
    long k = 0;
    Rat psi1, psi2;
    bool in_psi = false, in_phi = false;
};

struct PairOutcome {
    long index = 0;
    long sign_changes = 0;
    std::vector<long> change_positions;
    long changes_at_tenth = 0;  // prefix count at T/10
    bool degenerate = false;    // identically zero difference
    long zero_psi_events = 0;   // t <= T with an exact psi = 0
    long implication_violations = 0;
    std::vector<KHit> hits;
    std::vector<Rat> diffs;  // kept only when the config asks
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<PairOutcome> pairs;
    long min_changes = 0, median_changes = 0, max_changes = 0;
    long median_changes_at_tenth = 0;
    long degenerate_count = 0;
    long total_implication_violations = 0;
};

namespace detail_osc {

inline bool in_mbar(Regime regime, long m, const Rat& psi_at_k, long k, const Rat& eps) {
    if (regime == Regime::form2) return psi_at_k <= eps / Rat(Int(k) * Int(k));
    return cmp_rat_vs_root_multiple(psi_at_k, eps, k, m) <= 0;
}

}  // namespace detail_osc

/// Hits of Psi_k / Phi_k along the ladder for one pair, with the strict
/// sign implication checked exactly at every hit.
inline PairOutcome bc_hits(const PairSample& pair, const std::vector<long>& ladder,
                           const Rat& eps, const PsiBudget& budget = {}) {
    PairOutcome out;
    out.index = pair.index;
    if (ladder.empty()) return out;
    long kmax = ladder.back();
    Regime regime = pair.theta.m == 1 ? Regime::form2 : Regime::simul;
    auto s1 = psi_sweep(pair.theta, kmax, budget);
    auto s2 = psi_sweep(pair.theta2, kmax, budget);
    for (long k : ladder) {
        KHit hit;
        hit.k = k;
        hit.psi1 = s1[k - 1].value;
        hit.psi2 = s2[k - 1].value;
        bool m1 = detail_osc::in_mbar(regime, pair.theta.m, hit.psi1, k, eps);
        bool m2 = detail_osc::in_mbar(regime, pair.theta.m, hit.psi2, k, eps);
        hit.in_psi = !m1 && m2;
        hit.in_phi = m1 && !m2;
        if (hit.in_psi && !(hit.psi1 - hit.psi2 > Rat(0))) ++out.implication_violations;
        if (hit.in_phi && !(hit.psi1 - hit.psi2 < Rat(0))) ++out.implication_violations;
        out.hits.push_back(std::move(hit));
    }
    return out;
}

/// Full per-pair run: sign sequence up to T plus ladder hits, sharing one
/// sweep per matrix.
inline ExperimentResult run_sign_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res;
    res.config = cfg;
    std::vector<PairSample> pairs = sample_pairs(cfg);
    std::vector<long> ladder = cfg.ladder();
    long sweep_len = std::max(cfg.T, ladder.empty() ? 1 : ladder.back());
    res.pairs.resize(pairs.size());
    PsiBudget budget{cfg.max_points};
    parallel_chunks(static_cast<long>(pairs.size()), cfg.threads, [&](long b, long e) {
        for (long i = b; i < e; ++i) {
            const PairSample& pair = pairs[i];
            PairOutcome& out = res.pairs[i];
            out.index = pair.index;
            auto s1 = psi_sweep(pair.theta, sweep_len, budget);
            auto s2 = psi_sweep(pair.theta2, sweep_len, budget);
            int last_sign = 0;
            bool all_zero = true;
            for (long t = 1; t <= cfg.T; ++t) {
                const Rat& v1 = s1[t - 1].value;
                const Rat& v2 = s2[t - 1].value;
                if (v1.is_zero() || v2.is_zero()) ++out.zero_psi_events;
                Rat d = v1 - v2;
                int s = d.sign();
                if (s != 0) {
                    all_zero = false;
                    if (last_sign != 0 && s != last_sign) out.change_positions.push_back(t);
                    last_sign = s;
                }
                if (cfg.keep_diffs) out.diffs.push_back(std::move(d));
            }
            out.sign_changes = static_cast<long>(out.change_positions.size());
            long tenth = std::max(1L, cfg.T / 10);
            for (long pos : out.change_positions)
                if (pos <= tenth) ++out.changes_at_tenth;
            out.degenerate = all_zero;
            Regime regime = cfg.regime;
            for (long k : ladder) {
                KHit hit;
                hit.k = k;
                hit.psi1 = s1[k - 1].value;
                hit.psi2 = s2[k - 1].value;
                bool m1 = detail_osc::in_mbar(regime, cfg.m, hit.psi1, k, cfg.eps);
                bool m2 = detail_osc::in_mbar(regime, cfg.m, hit.psi2, k, cfg.eps);
                hit.in_psi = !m1 && m2;
                hit.in_phi = m1 && !m2;
                if (hit.in_psi && !(hit.psi1 - hit.psi2 > Rat(0)))
                    ++out.implication_violations;
                if (hit.in_phi && !(hit.psi1 - hit.psi2 < Rat(0)))
                    ++out.implication_violations;
                out.hits.push_back(std::move(hit));
            }
        }
    });
    // summary
    std::vector<long> ch, ch10;
    for (const auto& p : res.pairs) {
        ch.push_back(p.sign_changes);
        ch10.push_back(p.changes_at_tenth);
        if (p.degenerate) ++res.degenerate_count;
        res.total_implication_violations += p.implication_violations;
    }
    if (!ch.empty()) {
        std::sort(ch.begin(), ch.end());
        std::sort(ch10.begin(), ch10.end());
        res.min_changes = ch.front();
        res.max_changes = ch.back();
        res.median_changes = ch[ch.size() / 2];
        res.median_changes_at_tenth = ch10[ch10.size() / 2];
    }
    return res;
}

// ---------------------------------------------------------------------------
// Density of Psi_k over random pairs
// ---------------------------------------------------------------------------

struct DensityResult {
    long k = 0;
    Rat eps;
    long samples = 0;
    long psi_hits = 0, phi_hits = 0;
    Rat psi_fraction, phi_fraction, ci_halfwidth;
    Rat band;  // analytic lower bound for P(Psi_k); may be <= 0
    bool vacuous = false;
    bool pass_criterion = false;  // empirical >= band - ci
    bool pass_strict = false;     // empirical - ci >= band
};

/// Empirical P(Psi_k), P(Phi_k) over pair_count sampled pairs against the
/// product band P_low(M_k-under) * P_low(M_k-bar) at lam = 1.
inline DensityResult density_sweep(const ExperimentConfig& cfg, long k) {
    cfg.validate();
    if (k < 2) throw input_error("density_sweep: k must be >= 2");
    DensityResult res;
    res.k = k;
    res.eps = cfg.eps;
    res.samples = cfg.pair_count;
    long n = cfg.pair_count;
    std::vector<unsigned char> kind(n, 0);  // 1 = Psi hit, 2 = Phi hit
    RngStream rng(cfg.seed, 0x0A11);
    long dim = cfg.entries_per_matrix();

    if (cfg.regime == Regime::simul && cfg.denom_bits == 128) {
        // machine-word fast path: entries live on the 2^-128 torus grid
        Int en_scaled = cfg.eps.num() << 128;
        Int thr_int = floor_mul_root(Rat(en_scaled, cfg.eps.den()), k, cfg.m);
        Int cap = (Int(1) << 128) - 1;
        if (thr_int > cap) thr_int = cap;
        u128 thr = u128_from_int(thr_int);
        long m = cfg.m;
        parallel_chunks(n, cfg.threads, [&](long b, long e) {
            std::vector<u128> a(m), v(m);
            for (long i = b; i < e; ++i) {
                auto member = [&](long which) {
                    for (long j = 0; j < m; ++j) {
                        a[j] = rng.uniform_u128(
                            static_cast<std::uint64_t>(i * 2 + which) * m + j);
                        v[j] = 0;
                    }
                    for (long q = 1; q <= k; ++q) {
                        u128 dmax = 0;
                        for (long j = 0; j < m; ++j) {
                            v[j] += a[j];
                            u128 dj = detail::torus_distance(v[j]);
                            if (dj > dmax) dmax = dj;
                        }
                        if (dmax <= thr) return true;
                    }
                    return false;
                };
                bool m1 = member(0), m2 = member(1);
                kind[i] = (!m1 && m2) ? 1 : (m1 && !m2) ? 2 : 0;
            }
        });
    } else {
        parallel_chunks(n, cfg.threads, [&](long b, long e) {
            for (long i = b; i < e; ++i) {
                auto entries = [&](long which) {
                    std::vector<Rat> v;
                    v.reserve(dim);
                    for (long j = 0; j < dim; ++j)
                        v.push_back(rng.uniform_rat(
                            static_cast<std::uint64_t>(i * 2 + which) * dim + j,
                            cfg.denom_bits));
                    return v;
                };
                auto member = [&](std::vector<Rat> en) {
                    if (cfg.regime == Regime::form2)
                        return membership_mbar_2d(en[0], en[1], k, cfg.eps);
                    return membership_mbar_md(en, k, cfg.eps);
                };
                bool m1 = member(entries(0)), m2 = member(entries(1));
                kind[i] = (!m1 && m2) ? 1 : (m1 && !m2) ? 2 : 0;
            }
        });
    }
    for (long i = 0; i < n; ++i) {
        if (kind[i] == 1) ++res.psi_hits;
        if (kind[i] == 2) ++res.phi_hits;
    }
    res.psi_fraction = n ? Rat(res.psi_hits, n) : Rat(0);
    res.phi_fraction = n ? Rat(res.phi_hits, n) : Rat(0);
    res.ci_halfwidth = hoeffding_halfwidth(Rat(1), n, Rat(1, 1000000));

    Rat lam(1);
    if (cfg.regime == Regime::simul) {
        long m = cfg.m;
        Rat low_under = Rat(1) - Rat(2) * (Rat(4) * lam * cfg.eps).pow(m);
        Rat low_bar = (Rat(2) * lam * cfg.eps).pow(m) / Rat(6) -
                      (Rat(68) * lam * cfg.eps * cfg.eps).pow(m) / Rat(4);
        res.band = low_under * low_bar;
        res.vacuous = low_under.sign() <= 0 || low_bar.sign() <= 0;
    } else {
        Rat low_under = Rat(1) - Rat(5) * cfg.eps;
        RatInterval low_bar = lemma3_lower_band(cfg.eps, Rat(1));
        res.band = low_under * low_bar.hi;  // conservative end of the bracket
        res.vacuous = low_under.sign() <= 0 || low_bar.hi.sign() <= 0;
    }
    res.pass_criterion = res.vacuous || res.psi_fraction >= res.band - res.ci_halfwidth;
    res.pass_strict = res.vacuous || res.psi_fraction - res.ci_halfwidth >= res.band;
    return res;
}

}  // namespace oscil
