#pragma once

// Deterministic JSON / CSV emission for experiment results.  Rationals are
// serialized as "p/q" strings (authoritative) with 12-significant-digit
// decimal companions for plotting; field order is fixed, so identical
// configurations produce byte-identical files.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "oscil/oscillation.hpp"

namespace oscil {

using Json = nlohmann::ordered_json;

inline Json config_to_json(const ExperimentConfig& cfg) {
    Json j;
    j["regime"] = regime_name(cfg.regime);
    j["m"] = cfg.m;
    j["eps"] = cfg.eps.to_fraction_string();
    j["lam"] = cfg.lam.to_fraction_string();
    j["delta"] = cfg.delta.to_fraction_string();
    j["k_ladder"] = cfg.ladder();
    j["T"] = cfg.T;
    j["pair_count"] = cfg.pair_count;
    j["denom_bits"] = cfg.denom_bits;
    j["seed"] = cfg.seed;
    j["max_points"] = cfg.max_points;
    j["keep_diffs"] = cfg.keep_diffs;
    return j;
}

inline ExperimentConfig config_from_json(const Json& j) {
    ExperimentConfig cfg;
    if (j.contains("regime")) {
        std::string r = j["regime"];
        if (r == "1x2")
            cfg.regime = Regime::form2;
        else if (r == "mx1")
            cfg.regime = Regime::simul;
        else
            throw input_error("config: unknown regime '" + r + "'");
    }
    if (j.contains("m")) cfg.m = j["m"];
    if (j.contains("eps")) cfg.eps = Rat::parse(j["eps"]);
    if (j.contains("lam")) cfg.lam = Rat::parse(j["lam"]);
    if (j.contains("delta")) cfg.delta = Rat::parse(j["delta"]);
    if (j.contains("k_ladder")) cfg.k_ladder = j["k_ladder"].get<std::vector<long>>();
    if (j.contains("T")) cfg.T = j["T"];
    if (j.contains("pair_count")) cfg.pair_count = j["pair_count"];
    if (j.contains("denom_bits")) cfg.denom_bits = j["denom_bits"];
    if (j.contains("seed")) cfg.seed = j["seed"];
    if (j.contains("max_points")) cfg.max_points = j["max_points"];
    if (j.contains("keep_diffs")) cfg.keep_diffs = j["keep_diffs"];
    return cfg;
}

inline Json experiment_to_json(const ExperimentResult& res) {
    Json j;
    j["config"] = config_to_json(res.config);
    Json pairs = Json::array();
    for (const auto& p : res.pairs) {
        Json jp;
        jp["id"] = p.index;
        jp["sign_changes"] = p.sign_changes;
        jp["change_positions"] = p.change_positions;
        jp["changes_at_tenth"] = p.changes_at_tenth;
        jp["degenerate"] = p.degenerate;
        jp["zero_psi_events"] = p.zero_psi_events;
        jp["implication_violations"] = p.implication_violations;
        Json hits = Json::array();
        for (const auto& h : p.hits) {
            Json jh;
            jh["k"] = h.k;
            jh["psi1"] = h.psi1.to_fraction_string();
            jh["psi2"] = h.psi2.to_fraction_string();
            jh["in_Psi"] = h.in_psi;
            jh["in_Phi"] = h.in_phi;
            hits.push_back(std::move(jh));
        }
        jp["hits"] = std::move(hits);
        if (!p.diffs.empty()) {
            Json diffs = Json::array();
            for (const auto& d : p.diffs) diffs.push_back(d.to_fraction_string());
            jp["diffs"] = std::move(diffs);
        }
        pairs.push_back(std::move(jp));
    }
    j["per_pair"] = std::move(pairs);
    Json s;
    s["pair_count"] = static_cast<long>(res.pairs.size());
    s["min_changes"] = res.min_changes;
    s["median_changes"] = res.median_changes;
    s["max_changes"] = res.max_changes;
    s["median_changes_at_tenth"] = res.median_changes_at_tenth;
    s["degenerate_count"] = res.degenerate_count;
    s["implication_violations"] = res.total_implication_violations;
    j["summary"] = std::move(s);
    return j;
}

inline Json density_to_json(const DensityResult& d) {
    Json j;
    j["k"] = d.k;
    j["eps"] = d.eps.to_fraction_string();
    j["samples"] = d.samples;
    j["psi_hits"] = d.psi_hits;
    j["phi_hits"] = d.phi_hits;
    j["psi_fraction"] = d.psi_fraction.to_fraction_string();
    j["psi_fraction_dec"] = d.psi_fraction.to_decimal_string();
    j["phi_fraction"] = d.phi_fraction.to_fraction_string();
    j["ci_halfwidth"] = d.ci_halfwidth.to_fraction_string();
    j["ci_halfwidth_dec"] = d.ci_halfwidth.to_decimal_string();
    j["band"] = d.band.to_fraction_string();
    j["band_dec"] = d.band.to_decimal_string();
    j["vacuous"] = d.vacuous;
    j["pass_criterion"] = d.pass_criterion;
    j["pass_strict"] = d.pass_strict;
    return j;
}

/// One row per (pair, k): the flat hits table.
inline std::string csv_hits_from_json(const Json& report) {
    std::ostringstream out;
    out << "pair_id,k,psi1,psi2,psi1_dec,psi2_dec,in_Psi,in_Phi,sign_changes\n";
    for (const auto& p : report.at("per_pair")) {
        long id = p.at("id");
        long changes = p.at("sign_changes");
        for (const auto& h : p.at("hits")) {
            Rat psi1 = Rat::parse(h.at("psi1"));
            Rat psi2 = Rat::parse(h.at("psi2"));
            out << id << ',' << h.at("k").get<long>() << ',' << psi1.to_fraction_string()
                << ',' << psi2.to_fraction_string() << ',' << psi1.to_decimal_string()
                << ',' << psi2.to_decimal_string() << ','
                << (h.at("in_Psi").get<bool>() ? 1 : 0) << ','
                << (h.at("in_Phi").get<bool>() ? 1 : 0) << ',' << changes << '\n';
        }
    }
    return out.str();
}

/// One row per (pair, t): emitted only when diffs were kept.
inline std::string csv_diffs_from_json(const Json& report) {
    std::ostringstream out;
    out << "pair_id,t,diff,diff_dec\n";
    for (const auto& p : report.at("per_pair")) {
        if (!p.contains("diffs")) continue;
        long id = p.at("id");
        long t = 0;
        for (const auto& d : p.at("diffs")) {
            Rat diff = Rat::parse(d.get<std::string>());
            out << id << ',' << ++t << ',' << diff.to_fraction_string() << ','
                << diff.to_decimal_string() << '\n';
        }
    }
    return out.str();
}

inline std::string json_dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open '" + path + "' for writing");
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Deterministic file naming: <command>-<seed>-<k>.<ext>.
inline std::string report_basename(const std::string& command, std::uint64_t seed, long k) {
    return command + "-" + std::to_string(seed) + "-" + std::to_string(k);
}

}  // namespace oscil
