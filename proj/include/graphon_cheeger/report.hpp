#pragma once

// JSON and CSV rendering of spectra, partitions, oracle results and theorem
// reports. Objects use sorted keys so that equal inputs give byte-identical
// documents.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphon_cheeger/core.hpp"
#include "graphon_cheeger/error.hpp"
#include "graphon_cheeger/io.hpp"
#include "graphon_cheeger/partition.hpp"
#include "graphon_cheeger/pipeline.hpp"

namespace graphon_cheeger {

using Json = nlohmann::json;

/// Finite values as numbers; ±∞ and NaN as the strings "inf", "-inf", "nan".
inline Json real_to_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline double real_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return NAN;
}

inline Json reals_to_json(const std::vector<double>& v) {
    Json arr = Json::array();
    for (double x : v) arr.push_back(real_to_json(x));
    return arr;
}

inline Json cellset_to_json(const CellSet& s) { return s.members(); }

inline Json cellsets_to_json(const std::vector<CellSet>& sets) {
    Json arr = Json::array();
    for (const CellSet& s : sets) arr.push_back(cellset_to_json(s));
    return arr;
}

inline std::vector<CellSet> cellsets_from_json(const Json& j, std::size_t n) {
    std::vector<CellSet> out;
    for (const Json& s : j) {
        CellSet set(n);
        for (const Json& i : s) set.insert(i.get<std::size_t>());
        out.push_back(std::move(set));
    }
    return out;
}

inline Json spectrum_to_json(const std::vector<double>& discrete) {
    std::vector<double> graphon;
    for (double l : discrete) graphon.push_back(graphon_lambda_from_discrete(l));
    return {{"discrete", reals_to_json(discrete)}, {"graphon", reals_to_json(graphon)}};
}

inline Json certificates_to_json(const StageCertificates& c) {
    return {
        {"shifted_grid",
         {{"pieces", c.pieces},
          {"total_mass", real_to_json(c.total_mass)},
          {"total_mass_target", real_to_json(c.total_mass_target)},
          {"max_piece_mass", real_to_json(c.max_piece_mass)},
          {"piece_mass_cap", real_to_json(c.piece_mass_cap)},
          {"min_separation", real_to_json(c.grid_separation)},
          {"required_separation", real_to_json(c.required_separation)},
          {"accepted", c.shift_accepted}}},
        {"merge",
         {{"merges", c.merges},
          {"survivors", c.survivors},
          {"anchor_masses", reals_to_json(c.anchor_masses)},
          {"min_separation", real_to_json(c.anchor_separation)}}},
        {"localization",
         {{"norms_sq", reals_to_json(c.localized_norms_sq)},
          {"rayleigh", reals_to_json(c.localized_rayleigh)},
          {"bound", real_to_json(c.localization_bound)},
          {"lipschitz_slack", real_to_json(c.lipschitz_slack)},
          {"supports_disjoint", c.supports_disjoint}}},
        {"sweep", {{"bounds", reals_to_json(c.sweep_bounds)}}},
    };
}

inline Json partition_to_json(const PartitionResult& r) {
    return {
        {"k", r.k},
        {"sets", cellsets_to_json(r.sets)},
        {"expansions", reals_to_json(r.expansions)},
        {"h_alg", real_to_json(r.h_alg)},
        {"bound", real_to_json(r.upper_bound)},
        {"observed_ratio", real_to_json(r.observed_ratio)},
        {"lambda_discrete", real_to_json(r.lambda_discrete)},
        {"lambda_graphon", real_to_json(r.lambda_graphon)},
        {"seed", r.seed},
        {"retries_used", r.retries_used},
        {"shift", {{"offset", reals_to_json(r.shift.offset)},
                   {"side", real_to_json(r.shift.side)},
                   {"margin", real_to_json(r.shift.margin)},
                   {"seed", r.shift.seed}}},
        {"certificates", certificates_to_json(r.certificates)},
    };
}

inline Json oracle_to_json(const OracleResult& o) {
    return {{"k", o.k},
            {"h_exact_cellwise", real_to_json(o.h_exact_cellwise)},
            {"witness", cellsets_to_json(o.witness)},
            {"enumerated_count", o.enumerated_count}};
}

inline Json verify_to_json(const TheoremReport& rep) {
    Json checks = Json::array();
    for (const Check& c : rep.checks) {
        checks.push_back({{"name", c.name},
                          {"lhs", real_to_json(c.lhs)},
                          {"rhs", real_to_json(c.rhs)},
                          {"slack", real_to_json(c.slack)},
                          {"passed", c.passed}});
    }
    return {{"checks", std::move(checks)}, {"passed", rep.passed()}};
}

inline Json sweep_to_json(const SweepResult& s) {
    Json profile = Json::array();
    for (const SweepLevel& l : s.profile) {
        profile.push_back({{"level", real_to_json(l.level)}, {"size", l.size}, {"expansion", real_to_json(l.expansion)}});
    }
    return {{"set", cellset_to_json(s.set)},
            {"expansion", real_to_json(s.expansion)},
            {"rayleigh", real_to_json(s.rayleigh)},
            {"bound", real_to_json(s.bound)},
            {"best_index", s.best_index},
            {"profile", std::move(profile)}};
}

/// Canonical text: sorted keys, two-space indent, shortest round-trip reals.
inline std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

// CSV emitters ---------------------------------------------------------------

inline std::string spectrum_csv(const std::vector<double>& discrete) {
    std::string out = "index,discrete,graphon\n";
    for (std::size_t i = 0; i < discrete.size(); ++i) {
        out += std::to_string(i + 1) + "," + format_double(discrete[i]) + "," +
               format_double(graphon_lambda_from_discrete(discrete[i])) + "\n";
    }
    return out;
}

inline std::string partition_csv(const PartitionResult& r) {
    std::string out = "set,size,expansion,sweep_bound\n";
    for (std::size_t i = 0; i < r.sets.size(); ++i) {
        out += std::to_string(i + 1) + "," + std::to_string(r.sets[i].size()) + "," + format_double(r.expansions[i]) +
               "," + format_double(r.certificates.sweep_bounds.at(i)) + "\n";
    }
    return out;
}

inline std::string sweep_csv(const SweepResult& s) {
    std::string out = "level,size,expansion,selected\n";
    for (std::size_t i = 0; i < s.profile.size(); ++i) {
        const SweepLevel& l = s.profile[i];
        out += format_double(l.level) + "," + std::to_string(l.size) + "," + format_double(l.expansion) + "," +
               (i == s.best_index ? "1" : "0") + "\n";
    }
    return out;
}

}  // namespace graphon_cheeger
