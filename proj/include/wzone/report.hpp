#pragma once

#include <json.hpp>

#include <cstdio>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wzone/analytic.hpp"
#include "wzone/crypto.hpp"
#include "wzone/scenario.hpp"
#include "wzone/simulation.hpp"
#include "wzone/zone.hpp"

namespace wzone {

using ordered_json = nlohmann::ordered_json;

namespace detail {
inline ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}
inline std::optional<double> read_optional(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}
}  // namespace detail

inline ordered_json summary_to_json(const Summary& s) {
  return ordered_json{{"scenario", s.scenario},
                      {"seed", s.seed},
                      {"iterations", s.iterations},
                      {"claims_per_run", s.claims_per_run},
                      {"success_rate_mean", s.success_rate_mean},
                      {"success_rate_std", s.success_rate_std},
                      {"precision", detail::optional_number(s.precision)},
                      {"recall", detail::optional_number(s.recall)},
                      {"admitted_mean", s.admitted_mean},
                      {"tp", s.tp},
                      {"fp", s.fp},
                      {"fn", s.fn},
                      {"tn", s.tn}};
}

inline Summary summary_from_json(const ordered_json& j) {
  Summary s;
  s.scenario = j.at("scenario").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.iterations = j.at("iterations").get<int>();
  s.claims_per_run = j.at("claims_per_run").get<int>();
  s.success_rate_mean = j.at("success_rate_mean").get<double>();
  s.success_rate_std = j.at("success_rate_std").get<double>();
  s.precision = detail::read_optional(j, "precision");
  s.recall = detail::read_optional(j, "recall");
  s.admitted_mean = j.at("admitted_mean").get<double>();
  s.tp = j.at("tp").get<std::uint64_t>();
  s.fp = j.at("fp").get<std::uint64_t>();
  s.fn = j.at("fn").get<std::uint64_t>();
  s.tn = j.at("tn").get<std::uint64_t>();
  return s;
}

/// One row of the comparative results table.
struct ReportRow {
  std::string scenario;
  double success_mean = 0.0;
  double success_std = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  double admitted_mean = 0.0;
  int claims = 30;

  static ReportRow from(const Summary& s) {
    return {scenario_display_name(s.scenario), s.success_rate_mean, s.success_rate_std, s.precision,
            s.recall, s.admitted_mean, s.claims_per_run};
  }
};

inline std::string fixed(double v, int digits) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

inline std::string render_table(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                  const std::string& e) {
    out << std::left << std::setw(20) << a << std::setw(18) << b << std::setw(11) << c << std::setw(9) << d << e
        << "\n";
  };
  line("Scenario", "Success Rate", "Precision", "Recall", "Admitted");
  for (const auto& r : rows) {
    line(r.scenario, fixed(r.success_mean, 3) + " +/- " + fixed(r.success_std, 2),
         r.precision ? fixed(*r.precision, 2) : "N/A", r.recall ? fixed(*r.recall, 3) : "N/A",
         fixed(r.admitted_mean, 1) + "/" + std::to_string(r.claims));
  }
  return out.str();
}

inline constexpr const char* kSummaryCsvHeader =
    "scenario,seed,iterations,claims_per_run,success_rate_mean,success_rate_std,precision,recall,admitted_mean,tp,fp,"
    "fn,tn";

inline void write_summary_csv(std::ostream& out, const std::vector<Summary>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? real_to_text(*v) : std::string("NA"); };
  out << kSummaryCsvHeader << "\n";
  for (const auto& s : rows) {
    out << s.scenario << ',' << s.seed << ',' << s.iterations << ',' << s.claims_per_run << ','
        << real_to_text(s.success_rate_mean) << ',' << real_to_text(s.success_rate_std) << ',' << opt(s.precision)
        << ',' << opt(s.recall) << ',' << real_to_text(s.admitted_mean) << ',' << s.tp << ',' << s.fp << ','
        << s.fn << ',' << s.tn << "\n";
  }
}

inline std::vector<Summary> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSummaryCsvHeader) throw ConfigError("summary CSV: bad header");
  std::vector<Summary> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 13) throw ConfigError("summary CSV: expected 13 columns");
    auto opt = [](const std::string& v) -> std::optional<double> {
      if (v == "NA") return std::nullopt;
      return std::stod(v);
    };
    Summary s;
    s.scenario = f[0];
    s.seed = std::stoull(f[1]);
    s.iterations = std::stoi(f[2]);
    s.claims_per_run = std::stoi(f[3]);
    s.success_rate_mean = std::stod(f[4]);
    s.success_rate_std = std::stod(f[5]);
    s.precision = opt(f[6]);
    s.recall = opt(f[7]);
    s.admitted_mean = std::stod(f[8]);
    s.tp = std::stoull(f[9]);
    s.fp = std::stoull(f[10]);
    s.fn = std::stoull(f[11]);
    s.tn = std::stoull(f[12]);
    out.push_back(std::move(s));
  }
  return out;
}

// Registry file: zone id, quorum threshold, accepted policies, witness keys.

inline ordered_json registry_to_json(const ZoneRegistry& r) {
  ordered_json w = ordered_json::array();
  for (const auto& id : r.witnesses)
    w.push_back({{"witness_id", id.witness_id},
                 {"public_key", to_hex(id.public_key)},
                 {"position", {id.position.x, id.position.y, id.position.z}}});
  return ordered_json{{"zone_id", r.zone_id},
                      {"quorum_k", r.quorum_k},
                      {"policies", std::vector<std::string>(r.policies.begin(), r.policies.end())},
                      {"witnesses", w}};
}

inline ZoneRegistry registry_from_json(const ordered_json& j) {
  ZoneRegistry r;
  r.zone_id = j.at("zone_id").get<std::string>();
  r.quorum_k = j.at("quorum_k").get<int>();
  for (const auto& p : j.at("policies")) r.policies.insert(p.get<std::string>());
  for (const auto& w : j.at("witnesses")) {
    WitnessIdentity id;
    id.witness_id = w.at("witness_id").get<std::string>();
    id.public_key = public_key_from_hex(w.at("public_key").get<std::string>());
    const auto& pos = w.at("position");
    id.position = {pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>()};
    r.witnesses.push_back(std::move(id));
  }
  return r;
}

inline ordered_json calibration_to_json(const CalibrationResult& r) {
  return ordered_json{{"target", calibration_target_name(r.target)},
                      {"parameter", r.parameter},
                      {"value", r.value},
                      {"target_value", r.target_value},
                      {"achieved", r.achieved},
                      {"residual", r.residual}};
}

}  // namespace wzone
