#include "cmplab/report_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cmplab/errors.hpp"

namespace cmplab {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_document(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

template <class T>
T field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("field \"") + key + "\" has the wrong type: " + e.what());
  }
}

template <class T>
T field_or(const json& doc, const char* key, T fallback) {
  return doc.contains(key) ? field<T>(doc, key) : fallback;
}

template <class T>
std::optional<T> optional_field(const json& doc, const char* key, std::optional<T> fallback) {
  if (!doc.contains(key)) return fallback;
  if (doc.at(key).is_null()) return std::nullopt;
  return field<T>(doc, key);
}

template <class T>
ordered_json optional_to_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string format17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

/// Data rows of a CSV document: comment lines and the header are dropped.
std::vector<std::vector<std::string>> csv_rows(std::string_view text, std::size_t columns) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != columns) {
      throw FormatError("CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(columns));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::uint64_t to_u64(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw FormatError("bad integer in CSV: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad integer in CSV: " + s);
  }
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stod(s, &used);
    if (used != s.size()) throw FormatError("bad number in CSV: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad number in CSV: " + s);
  }
}

std::string with_comment(std::string_view comment) {
  if (comment.empty()) return {};
  return "# " + std::string(comment) + "\n";
}

// --- config ---------------------------------------------------------------

ordered_json regime_to_json(const Regime& regime) {
  return std::visit(
      [](const auto& r) -> ordered_json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Discounted>) {
          return {{"type", "discounted"}, {"gamma", r.gamma}};
        } else if constexpr (std::is_same_v<T, FiniteHorizon>) {
          return {{"type", "finite"}, {"horizon", r.horizon}, {"gamma", r.gamma}};
        } else {
          return {{"type", "averaged"}};
        }
      },
      regime);
}

Regime regime_from_json(const json& doc) {
  const auto type = field<std::string>(doc, "type");
  if (type == "discounted") return Discounted{field<double>(doc, "gamma")};
  if (type == "finite") {
    return FiniteHorizon{field<std::size_t>(doc, "horizon"), field_or<double>(doc, "gamma", 1.0)};
  }
  if (type == "averaged") return TimeAveraged{};
  throw FormatError("unknown regime type \"" + type + "\" (discounted, finite, averaged)");
}

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json doc;
  doc["n"] = c.states;
  doc["m"] = c.actions;
  doc["regime"] = regime_to_json(c.spec.regime());
  if (c.spec.v0()) {
    const auto v = c.spec.v0()->values();
    doc["v0"] = std::vector<double>(v.begin(), v.end());
  }
  doc["reward"] = c.reward ? ordered_json(*c.reward) : ordered_json("random-per-run");
  doc["samples"] = c.samples;
  doc["master_seed"] = c.master_seed;
  doc["tie_tolerance"] = c.tie_tolerance;
  doc["tie_thresholds"] = c.tie_thresholds;
  doc["transport_samples"] = c.transport_samples;
  doc["enumeration_cap"] = c.enumeration_cap;
  const auto& a = c.acceptance;
  doc["acceptance"] = {
      {"frequency_sigmas", optional_to_json(a.frequency_sigmas)},
      {"chi_square_quantile", optional_to_json(a.chi_square_quantile)},
      {"entropy_tolerance_bits", optional_to_json(a.entropy_tolerance_bits)},
      {"max_ties", optional_to_json(a.max_ties)},
      {"require_increasing_tie_counts", a.require_increasing_tie_counts},
      {"max_transport_violations", optional_to_json(a.max_transport_violations)},
      {"volume_alpha", optional_to_json(a.volume_alpha)},
  };
  return doc;
}

ExperimentConfig config_from_doc(const json& doc) {
  if (!doc.is_object()) throw FormatError("config must be a JSON object");
  ExperimentConfig c;
  c.states = field<std::size_t>(doc, "n");
  c.actions = field<std::size_t>(doc, "m");
  std::optional<StateDistribution> v0;
  if (doc.contains("v0") && !doc.at("v0").is_null()) {
    v0 = StateDistribution(field<std::vector<double>>(doc, "v0"));
  }
  c.spec = ValueSpec(regime_from_json(field<json>(doc, "regime")), std::move(v0));
  if (doc.contains("reward")) {
    const json& r = doc.at("reward");
    if (r.is_string()) {
      if (r.get<std::string>() != "random-per-run") {
        throw FormatError("reward must be an array or \"random-per-run\"");
      }
    } else {
      c.reward = field<std::vector<double>>(doc, "reward");
    }
  }
  c.samples = field<std::uint64_t>(doc, "samples");
  c.master_seed = field<std::uint64_t>(doc, "master_seed");
  c.tie_tolerance = field_or<double>(doc, "tie_tolerance", c.tie_tolerance);
  c.workers = field_or<std::size_t>(doc, "workers", c.workers);
  c.tie_thresholds = field_or<std::vector<double>>(doc, "tie_thresholds", c.tie_thresholds);
  c.transport_samples = field_or<std::uint64_t>(doc, "transport_samples", c.transport_samples);
  c.enumeration_cap = field_or<std::uint64_t>(doc, "enumeration_cap", c.enumeration_cap);
  if (doc.contains("acceptance")) {
    const json& a = doc.at("acceptance");
    if (!a.is_object()) throw FormatError("acceptance must be an object");
    auto& t = c.acceptance;
    t.frequency_sigmas = optional_field<double>(a, "frequency_sigmas", t.frequency_sigmas);
    t.chi_square_quantile = optional_field<double>(a, "chi_square_quantile", t.chi_square_quantile);
    t.entropy_tolerance_bits =
        optional_field<double>(a, "entropy_tolerance_bits", t.entropy_tolerance_bits);
    t.max_ties = optional_field<std::uint64_t>(a, "max_ties", t.max_ties);
    t.require_increasing_tie_counts =
        field_or<bool>(a, "require_increasing_tie_counts", t.require_increasing_tie_counts);
    t.max_transport_violations =
        optional_field<std::uint64_t>(a, "max_transport_violations", t.max_transport_violations);
    t.volume_alpha = optional_field<double>(a, "volume_alpha", t.volume_alpha);
  }
  c.validate();
  return c;
}

// --- reports --------------------------------------------------------------

ordered_json frequency_json(const FrequencyReport& r) {
  return {{"n", r.states},
          {"m", r.actions},
          {"samples", r.samples},
          {"counts", r.counts},
          {"frequencies", r.frequencies},
          {"chi_square", r.chi_square},
          {"degrees_of_freedom", r.degrees_of_freedom},
          {"max_abs_deviation", r.max_abs_deviation}};
}

FrequencyReport frequency_from_doc(const json& doc) {
  FrequencyReport r;
  r.states = field<std::size_t>(doc, "n");
  r.actions = field<std::size_t>(doc, "m");
  r.samples = field<std::uint64_t>(doc, "samples");
  r.counts = field<std::vector<std::uint64_t>>(doc, "counts");
  r.frequencies = field<std::vector<double>>(doc, "frequencies");
  r.chi_square = field<double>(doc, "chi_square");
  r.degrees_of_freedom = field<std::uint64_t>(doc, "degrees_of_freedom");
  r.max_abs_deviation = field<double>(doc, "max_abs_deviation");
  return r;
}

ordered_json entropy_json(const EntropyReport& r) {
  return {{"plug_in_entropy_bits", r.plug_in_entropy_bits},
          {"miller_madow_entropy_bits", r.miller_madow_entropy_bits},
          {"target_bits", r.target_bits},
          {"standard_error", r.standard_error},
          {"support_size", r.support_size},
          {"samples", r.samples},
          {"warnings", r.warnings}};
}

EntropyReport entropy_from_doc(const json& doc) {
  EntropyReport r;
  r.plug_in_entropy_bits = field<double>(doc, "plug_in_entropy_bits");
  r.miller_madow_entropy_bits = field<double>(doc, "miller_madow_entropy_bits");
  r.target_bits = field<double>(doc, "target_bits");
  r.standard_error = field<double>(doc, "standard_error");
  r.support_size = field<std::size_t>(doc, "support_size");
  r.samples = field<std::uint64_t>(doc, "samples");
  r.warnings = field_or<std::vector<std::string>>(doc, "warnings", {});
  return r;
}

ordered_json ties_json(const TieReport& r) {
  const auto& q = r.margin_quantiles;
  return {{"tie_tolerance", r.tie_tolerance},
          {"samples", r.samples},
          {"thresholds", r.thresholds},
          {"tie_counts", r.tie_counts},
          {"margin_quantiles",
           {{"min", q.min}, {"p01", q.p01}, {"p05", q.p05}, {"p25", q.p25},
            {"median", q.median}, {"max", q.max}}},
          {"flagged_samples", r.flagged_samples}};
}

TieReport ties_from_doc(const json& doc) {
  TieReport r;
  r.tie_tolerance = field<double>(doc, "tie_tolerance");
  r.samples = field<std::uint64_t>(doc, "samples");
  r.thresholds = field<std::vector<double>>(doc, "thresholds");
  r.tie_counts = field<std::vector<std::uint64_t>>(doc, "tie_counts");
  const auto q = field<json>(doc, "margin_quantiles");
  r.margin_quantiles = {field<double>(q, "min"), field<double>(q, "p01"),
                        field<double>(q, "p05"), field<double>(q, "p25"),
                        field<double>(q, "median"), field<double>(q, "max")};
  r.flagged_samples = field<std::vector<std::uint64_t>>(doc, "flagged_samples");
  return r;
}

ordered_json transport_json(const TransportReport& r) {
  ordered_json pairs = ordered_json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"pi_i", p.pi_i.value},
                     {"pi_j", p.pi_j.value},
                     {"samples", p.samples},
                     {"matrix_violations", p.matrix_violations},
                     {"value_violations", p.value_violations},
                     {"involution_violations", p.involution_violations},
                     {"optimality_checked", p.optimality_checked},
                     {"optimality_violations", p.optimality_violations},
                     {"count_i_optimal", p.count_i_optimal},
                     {"count_j_optimal", p.count_j_optimal},
                     {"volume_z", p.volume_z}});
  }
  return {{"samples", r.samples}, {"total_violations", r.total_violations()}, {"pairs", pairs}};
}

TransportReport transport_from_doc(const json& doc) {
  TransportReport r;
  r.samples = field<std::uint64_t>(doc, "samples");
  for (const auto& p : field<json>(doc, "pairs")) {
    PairTransport t;
    t.pi_i = {field<std::uint64_t>(p, "pi_i")};
    t.pi_j = {field<std::uint64_t>(p, "pi_j")};
    t.samples = field<std::uint64_t>(p, "samples");
    t.matrix_violations = field<std::uint64_t>(p, "matrix_violations");
    t.value_violations = field<std::uint64_t>(p, "value_violations");
    t.involution_violations = field<std::uint64_t>(p, "involution_violations");
    t.optimality_checked = field<std::uint64_t>(p, "optimality_checked");
    t.optimality_violations = field<std::uint64_t>(p, "optimality_violations");
    t.count_i_optimal = field<std::uint64_t>(p, "count_i_optimal");
    t.count_j_optimal = field<std::uint64_t>(p, "count_j_optimal");
    t.volume_z = field<double>(p, "volume_z");
    r.pairs.push_back(t);
  }
  return r;
}

}  // namespace

ExperimentConfig config_from_json(std::string_view text) {
  return config_from_doc(parse_document(text, "config"));
}

std::string config_to_json(const ExperimentConfig& config) {
  return config_json(config).dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
  const auto canonical = config_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string frequency_to_json(const FrequencyReport& r) { return frequency_json(r).dump(2) + "\n"; }
FrequencyReport frequency_from_json(std::string_view text) {
  return frequency_from_doc(parse_document(text, "frequency report"));
}
std::string entropy_to_json(const EntropyReport& r) { return entropy_json(r).dump(2) + "\n"; }
EntropyReport entropy_from_json(std::string_view text) {
  return entropy_from_doc(parse_document(text, "entropy report"));
}
std::string ties_to_json(const TieReport& r) { return ties_json(r).dump(2) + "\n"; }
TieReport ties_from_json(std::string_view text) {
  return ties_from_doc(parse_document(text, "tie report"));
}
std::string transport_to_json(const TransportReport& r) { return transport_json(r).dump(2) + "\n"; }
TransportReport transport_from_json(std::string_view text) {
  return transport_from_doc(parse_document(text, "transport report"));
}

std::string report_to_json(const ExperimentReport& report) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.acceptance) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  ordered_json doc;
  doc["config"] = config_json(report.config);
  doc["config_hash"] = config_hash(report.config);
  doc["reward"] = report.reward;
  doc["seed_derivation"] = report.seed_derivation;
  doc["frequency"] = frequency_json(report.frequency);
  doc["entropy"] = entropy_json(report.entropy);
  doc["ties"] = ties_json(report.ties);
  doc["transport"] = transport_json(report.transport);
  doc["acceptance"] = checks;
  doc["passed"] = report.passed();
  return doc.dump(2) + "\n";
}

ExperimentReport report_from_json(std::string_view text) {
  const auto doc = parse_document(text, "experiment report");
  ExperimentReport report;
  report.config = config_from_doc(field<json>(doc, "config"));
  report.reward = field<std::vector<double>>(doc, "reward");
  report.seed_derivation = field<std::string>(doc, "seed_derivation");
  report.frequency = frequency_from_doc(field<json>(doc, "frequency"));
  report.entropy = entropy_from_doc(field<json>(doc, "entropy"));
  report.ties = ties_from_doc(field<json>(doc, "ties"));
  report.transport = transport_from_doc(field<json>(doc, "transport"));
  for (const auto& c : field<json>(doc, "acceptance")) {
    report.acceptance.push_back(
        {field<std::string>(c, "name"), field<bool>(c, "passed"), field<std::string>(c, "detail")});
  }
  return report;
}

std::string frequency_to_csv(const FrequencyReport& r, std::string_view header_comment) {
  std::string out = with_comment(header_comment);
  out += "policy_index,actions,count,frequency\n";
  for (std::size_t k = 0; k < r.counts.size(); ++k) {
    const auto policy = policy_from_index({k}, r.states, r.actions);
    out += std::to_string(k) + ",\"" + to_string(policy) + "\"," + std::to_string(r.counts[k]) +
           "," + format17(r.frequencies[k]) + "\n";
  }
  return out;
}

FrequencyReport frequency_from_csv(std::string_view text, std::size_t states, std::size_t actions) {
  std::vector<std::uint64_t> counts;
  for (const auto& row : csv_rows(text, 4)) {
    if (to_u64(row[0]) != counts.size()) throw FormatError("frequency CSV rows out of order");
    counts.push_back(to_u64(row[2]));
  }
  return make_frequency_report(states, actions, std::move(counts));
}

std::string ties_to_csv(const TieReport& r, std::string_view header_comment) {
  std::string out = with_comment(header_comment);
  out += "threshold,tie_count\n";
  for (std::size_t k = 0; k < r.thresholds.size(); ++k) {
    out += format17(r.thresholds[k]) + "," + std::to_string(r.tie_counts[k]) + "\n";
  }
  return out;
}

TieReport ties_from_csv(std::string_view text) {
  TieReport r;
  for (const auto& row : csv_rows(text, 2)) {
    r.thresholds.push_back(to_double(row[0]));
    r.tie_counts.push_back(to_u64(row[1]));
  }
  return r;
}

std::string transport_to_csv(const TransportReport& r, std::string_view header_comment) {
  std::string out = with_comment(header_comment);
  out +=
      "pi_i,pi_j,samples,matrix_violations,value_violations,involution_violations,"
      "optimality_checked,optimality_violations,count_i_optimal,count_j_optimal,volume_z\n";
  for (const auto& p : r.pairs) {
    out += std::to_string(p.pi_i.value) + "," + std::to_string(p.pi_j.value) + "," +
           std::to_string(p.samples) + "," + std::to_string(p.matrix_violations) + "," +
           std::to_string(p.value_violations) + "," + std::to_string(p.involution_violations) +
           "," + std::to_string(p.optimality_checked) + "," +
           std::to_string(p.optimality_violations) + "," + std::to_string(p.count_i_optimal) +
           "," + std::to_string(p.count_j_optimal) + "," + format17(p.volume_z) + "\n";
  }
  return out;
}

TransportReport transport_from_csv(std::string_view text) {
  TransportReport r;
  for (const auto& row : csv_rows(text, 11)) {
    PairTransport p;
    p.pi_i = {to_u64(row[0])};
    p.pi_j = {to_u64(row[1])};
    p.samples = to_u64(row[2]);
    p.matrix_violations = to_u64(row[3]);
    p.value_violations = to_u64(row[4]);
    p.involution_violations = to_u64(row[5]);
    p.optimality_checked = to_u64(row[6]);
    p.optimality_violations = to_u64(row[7]);
    p.count_i_optimal = to_u64(row[8]);
    p.count_j_optimal = to_u64(row[9]);
    p.volume_z = to_double(row[10]);
    r.samples = std::max(r.samples, p.samples);
    r.pairs.push_back(p);
  }
  return r;
}

}  // namespace cmplab
