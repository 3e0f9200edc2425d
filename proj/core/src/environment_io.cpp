#include "cmplab/environment_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cmplab/errors.hpp"

namespace cmplab {

using nlohmann::json;

std::string environment_to_json(const Environment& env) {
  json p = json::array();
  for (std::size_t s = 0; s < env.states(); ++s) {
    json by_action = json::array();
    for (std::size_t a = 0; a < env.actions(); ++a) {
      const auto row = env.row(s, a);
      by_action.push_back(json(std::vector<double>(row.begin(), row.end())));
    }
    p.push_back(std::move(by_action));
  }
  json doc;
  doc["n"] = env.states();
  doc["m"] = env.actions();
  doc["p"] = std::move(p);
  return doc.dump() + "\n";
}

Environment environment_from_json(std::string_view text, const EnvironmentLoadOptions& options) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("environment document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("m") || !doc.contains("p")) {
    throw FormatError("environment document needs fields n, m and p");
  }
  std::size_t n = 0;
  std::size_t m = 0;
  try {
    n = doc.at("n").get<std::size_t>();
    m = doc.at("m").get<std::size_t>();
  } catch (const json::exception&) {
    throw FormatError("environment fields n and m must be non-negative integers");
  }
  if (n < 2 || m < 2) throw FormatError("environment needs n >= 2 and m >= 2");

  const json& p = doc.at("p");
  std::vector<double> flat;
  flat.reserve(n * m * n);
  if (!p.is_array() || p.size() != n) throw FormatError("p must have n state entries");
  for (std::size_t s = 0; s < n; ++s) {
    const json& by_action = p[s];
    if (!by_action.is_array() || by_action.size() != m) {
      throw FormatError("p[" + std::to_string(s) + "] must have m action rows");
    }
    for (std::size_t a = 0; a < m; ++a) {
      const json& row = by_action[a];
      if (!row.is_array() || row.size() != n) {
        throw FormatError("p[" + std::to_string(s) + "][" + std::to_string(a) +
                          "] must have n probabilities");
      }
      std::vector<double> values;
      values.reserve(n);
      for (const json& x : row) {
        if (!x.is_number()) throw FormatError("transition probabilities must be numbers");
        values.push_back(x.get<double>());
      }
      if (options.renormalize) {
        double sum = 0.0;
        for (double x : values) sum += x;
        if (sum > 0.0 && std::abs(sum - 1.0) > options.tolerance) {
          for (double& x : values) x /= sum;
        }
      }
      flat.insert(flat.end(), values.begin(), values.end());
    }
  }

  Environment env(n, m, std::move(flat));
  const auto check = validate_environment(env, options.tolerance);
  if (!check.ok()) throw FormatError("invalid environment: " + check.describe());
  return env;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string());
  }
}

void save_environment(const Environment& env, const std::filesystem::path& path) {
  write_text_file_atomic(path, environment_to_json(env));
}

Environment load_environment(const std::filesystem::path& path,
                             const EnvironmentLoadOptions& options) {
  return environment_from_json(read_text_file(path), options);
}

}  // namespace cmplab
