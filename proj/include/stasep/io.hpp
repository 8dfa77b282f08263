#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stasep/common.hpp"
#include "stasep/path_kernel.hpp"
#include "stasep/pgf_model.hpp"

namespace stasep {

using Json = nlohmann::json;

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

// Model definition file:
//   {"kind": "bernoulli", "params": {"p": 0.5}}
//   {"kind": "geometric", "params": {"alpha": 0.4}}
//   {"kind": "continuous_poisson", "params": {"beta": 1.0}}
//   {"kind": "continuous_poisson", "params": {"lambda": 1.0}, "pmf": [0,0.5,0.5]}
//   {"kind": "discrete_pmf", "pmf": [0.5,0,0,0,0.5]}               (+ optional "tail_ratio")
inline PgfModel model_from_json(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const Json params = j.value("params", Json::object());
    if (kind == "bernoulli") return PgfModel::bernoulli(params.at("p").get<double>());
    if (kind == "geometric") return PgfModel::geometric(params.at("alpha").get<double>());
    if (kind == "continuous_poisson") {
      if (j.contains("pmf")) {
        return PgfModel::compound_poisson(params.at("lambda").get<double>(),
                                          j.at("pmf").get<std::vector<double>>());
      }
      return PgfModel::continuous_poisson(params.at("beta").get<double>());
    }
    if (kind == "discrete_pmf")
      return PgfModel::discrete_pmf(j.at("pmf").get<std::vector<double>>(),
                                    j.value("tail_ratio", 0.0));
    throw ConfigError("unknown model kind: " + kind);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("model schema violation: ") + e.what());
  }
}

inline PgfModel load_model(const std::string& path) { return model_from_json(load_json_file(path)); }

inline Json model_to_json(const PgfModel& m) {
  Json j;
  switch (m.kind()) {
    case ModelKind::DiscreteBernoulli:
      j["kind"] = "bernoulli";
      j["params"] = {{"p", m.p()}};
      break;
    case ModelKind::DiscreteGeometric:
      j["kind"] = "geometric";
      j["params"] = {{"alpha", m.alpha()}};
      break;
    case ModelKind::ContinuousPoisson:
      j["kind"] = "continuous_poisson";
      j["params"] = {{"lambda", m.lambda()}};
      j["pmf"] = m.pmf();
      break;
    case ModelKind::DiscretePmf:
      j["kind"] = "discrete_pmf";
      j["pmf"] = m.pmf();
      if (m.tail_ratio() != 0.0) j["tail_ratio"] = m.tail_ratio();
      break;
  }
  return j;
}

// Initial condition file: {"positions": [-1,-2,-3]} or
// {"wedge": {"count": 40}} for X_0(j) = -j.
inline InitialCondition ic_from_json(const Json& j) {
  try {
    if (j.contains("positions"))
      return InitialCondition(j.at("positions").get<std::vector<long long>>());
    if (j.contains("wedge")) {
      const long long count = j.at("wedge").at("count").get<long long>();
      if (count < 1) throw ConfigError("wedge: count must be >= 1");
      std::vector<long long> pos(static_cast<std::size_t>(count));
      for (long long k = 1; k <= count; ++k) pos[std::size_t(k - 1)] = -k;
      return InitialCondition(std::move(pos));
    }
    throw ConfigError("initial condition needs \"positions\" or \"wedge\"");
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("initial-condition schema violation: ") + e.what());
  }
}

inline InitialCondition load_ic(const std::string& path) {
  return ic_from_json(load_json_file(path));
}

inline std::vector<long long> parse_int_list(const std::string& csv) {
  std::vector<long long> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stoll(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::stoll(cur));
  if (out.empty()) throw ConfigError("empty integer list: " + csv);
  return out;
}

inline std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::stod(cur));
  if (out.empty()) throw ConfigError("empty list: " + csv);
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

}  // namespace stasep
