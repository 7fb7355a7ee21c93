#pragma once

// Experiment configuration: TOML sections [scenario], [barrier], [filter]
// and [sim], mapped field by field onto the library types.

#include "pvm/io/toml.hpp"
#include "pvm/sim.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace pvm::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  scenario::UnicycleScenario scenario;
  std::vector<double> k_v_cases{0.5, 1.0, 2.0};
  sim::SimConfig sim;

  /// Scenario for case `index` (1-based).
  scenario::UnicycleScenario scenario_for_case(int index) const {
    if (index < 1 || index > static_cast<int>(k_v_cases.size()))
      throw ConfigError("case " + std::to_string(index) + " is out of range (1.." +
                        std::to_string(k_v_cases.size()) + ")");
    auto s = scenario;
    s.nominal.k_v = k_v_cases[static_cast<std::size_t>(index - 1)];
    return s;
  }
};

namespace detail {

class Reader {
 public:
  Reader(const toml::Document& doc, std::string origin) : doc_(doc), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& what, int line = 0) const {
    std::ostringstream os;
    os << origin_;
    if (line > 0) os << ":" << line;
    os << ": [" << section << "] " << key << ": " << what;
    throw ConfigError(os.str());
  }

  const toml::Value* find(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    const auto s = doc_.find(section);
    if (s == doc_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  double number(const toml::Value& v, const std::string& section, const std::string& key) const {
    if (!v.is_number()) fail(section, key, "expected a number", v.line);
    const double d = std::get<double>(v.data);
    if (!std::isfinite(d)) fail(section, key, "must be finite", v.line);
    return d;
  }

  void get(const std::string& section, const std::string& key, double& out) {
    if (const auto* v = find(section, key)) out = number(*v, section, key);
  }

  void get_positive(const std::string& section, const std::string& key, double& out) {
    if (const auto* v = find(section, key)) {
      out = number(*v, section, key);
      if (!(out > 0.0)) fail(section, key, "must be positive", v->line);
    }
  }

  std::vector<double> numbers(const toml::Value& v, const std::string& section,
                              const std::string& key, std::size_t expected = 0) const {
    if (!v.is_array()) fail(section, key, "expected an array of numbers", v.line);
    std::vector<double> out;
    for (const auto& e : std::get<toml::Array>(v.data)) out.push_back(number(e, section, key));
    if (expected && out.size() != expected)
      fail(section, key, "expected " + std::to_string(expected) + " entries", v.line);
    return out;
  }

  void check_unknown() const {
    static const std::set<std::string> sections{"scenario", "barrier", "filter", "sim"};
    for (const auto& [name, table] : doc_) {
      if (name.empty() && table.empty()) continue;
      if (!sections.count(name)) {
        const int line = table.empty() ? 0 : table.begin()->second.line;
        fail(name, "*", "unknown section", line);
      }
      for (const auto& [key, value] : table)
        if (!used_.count(name + "." + key)) fail(name, key, "unknown key", value.line);
    }
  }

 private:
  const toml::Document& doc_;
  std::string origin_;
  std::set<std::string> used_;
};

}  // namespace detail

/// Parse and validate a config; every failure is a ConfigError naming the
/// line and field.
inline ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config") {
  toml::Document doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::ParseError& e) {
    throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.what());
  }
  detail::Reader rd(doc, origin);
  ExperimentConfig cfg;
  auto& sc = cfg.scenario;
  sc = scenario::default_scenario();

  if (const auto* v = rd.find("scenario", "obstacles")) {
    if (!v->is_array()) rd.fail("scenario", "obstacles", "expected an array of [x, y, R]", v->line);
    sc.obstacles.clear();
    for (const auto& e : std::get<toml::Array>(v->data)) {
      const auto o = rd.numbers(e, "scenario", "obstacles", 3);
      if (!(o[2] > 0.0))
        rd.fail("scenario", "obstacles",
                "obstacle " + std::to_string(sc.obstacles.size()) + ": radius must be positive",
                e.line ? e.line : v->line);
      sc.obstacles.push_back({o[0], o[1], o[2]});
    }
  }
  if (const auto* v = rd.find("scenario", "goal")) {
    const auto g = rd.numbers(*v, "scenario", "goal", 2);
    sc.goal = {g[0], g[1]};
  }
  if (const auto* v = rd.find("scenario", "x0")) {
    const auto x = rd.numbers(*v, "scenario", "x0", 4);
    sc.x0 = {x[0], x[1], x[2], x[3]};
  }
  rd.get_positive("scenario", "alpha1", sc.alpha1);
  rd.get_positive("scenario", "alpha2", sc.alpha2);
  if (const auto* v = rd.find("scenario", "input_box")) {
    const auto b = rd.numbers(*v, "scenario", "input_box", 4);
    if (!(b[0] <= b[1] && b[2] <= b[3]))
      rd.fail("scenario", "input_box", "expected [a_min, a_max, omega_min, omega_max]", v->line);
    sc.input_box = {b[0], b[1], b[2], b[3]};
  }
  rd.get("scenario", "k_p", sc.nominal.k_p);
  rd.get("scenario", "k_theta", sc.nominal.k_theta);
  if (const auto* v = rd.find("scenario", "k_v")) {
    if (v->is_number()) {
      cfg.k_v_cases = {rd.number(*v, "scenario", "k_v")};
    } else {
      cfg.k_v_cases = rd.numbers(*v, "scenario", "k_v");
      if (cfg.k_v_cases.empty()) rd.fail("scenario", "k_v", "needs at least one case", v->line);
    }
  }
  sc.nominal.k_v = cfg.k_v_cases.front();

  auto& bp = cfg.sim.barrier;
  rd.get_positive("barrier", "eps0", bp.eps0);
  rd.get_positive("barrier", "eps_active", bp.eps_active);
  rd.get_positive("barrier", "alpha", bp.alpha);

  auto& fp = cfg.sim.filter;
  fp.alpha = bp.alpha;
  fp.eps0 = bp.eps0;
  if (const auto* v = rd.find("filter", "Q")) {
    if (!v->is_array()) rd.fail("filter", "Q", "expected [q1, q2] or [[..], [..]]", v->line);
    const auto& arr = std::get<toml::Array>(v->data);
    Matrix Q = Matrix::Zero(2, 2);
    if (arr.size() == 2 && arr[0].is_array()) {
      for (int i = 0; i < 2; ++i) {
        const auto row = rd.numbers(arr[static_cast<std::size_t>(i)], "filter", "Q", 2);
        Q(i, 0) = row[0];
        Q(i, 1) = row[1];
      }
    } else {
      const auto d = rd.numbers(*v, "filter", "Q", 2);
      Q(0, 0) = d[0];
      Q(1, 1) = d[1];
    }
    Eigen::LLT<Matrix> llt(Q);
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 0.0 || llt.info() != Eigen::Success)
      rd.fail("filter", "Q", "must be symmetric positive definite", v->line);
    fp.Q = Q;
  }
  rd.get_positive("filter", "gamma", fp.gamma);
  for (const char* key : {"alpha", "eps0"}) {
    if (const auto* v = rd.find("filter", key)) {
      const double d = rd.number(*v, "filter", key);
      const double want = std::string(key) == "alpha" ? bp.alpha : bp.eps0;
      if (d != want) rd.fail("filter", key, "must equal the [barrier] value", v->line);
    }
  }

  auto& sm = cfg.sim;
  rd.get_positive("sim", "dt", sm.dt);
  rd.get_positive("sim", "horizon", sm.horizon);
  rd.get_positive("sim", "goal_tol", sm.goal_tol);
  if (const auto* v = rd.find("sim", "filter")) {
    const std::string s = v->is_string() ? std::get<std::string>(v->data) : "";
    if (s == "proposed") sm.filter_kind = sim::FilterKind::Proposed;
    else if (s == "baseline") sm.filter_kind = sim::FilterKind::Baseline;
    else rd.fail("sim", "filter", "expected \"proposed\" or \"baseline\"", v->line);
  }
  if (const auto* v = rd.find("sim", "seed")) {
    const double d = rd.number(*v, "sim", "seed");
    if (d < 0 || d != std::floor(d)) rd.fail("sim", "seed", "must be a nonnegative integer", v->line);
    sm.seed = static_cast<std::uint64_t>(d);
  }
  rd.check_unknown();

  try {
    sc.validate();
    sm.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace pvm::io
