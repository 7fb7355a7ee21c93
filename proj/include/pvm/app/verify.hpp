#pragma once

// Built-in verification: the fast oracle suites behind `pvm verify`.

#include "pvm/testing/suites.hpp"

#include <cstdio>
#include <functional>
#include <ostream>
#include <vector>

namespace pvm::app {

struct VerifyOptions {
  bool quick = false;
  bool inject_fault = false;
  std::uint64_t seed = 1;
};

inline std::vector<testing::SuiteResult> run_verify_suites(const VerifyOptions& v) {
  testing::SuiteOptions o;
  o.seed = v.seed;
  o.inject_fault = v.inject_fault;
  const int scale = v.quick ? 1 : 5;
  const auto with = [&](int n) {
    auto c = o;
    c.count = n * scale;
    return c;
  };
  std::vector<testing::SuiteResult> out;
  out.push_back(testing::lp_suite(with(40)));
  out.push_back(testing::chebyshev_suite(with(40)));
  out.push_back(testing::filter_suite(with(40)));
  out.push_back(testing::directional_generic_suite(with(20)));
  out.push_back(testing::directional_degenerate_suite(with(20)));
  out.push_back(testing::multiplier_suite(with(20), v.quick ? 20 : 50));
  out.push_back(testing::hocbf_jacobian_suite(with(100)));
  return out;
}

inline int cmd_verify(const VerifyOptions& v, std::ostream& os) {
  bool all = true;
  for (const auto& r : run_verify_suites(v)) {
    char line[256];
    std::snprintf(line, sizeof line, "%-28s %s  n=%-5d worst=%.3g  %.2fs", r.name.c_str(),
                  r.passed ? "PASS" : "FAIL", r.instances, r.worst, r.seconds);
    os << line;
    if (!r.detail.empty()) os << "  (" << r.detail << ")";
    os << '\n';
    all = all && r.passed;
  }
  os << (all ? "verify: all suites passed" : "verify: FAILED") << '\n';
  return all ? 0 : 2;
}

}  // namespace pvm::app
