#pragma once

#include "bsq/expr.hpp"

#include <json.hpp>

namespace bsq {

using Json = nlohmann::ordered_json;

/// One named check inside a Report.
struct CheckRow {
  std::string label;
  bool pass = false;
  double residual = 0.0;
  std::string detail;  // free-form evidence (exact/numeric, mismatch notes)
};

/// Structured verification result shared by every module.
struct Report {
  std::string label;
  bool pass = true;
  double max_residual = 0.0;
  std::vector<CheckRow> checks;
  std::uint64_t seed = kDefaultEquivSeed;
  double tol = 1e-10;

  void add(std::string check_label, bool check_pass, double residual,
           std::string detail = "") {
    pass = pass && check_pass;
    max_residual = std::max(max_residual, residual);
    checks.push_back({std::move(check_label), check_pass, residual, std::move(detail)});
  }
};

Json to_json(const Report& r);

}  // namespace bsq
