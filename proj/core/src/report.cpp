#include "bsq/report.hpp"

namespace bsq {

Json to_json(const Report& r) {
  Json j;
  j["label"] = r.label;
  j["pass"] = r.pass;
  j["max_residual"] = r.max_residual;
  j["seed"] = r.seed;
  j["tol"] = r.tol;
  Json rows = Json::array();
  for (const auto& c : r.checks) {
    Json row;
    row["label"] = c.label;
    row["pass"] = c.pass;
    row["residual"] = c.residual;
    if (!c.detail.empty()) row["detail"] = c.detail;
    rows.push_back(std::move(row));
  }
  j["checks"] = std::move(rows);
  return j;
}

}  // namespace bsq
