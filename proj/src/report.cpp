#include "lcprod/report.hpp"

#include <cstdio>

namespace lcprod {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

nlohmann::json vector_json(const VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

nlohmann::json box_json(const Box& b) {
  return {{"lo", vector_json(b.lo)}, {"hi", vector_json(b.hi)}};
}

}  // namespace

std::string to_csv(const ConvergenceReport& r) {
  std::string out = "n,q50,q90,q99,c_n,truncation_bound\n";
  for (std::size_t i = 0; i < r.depths.size(); ++i) {
    out += std::to_string(r.depths[i]);
    for (double q : r.error_quantiles[i]) out += "," + format_number(q);
    out += "," + format_number(r.c_n[i]) + "," + format_number(r.truncation_bound) + "\n";
  }
  return out;
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < r.depths.size(); ++i) {
    rows.push_back({{"n", r.depths[i]},
                    {"q50", r.error_quantiles[i][0]},
                    {"q90", r.error_quantiles[i][1]},
                    {"q99", r.error_quantiles[i][2]},
                    {"c_n", r.c_n[i]}});
  }
  return {{"kind", to_string(r.kind)},
          {"depths", r.depths},
          {"error_quantiles", rows},
          {"quantile_levels", kReportQuantiles},
          {"truncation_bound", r.truncation_bound},
          {"point_count", r.point_count},
          {"eval_depth", r.eval_depth},
          {"probe_depth", r.probe_depth},
          {"seed", r.seed},
          {"bound_checks", r.bound_checks},
          {"bound_violations", r.bound_violations},
          {"hypothesis_met", r.hypothesis_met},
          {"hypothesis_note", r.hypothesis_note},
          {"pass", r.pass}};
}

std::string to_csv(const CriterionReport& r) {
  std::string out = "n,c_n\n";
  for (std::size_t i = 0; i < r.depths.size(); ++i) {
    out += std::to_string(r.depths[i]) + "," + format_number(r.c_n[i]) + "\n";
  }
  return out;
}

nlohmann::json to_json(const CriterionReport& r) {
  return {{"depths", r.depths},
          {"c_n", r.c_n},
          {"probe_depth", r.probe_depth},
          {"last_window", r.last_window},
          {"window_ratio", r.window_ratio},
          {"remainder_estimate", r.remainder_estimate},
          {"last_estimate", r.last_estimate},
          {"tail_converged", r.tail_converged},
          {"status", to_string(r.status)}};
}

std::string to_csv(const std::vector<ConvexityRow>& rows) {
  std::string out = "pair,lambda,p_a,p_b,p_mix,rhs,margin,verdict\n";
  for (const ConvexityRow& row : rows) {
    const InequalityReport& r = row.result;
    out += std::to_string(row.pair) + "," + format_number(row.boxes.lambda) + "," +
           format_number(r.p_a) + "," + format_number(r.p_b) + "," + format_number(r.p_mix) +
           "," + format_number(r.rhs) + "," + format_number(r.margin) + "," +
           to_string(r.verdict) + "\n";
  }
  return out;
}

nlohmann::json to_json(const std::vector<ConvexityRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const ConvexityRow& row : rows) {
    const InequalityReport& r = row.result;
    nlohmann::json j = {{"pair", row.pair},
                        {"a", box_json(row.boxes.a)},
                        {"b", box_json(row.boxes.b)},
                        {"lambda", row.boxes.lambda},
                        {"p_a", r.p_a},
                        {"p_b", r.p_b},
                        {"p_mix", r.p_mix},
                        {"rhs", r.rhs},
                        {"margin", r.margin},
                        {"samples", r.samples},
                        {"verdict", to_string(r.verdict)}};
    if (r.exact) {
      j["exact"] = {{"p_a", r.exact->p_a},
                    {"p_b", r.exact->p_b},
                    {"p_mix", r.exact->p_mix},
                    {"holds", r.exact->holds}};
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::string to_csv(const std::vector<BoundRow>& rows) {
  std::string out = "n,point,c_n,e_minus,e_plus,bound,holds\n";
  for (const BoundRow& row : rows) {
    out += std::to_string(row.n) + "," + std::to_string(row.point) + "," +
           format_number(row.c_n) + "," + format_number(row.check.e_minus) + "," +
           format_number(row.check.e_plus) + "," + format_number(row.check.bound) + "," +
           (row.check.holds ? "1" : "0") + "\n";
  }
  return out;
}

nlohmann::json to_json(const std::vector<BoundRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const BoundRow& row : rows) {
    out.push_back({{"n", row.n},
                   {"point", row.point},
                   {"c_n", row.c_n},
                   {"e_minus", row.check.e_minus},
                   {"e_plus", row.check.e_plus},
                   {"bound", row.check.bound},
                   {"holds", row.check.holds}});
  }
  return out;
}

}  // namespace lcprod
