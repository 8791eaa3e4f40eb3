#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lcprod/verify.hpp"

namespace lcprod {

// '%.12g'
std::string format_number(double x);

// Columns: n,q50,q90,q99,c_n,truncation_bound
std::string to_csv(const ConvergenceReport& report);
nlohmann::json to_json(const ConvergenceReport& report);

// Columns: n,c_n
std::string to_csv(const CriterionReport& report);
nlohmann::json to_json(const CriterionReport& report);

struct ConvexityRow {
  std::size_t pair = 0;
  BoxPair boxes;
  InequalityReport result;
};
// Columns: pair,lambda,p_a,p_b,p_mix,rhs,margin,verdict
std::string to_csv(const std::vector<ConvexityRow>& rows);
nlohmann::json to_json(const std::vector<ConvexityRow>& rows);

struct BoundRow {
  std::size_t n = 0;
  std::size_t point = 0;
  double c_n = 0.0;
  BoundCheck check;
};
// Columns: n,point,c_n,e_minus,e_plus,bound,holds
std::string to_csv(const std::vector<BoundRow>& rows);
nlohmann::json to_json(const std::vector<BoundRow>& rows);

}  // namespace lcprod
