#pragma once

namespace gradedit::tol {

// All numeric tolerances used by the library and its test suites live here.

inline constexpr double kSimplexSum = 1e-12;       // |sum(w) - 1| after projection
inline constexpr double kIdempotence = 1e-12;      // project(project(v)) vs project(v)
inline constexpr double kSimplexOracle = 1e-10;    // agreement with reference projection
inline constexpr double kBallNorm = 1e-12;         // norm overshoot after ball projection
inline constexpr double kScaleHomogeneity = 1e-12; // |a|*||M|| vs ||a*M||
inline constexpr double kProbSum = 1e-9;           // softmax normalization
inline constexpr double kProbFloor = 1e-12;        // probability floor inside logs
inline constexpr double kBudgetSlack = 1e-9;       // ||delta|| vs budget
inline constexpr double kPcrResidual = 1e-9;       // closed-form residual accuracy
inline constexpr double kGradRelError = 1e-4;      // analytic vs finite-difference
inline constexpr double kKktActiveWindow = 1e-6;   // | ||r|| - eps | for active constraints
inline constexpr double kKktStationarity = 1e-6;   // stationarity residual bound
inline constexpr double kKktCompSlack = 1e-8;      // complementary slackness bound
inline constexpr double kSlackTolDefault = 1e-6;   // default pcr_multi slack tolerance
inline constexpr double kPerplexityCeiling = 1e12; // implied by the probability floor

}  // namespace gradedit::tol
