#include "gradedit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gradedit {

bool all_finite(const Vec& v) { return v.allFinite(); }
bool all_finite(const Mat& m) { return m.allFinite(); }

Vec simplex_project(const Vec& v) {
  const auto n = v.size();
  if (n == 0) {
    throw ShapeError("simplex_project: empty input");
  }
  if (!v.allFinite()) {
    throw ShapeError("simplex_project: non-finite input");
  }

  // Sort descending, then find the largest k such that the water level
  // tau_k = (sum of top k - 1) / k stays below the k-th entry.
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());

  double cumsum = 0.0;
  double tau = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumsum += u[static_cast<std::size_t>(k)];
    const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (u[static_cast<std::size_t>(k)] - candidate > 0.0) {
      tau = candidate;
    }
  }

  Vec w = (v.array() - tau).cwiseMax(0.0);
  return w;
}

Vec ball_project(const Vec& v, double radius) {
  if (!(radius > 0.0)) {
    throw ParamError("ball_project: radius must be positive");
  }
  const double norm = v.norm();
  if (norm <= radius) {
    return v;
  }
  return v * (radius / norm);
}

Mat ball_project(const Mat& m, double radius) {
  if (!(radius > 0.0)) {
    throw ParamError("ball_project: radius must be positive");
  }
  const double norm = m.norm();
  if (norm <= radius) {
    return m;
  }
  return m * (radius / norm);
}

double frobenius_norm(const Mat& m) { return m.norm(); }

Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x,
                     double h) {
  if (!(h > 0.0)) {
    throw ParamError("finite_diff_grad: step size must be positive");
  }
  Vec grad(x.size());
  Vec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double fp = f(probe);
    probe(i) = x(i) - h;
    const double fm = f(probe);
    probe(i) = x(i);
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw EvalError("finite_diff_grad: non-finite function evaluation");
    }
    grad(i) = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace gradedit
