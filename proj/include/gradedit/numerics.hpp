#pragma once

#include <Eigen/Dense>
#include <functional>

#include "gradedit/errors.hpp"
#include "gradedit/tolerances.hpp"

namespace gradedit {

// Dense vectors and matrices. Eigen provides the storage and arithmetic;
// everything domain-specific is built on top of these two aliases.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

bool all_finite(const Vec& v);
bool all_finite(const Mat& m);

// Euclidean projection onto the probability simplex { w : w >= 0, sum w = 1 },
// computed with the sort-and-threshold method. O(n log n), exact up to
// floating point.
Vec simplex_project(const Vec& v);

// Projection onto the Euclidean ball of the given radius: the input is
// returned unchanged when already inside, otherwise rescaled onto the
// boundary. The matrix overload uses the Frobenius norm.
Vec ball_project(const Vec& v, double radius);
Mat ball_project(const Mat& m, double radius);

double frobenius_norm(const Mat& m);

// Central-difference gradient estimate of a scalar function, used as the
// independent oracle for analytic gradients.
Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x,
                     double h);

}  // namespace gradedit
