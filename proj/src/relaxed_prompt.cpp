#include "gradedit/relaxed_prompt.hpp"

#include <cmath>

namespace gradedit {

void RelaxedPrompt::validate() const {
  if (dist.rows() < 1 || dist.cols() < 1) {
    throw ShapeError("relaxed prompt: empty distribution");
  }
  for (Eigen::Index p = 0; p < dist.rows(); ++p) {
    double sum = 0.0;
    for (Eigen::Index v = 0; v < dist.cols(); ++v) {
      const double x = dist(p, v);
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw ShapeError("relaxed prompt: negative or non-finite entry");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > tol::kProbSum) {
      throw ShapeError("relaxed prompt: row does not sum to 1");
    }
  }
}

RelaxedPrompt RelaxedPrompt::uniform(int positions, int vocab_size) {
  RelaxedPrompt p;
  p.dist = Mat::Constant(positions, vocab_size,
                         1.0 / static_cast<double>(vocab_size));
  return p;
}

RelaxedPrompt RelaxedPrompt::one_hot(const std::vector<int>& ids,
                                     int vocab_size) {
  RelaxedPrompt p;
  p.dist = Mat::Zero(static_cast<Eigen::Index>(ids.size()), vocab_size);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocab_size) {
      throw VocabError("relaxed prompt: token id out of range");
    }
    p.dist(static_cast<Eigen::Index>(i), ids[i]) = 1.0;
  }
  return p;
}

}  // namespace gradedit
