#pragma once

#include "gradedit/errors.hpp"
#include "gradedit/numerics.hpp"

namespace gradedit {

// Probabilistic relaxation of a discrete prompt: one distribution over the
// vocabulary per prompt position. Rows live on the probability simplex.
struct RelaxedPrompt {
  Mat dist;  // positions x V, row-stochastic

  int positions() const { return static_cast<int>(dist.rows()); }
  int vocab_size() const { return static_cast<int>(dist.cols()); }

  // Throws ShapeError when a row is negative or does not sum to 1 within
  // tol::kProbSum.
  void validate() const;

  static RelaxedPrompt uniform(int positions, int vocab_size);
  static RelaxedPrompt one_hot(const std::vector<int>& ids, int vocab_size);
};

}  // namespace gradedit
