#pragma once

#include <vector>

#include "vegopt/neuralcore/layers.hpp"

namespace vegopt::neuralcore {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Holds first/second moment estimates for each
// tensor of the ParamSet it was built for.
class Adam {
 public:
  explicit Adam(ParamSet params, AdamConfig cfg = {});

  // Applies one update from the accumulated gradients, then zeroes them.
  void step(double lr);
  long steps() const { return t_; }

 private:
  ParamSet params_;
  AdamConfig cfg_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long t_ = 0;
};

}  // namespace vegopt::neuralcore
