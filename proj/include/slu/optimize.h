// Copyright 2026 The SLU Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SLU_OPTIMIZE_H_
#define SLU_OPTIMIZE_H_

#include <functional>
#include <vector>

namespace slu {

// Computes f(x) and writes its gradient into grad (already sized like x).
using Objective =
    std::function<double(const std::vector<double> &x, std::vector<double> &grad)>;

struct LbfgsOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-5;  // stop when max |grad_i| falls below
  int history = 10;
  int max_line_search = 40;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double gradient_max_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  // Objective at the start point and after each accepted step.
  std::vector<double> trace;
};

// Limited-memory BFGS with a backtracking Armijo line search, so accepted
// objective values never increase. Deterministic for a deterministic
// objective.
LbfgsResult MinimizeLbfgs(const Objective &objective, std::vector<double> x0,
                          const LbfgsOptions &options);

}  // namespace slu

#endif  // SLU_OPTIMIZE_H_
