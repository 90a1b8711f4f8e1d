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

#include "slu/optimize.h"

#include <algorithm>
#include <cmath>
#include <deque>

namespace slu {

namespace {

double Dot(const std::vector<double> &a, const std::vector<double> &b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double MaxAbs(const std::vector<double> &v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

}  // namespace

LbfgsResult MinimizeLbfgs(const Objective &objective, std::vector<double> x0,
                          const LbfgsOptions &options) {
  const size_t n = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n, 0.0);
  result.value = objective(result.x, grad);
  result.trace.push_back(result.value);
  result.gradient_max_norm = MaxAbs(grad);

  std::deque<Correction> memory;
  std::vector<double> direction(n), x_new(n), grad_new(n), alpha;
  while (result.iterations < options.max_iterations) {
    if (result.gradient_max_norm < options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    // Two-loop recursion: direction = -H * grad.
    direction = grad;
    alpha.assign(memory.size(), 0.0);
    for (size_t i = memory.size(); i-- > 0;) {
      alpha[i] = memory[i].rho * Dot(memory[i].s, direction);
      for (size_t j = 0; j < n; ++j) direction[j] -= alpha[i] * memory[i].y[j];
    }
    if (!memory.empty()) {
      const Correction &last = memory.back();
      const double gamma = Dot(last.s, last.y) / Dot(last.y, last.y);
      for (double &d : direction) d *= gamma;
    }
    for (size_t i = 0; i < memory.size(); ++i) {
      const double beta = memory[i].rho * Dot(memory[i].y, direction);
      for (size_t j = 0; j < n; ++j) direction[j] += (alpha[i] - beta) * memory[i].s[j];
    }
    for (double &d : direction) d = -d;

    double slope = Dot(grad, direction);
    if (!(slope < 0.0)) {
      // Not a descent direction; restart from steepest descent.
      memory.clear();
      for (size_t j = 0; j < n; ++j) direction[j] = -grad[j];
      slope = Dot(grad, direction);
    }
    double step = memory.empty() ? std::min(1.0, 1.0 / std::sqrt(-slope)) : 1.0;

    bool accepted = false;
    double value_new = 0.0;
    for (int ls = 0; ls < options.max_line_search; ++ls) {
      for (size_t j = 0; j < n; ++j) x_new[j] = result.x[j] + step * direction[j];
      value_new = objective(x_new, grad_new);
      if (std::isfinite(value_new) && value_new <= result.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // line search stalled at numerical precision

    Correction c;
    c.s.resize(n);
    c.y.resize(n);
    for (size_t j = 0; j < n; ++j) {
      c.s[j] = x_new[j] - result.x[j];
      c.y[j] = grad_new[j] - grad[j];
    }
    const double sy = Dot(c.s, c.y);
    if (sy > 1e-12 * std::sqrt(Dot(c.s, c.s) * Dot(c.y, c.y))) {
      c.rho = 1.0 / sy;
      memory.push_back(std::move(c));
      if (memory.size() > static_cast<size_t>(options.history)) memory.pop_front();
    }
    result.x.swap(x_new);
    grad.swap(grad_new);
    result.value = value_new;
    result.trace.push_back(value_new);
    result.gradient_max_norm = MaxAbs(grad);
    ++result.iterations;
  }
  if (result.gradient_max_norm < options.gradient_tolerance) result.converged = true;
  return result;
}

}  // namespace slu
