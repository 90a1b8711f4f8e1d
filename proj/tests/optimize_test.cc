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

#include <cmath>

#include "doctest.h"

namespace slu {
namespace {

TEST_CASE("lbfgs minimizes a convex quadratic") {
  // f(x) = sum_i (i + 1) (x_i - i)^2
  const Objective quad = [](const std::vector<double> &x, std::vector<double> &g) {
    double f = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - static_cast<double>(i);
      f += (i + 1.0) * d * d;
      g[i] = 2.0 * (i + 1.0) * d;
    }
    return f;
  };
  LbfgsOptions opts;
  opts.gradient_tolerance = 1e-9;
  const LbfgsResult r = MinimizeLbfgs(quad, std::vector<double>(6, 0.0), opts);
  CHECK(r.converged);
  for (size_t i = 0; i < 6; ++i) CHECK(r.x[i] == doctest::Approx(static_cast<double>(i)).epsilon(1e-8));
  CHECK(r.gradient_max_norm < 1e-9);
}

TEST_CASE("lbfgs trace never increases on the Rosenbrock function") {
  const Objective rosen = [](const std::vector<double> &x, std::vector<double> &g) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  LbfgsOptions opts;
  opts.max_iterations = 500;
  opts.gradient_tolerance = 1e-8;
  const LbfgsResult r = MinimizeLbfgs(rosen, {-1.2, 1.0}, opts);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(r.trace.size() == static_cast<size_t>(r.iterations) + 1);
  for (size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
}

TEST_CASE("lbfgs stops immediately at a stationary start") {
  const Objective flat = [](const std::vector<double> &, std::vector<double> &g) {
    std::fill(g.begin(), g.end(), 0.0);
    return 3.0;
  };
  const LbfgsResult r = MinimizeLbfgs(flat, {1.0, 2.0}, LbfgsOptions{});
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.value == 3.0);
}

TEST_CASE("lbfgs respects the iteration cap") {
  const Objective quad = [](const std::vector<double> &x, std::vector<double> &g) {
    g[0] = 2.0 * x[0] * 1e3;
    g[1] = 2.0 * x[1];
    return 1e3 * x[0] * x[0] + x[1] * x[1];
  };
  LbfgsOptions opts;
  opts.max_iterations = 1;
  opts.gradient_tolerance = 1e-14;
  const LbfgsResult r = MinimizeLbfgs(quad, {1.0, 1.0}, opts);
  CHECK(r.iterations <= 1);
  CHECK_FALSE(r.converged);
}

}  // namespace
}  // namespace slu
