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

#ifndef SLU_COMMON_H_
#define SLU_COMMON_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace slu {

// All recoverable failures in the toolkit surface as slu::Error. The CLI maps
// them to exit status 1 with the message as the one-line diagnostic.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Input that parses but violates a schema or domain invariant.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string &what) : Error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string &what) : Error(what) {}
};

// Engine with a standard-specified output sequence; the draws below avoid
// the implementation-defined std distributions so results are portable.
using Rng = std::mt19937_64;

// Uniform integer in [0, n). n must be positive.
inline uint64_t UniformIndex(Rng &rng, uint64_t n) {
  const uint64_t limit = Rng::max() - (Rng::max() % n);
  uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % n;
}

// Uniform real in [0, 1) with 53 random bits.
inline double UniformReal(Rng &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Derives an independent stream seed from a master seed and a stream index
// (splitmix64 finalizer).
inline uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace slu

#endif  // SLU_COMMON_H_
