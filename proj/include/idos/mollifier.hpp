// Copyright 2026 The idos Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IDOS_MOLLIFIER_HPP
#define IDOS_MOLLIFIER_HPP

#include <cmath>

#include "idos/common.hpp"

namespace idos {

// Smooth step that is exactly 1 below `inner` and exactly 0 above `outer`.
struct MollifierSpec {
  double inner = 0.25;
  double outer = 0.275;  // 1.1/4
};

inline double mollifier(double z, const MollifierSpec& spec = {}) {
  if (!(spec.inner < spec.outer)) throw Error("mollifier: need inner < outer");
  if (z <= spec.inner) return 1.0;
  if (z >= spec.outer) return 0.0;
  auto h = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
  double a = h(spec.outer - z);
  double b = h(z - spec.inner);
  return a / (a + b);
}

}  // namespace idos

#endif  // IDOS_MOLLIFIER_HPP
