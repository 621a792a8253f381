// Copyright 2026 The geoctl Authors
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


#ifndef GEOCTL_TESTS_TEST_FIELDS_H_
#define GEOCTL_TESTS_TEST_FIELDS_H_

#include <string>
#include <vector>

#include "geoctl/common.h"
#include "geoctl/field.h"

namespace geoctl::testing {

inline FieldPtr MakeField(const std::vector<std::string>& components, int dim) {
  return VectorField::Parse(components, dim);
}

inline FieldSet Heisenberg() {
  return {MakeField({"1", "0", "-x2/2"}, 3), MakeField({"0", "1", "x1/2"}, 3)};
}

inline FieldSet Rotations() {
  return {MakeField({"0", "-x3", "x2"}, 3), MakeField({"x3", "0", "-x1"}, 3),
          MakeField({"-x2", "x1", "0"}, 3)};
}

inline FieldSet Grushin() { return {MakeField({"1", "0"}, 2), MakeField({"0", "x1"}, 2)}; }

inline FieldPtr PlanarRotation() { return MakeField({"-x2", "x1"}, 2); }

inline FieldPtr Identity1d() { return MakeField({"x1"}, 1); }

inline Vec V(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace geoctl::testing

#endif  // GEOCTL_TESTS_TEST_FIELDS_H_
