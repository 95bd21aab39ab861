//
// Copyright 2026 The dpadapt Authors
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
//

#include "dpadapt/data.h"

#include <cmath>

#include "dpadapt/errors.h"

namespace dpadapt {

CovariateMatrix::CovariateMatrix(std::size_t rows, std::size_t dim)
    : rows_(rows), dim_(dim), values_(rows * dim, 0.0) {}

CovariateMatrix::CovariateMatrix(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
  Require(dim > 0 || values_.empty(), "zero-width covariates carry no values");
  Require(dim == 0 || values_.size() % dim == 0,
          "covariate values do not fill whole rows");
  rows_ = dim == 0 ? 0 : values_.size() / dim;
}

CovariateMatrix CovariateMatrix::Select(
    std::span<const std::size_t> indices) const {
  CovariateMatrix out(indices.size(), dim_);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto src = row(indices[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

void Dataset::Validate() const {
  for (double v : p) {
    Require(v >= 0.0 && v <= 1.0, "p-value outside [0, 1]");
  }
  Require(x.dim() == 0 || x.rows() == p.size(),
          "covariate rows do not match the number of p-values");
}

}  // namespace dpadapt
