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

#ifndef DPADAPT_DATA_H_
#define DPADAPT_DATA_H_

#include <cstddef>
#include <span>
#include <vector>

namespace dpadapt {

// Row-major n x dim matrix of public side information. dim may be zero.
class CovariateMatrix {
 public:
  CovariateMatrix() = default;
  CovariateMatrix(std::size_t rows, std::size_t dim);
  CovariateMatrix(std::size_t dim, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) {
    return {values_.data() + i * dim_, dim_};
  }
  const std::vector<double>& values() const { return values_; }

  // Rows picked by `indices`, in that order.
  CovariateMatrix Select(std::span<const std::size_t> indices) const;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

// What a multiple-testing method gets to see: p-values and covariates.
// Ground truth never lives here.
struct Dataset {
  std::vector<double> p;
  CovariateMatrix x;

  std::size_t size() const { return p.size(); }
  // Throws ContractViolation if p is outside [0, 1] or shapes disagree.
  void Validate() const;
};

}  // namespace dpadapt

#endif  // DPADAPT_DATA_H_
