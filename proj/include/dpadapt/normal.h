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

// Standard normal distribution functions. Every module that needs Phi or its
// inverse goes through these so that symmetry checks compare like with like.

#ifndef DPADAPT_NORMAL_H_
#define DPADAPT_NORMAL_H_

namespace dpadapt {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// phi(x).
double NormalPdf(double x);

// Phi(x), computed as erfc(-x / sqrt(2)) / 2 so the lower tail keeps full
// relative precision down to about x = -38.
double NormalCdf(double x);

// Phi^{-1}(p) for p in [0, 1]. Returns -inf / +inf at the endpoints. Uses
// the inverse complementary error function on whichever tail is closer, so
// NormalQuantile(1 - a) == -NormalQuantile(a) whenever 1 - a is exact.
double NormalQuantile(double p);

// log Phi(x); finite for all finite x (asymptotic series below -37).
double NormalLogCdf(double x);

}  // namespace dpadapt

#endif  // DPADAPT_NORMAL_H_
