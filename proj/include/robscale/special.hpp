/*
 * Copyright 2026 The robscale Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

namespace robscale {

/// Gauss error function, absolute error below 1e-15 on the whole real line.
/// Throws robscale::Error on NaN.
double erf(double x);

/// Complementary error function 1 - erf(x), accurate in the upper tail.
double erfc(double x);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace robscale
