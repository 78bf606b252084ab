// Copyright 2026 The ivdid Authors
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

#ifndef IVDID_NORMAL_HPP
#define IVDID_NORMAL_HPP

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "error.hpp"

namespace ivdid {

// Standard normal CDF through erfc, accurate to a few ulp in both tails.
inline double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) throw PreconditionError("normal quantile needs p in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

} // namespace ivdid

#endif // IVDID_NORMAL_HPP
