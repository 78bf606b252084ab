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

#ifndef IVDID_RECODING_HPP
#define IVDID_RECODING_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "error.hpp"
#include "interval.hpp"

namespace ivdid {

enum class DecimalRule { unit_bracket, keep_scalar };

inline DecimalRule parse_decimal_rule(std::string_view s)
{
    if (s == "unit_bracket") return DecimalRule::unit_bracket;
    if (s == "keep_scalar") return DecimalRule::keep_scalar;
    throw ConfigError("unknown decimal rule '" + std::string(s) + "' (expected unit_bracket or keep_scalar)");
}

inline const char* to_string(DecimalRule r)
{
    return r == DecimalRule::unit_bracket ? "unit_bracket" : "keep_scalar";
}

/// How heaped survey counts are turned into intervals.
///
/// An integer count k >= heap_threshold that is a multiple of heap_modulus
/// is read as [k - heap_halfwidth, k + heap_halfwidth] (lower end clamped
/// at zero). Non-integer entries such as 6.5 become [6, 7] under
/// DecimalRule::unit_bracket. Everything else stays a point.
struct RecodingPolicy {
    int heap_threshold = 10;
    int heap_modulus = 5;
    double heap_halfwidth = 5.0;
    DecimalRule decimal_rule = DecimalRule::unit_bracket;

    void validate() const
    {
        if (heap_modulus <= 0) throw ConfigError("heap_modulus must be positive");
        if (heap_threshold < 0) throw ConfigError("heap_threshold must be nonnegative");
        if (!(heap_halfwidth >= 0.0) || !std::isfinite(heap_halfwidth)) {
            throw ConfigError("heap_halfwidth must be finite and nonnegative");
        }
    }
};

inline bool is_integer_count(double x) { return std::floor(x) == x; }

inline bool is_heaped(double x, const RecodingPolicy& policy)
{
    if (!is_integer_count(x) || x < policy.heap_threshold) return false;
    return std::fmod(x, static_cast<double>(policy.heap_modulus)) == 0.0;
}

inline Interval recode_count(double x, const RecodingPolicy& policy = {})
{
    if (!std::isfinite(x) || x < 0.0) {
        throw PreconditionError("counts must be finite and nonnegative, got " + std::to_string(x));
    }
    if (is_heaped(x, policy)) {
        return Interval(std::max(0.0, x - policy.heap_halfwidth), x + policy.heap_halfwidth);
    }
    if (!is_integer_count(x) && policy.decimal_rule == DecimalRule::unit_bracket) {
        return Interval(std::floor(x), std::ceil(x));
    }
    return Interval::point(x);
}

// Full-time-equivalent employment: full-time + managers + 0.5 * part-time.
inline Interval fte_interval(const Interval& full_time, const Interval& managers, const Interval& part_time)
{
    return minkowski_sum(full_time, minkowski_sum(managers, scale(part_time, 0.5)));
}

inline double fte_scalar(double full_time, double managers, double part_time)
{
    return full_time + managers + 0.5 * part_time;
}

} // namespace ivdid

#endif // IVDID_RECODING_HPP
