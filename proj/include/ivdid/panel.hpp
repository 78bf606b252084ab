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

#ifndef IVDID_PANEL_HPP
#define IVDID_PANEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "interval.hpp"

namespace ivdid {

enum class Group { control, treated };
enum class Period { pre = 1, post = 2 };

/// One unit of a two-period panel with interval outcomes.
///
/// `treated` is the period-2 treatment indicator; nobody is treated in
/// period 1. `scalar_y1`/`scalar_y2` carry an unrecoded scalar outcome when
/// the source has one (used only by the classical DID baseline).
struct PanelUnit {
    std::string unit_id;
    bool treated = false;
    Interval y1;
    Interval y2;
    std::optional<std::string> covariate_cell;
    std::optional<double> scalar_y1;
    std::optional<double> scalar_y2;

    const Interval& outcome(Period p) const noexcept { return p == Period::pre ? y1 : y2; }
    bool in(Group g) const noexcept { return treated == (g == Group::treated); }
};

using Panel = std::vector<PanelUnit>;

// Raw survey counts for one period; a missing entry is std::nullopt.
struct PeriodCounts {
    std::optional<double> full_time;
    std::optional<double> part_time;
    std::optional<double> managers;
};

struct RawRecord {
    std::string unit_id;
    std::string group;
    std::array<PeriodCounts, 2> periods;
};

namespace detail {

// Order-independent sum: sorting first makes the result a function of the
// multiset of values, so permuting panel rows is bit-invariant.
inline double ordered_sum(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

inline double ordered_mean(std::vector<double> values)
{
    const auto n = static_cast<double>(values.size());
    return ordered_sum(std::move(values)) / n;
}

} // namespace detail

inline std::size_t group_size(std::span<const PanelUnit> panel, Group g)
{
    return static_cast<std::size_t>(
        std::count_if(panel.begin(), panel.end(), [g](const PanelUnit& u) { return u.in(g); }));
}

/// Aumann mean of the group's interval outcomes in one period: the
/// interval of the mean lower and mean upper endpoints.
inline Interval group_moments(std::span<const PanelUnit> panel, Group g, Period p)
{
    std::vector<double> lo;
    std::vector<double> hi;
    for (const auto& u : panel) {
        if (!u.in(g)) continue;
        lo.push_back(u.outcome(p).lower());
        hi.push_back(u.outcome(p).upper());
    }
    if (lo.empty()) {
        throw PreconditionError(std::string("Aumann mean of an empty ") +
                                (g == Group::treated ? "treated" : "control") + " group");
    }
    const double l = detail::ordered_mean(std::move(lo));
    const double u = detail::ordered_mean(std::move(hi));
    // last-ulp inversions from rounding
    return Interval(l, std::max(l, u));
}

// Key used to put units in a canonical order independent of row order and ids.
inline auto canonical_key(const PanelUnit& u)
{
    return std::make_tuple(u.treated, u.y1.lower(), u.y1.upper(), u.y2.lower(), u.y2.upper(),
                           u.covariate_cell.value_or(std::string()));
}

inline Panel canonical_order(Panel panel)
{
    std::stable_sort(panel.begin(), panel.end(),
                     [](const PanelUnit& a, const PanelUnit& b) { return canonical_key(a) < canonical_key(b); });
    return panel;
}

} // namespace ivdid

#endif // IVDID_PANEL_HPP
