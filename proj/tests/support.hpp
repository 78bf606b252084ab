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

#ifndef IVDID_TESTS_SUPPORT_HPP
#define IVDID_TESTS_SUPPORT_HPP

#include <random>
#include <string>

#include <ivdid/ivdid.hpp>

namespace ivdid::fixtures {

inline Interval random_interval(std::mt19937_64& rng, double min_width = 0.0, double max_width = 20.0)
{
    std::uniform_real_distribution<double> centre(-50.0, 50.0);
    std::uniform_real_distribution<double> width(min_width, max_width);
    const double c = centre(rng);
    const double w = width(rng);
    return Interval(c - 0.5 * w, c + 0.5 * w);
}

inline GroupMomentVector moments(Interval a1, Interval a2, Interval b1, Interval b2 = Interval(0.0, 0.0))
{
    GroupMomentVector m;
    m.control_pre = a1;
    m.control_post = a2;
    m.treated_pre = b1;
    m.treated_post = b2;
    m.n_control = 1;
    m.n_treated = 1;
    return m;
}

inline GroupMomentVector random_moments(std::mt19937_64& rng, double min_control_pre_width = 0.01)
{
    return moments(random_interval(rng, min_control_pre_width), random_interval(rng), random_interval(rng),
                   random_interval(rng));
}

inline PanelUnit unit(std::string id, bool treated, Interval y1, Interval y2, std::string cell = {})
{
    PanelUnit u;
    u.unit_id = std::move(id);
    u.treated = treated;
    u.y1 = y1;
    u.y2 = y2;
    if (!cell.empty()) u.covariate_cell = std::move(cell);
    return u;
}

// Random panel with interval outcomes; cells drawn from `cells` labels.
inline Panel random_panel(std::mt19937_64& rng, std::size_t n_control, std::size_t n_treated, int cells = 0)
{
    std::normal_distribution<double> level(20.0, 5.0);
    std::uniform_real_distribution<double> width(0.0, 6.0);
    std::uniform_int_distribution<int> cell(0, std::max(0, cells - 1));
    Panel p;
    auto add = [&](bool treated, std::size_t k) {
        const double y1 = level(rng);
        const double y2 = y1 + (treated ? 1.0 : -1.0) + 0.5 * level(rng) - 10.0;
        const double w1 = width(rng);
        const double w2 = width(rng);
        const std::string label = cells > 0 ? "c" + std::to_string(cell(rng)) : std::string();
        p.push_back(unit((treated ? "t" : "c") + std::to_string(k), treated, Interval(y1, y1 + w1),
                         Interval(y2, y2 + w2), label));
    };
    for (std::size_t k = 0; k < n_control; ++k) add(false, k);
    for (std::size_t k = 0; k < n_treated; ++k) add(true, k);
    return p;
}

} // namespace ivdid::fixtures

#endif // IVDID_TESTS_SUPPORT_HPP
