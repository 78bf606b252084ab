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

// JSON records for results. Needs nlohmann/json on the include path; the
// rest of the library does not.

#ifndef IVDID_SERIALIZE_HPP
#define IVDID_SERIALIZE_HPP

#include <json.hpp>

#include "estimators.hpp"
#include "inference.hpp"
#include "loader.hpp"
#include "report.hpp"
#include "simulation.hpp"

namespace ivdid {

inline void to_json(nlohmann::ordered_json& j, const Interval& iv) { j = {iv.lower(), iv.upper()}; }

inline void to_json(nlohmann::ordered_json& j, const LinearIntervalMap& m)
{
    j = {{"slope", m.slope()}, {"anchor_in", m.anchor_in()}, {"anchor_out", m.anchor_out()}};
}

inline void to_json(nlohmann::ordered_json& j, const GroupMomentVector& m)
{
    j = {{"control_pre", m.control_pre}, {"control_post", m.control_post}, {"treated_pre", m.treated_pre},
         {"treated_post", m.treated_post}, {"n_control", m.n_control},   {"n_treated", m.n_treated}};
}

inline void to_json(nlohmann::ordered_json& j, const BoundsResult& b)
{
    j = {{"assumption", to_string(b.assumption)},
         {"counterfactual", b.counterfactual},
         {"att", b.att},
         {"moments", b.moments},
         {"transport", nullptr},
         {"scalar_reduction", b.scalar_reduction}};
    if (b.transport) j["transport"] = *b.transport;
    if (!b.cells.empty()) {
        auto& cells = j["cells"] = nlohmann::ordered_json::array();
        for (const auto& c : b.cells) {
            cells.push_back({{"label", c.label},
                             {"weight", c.weight},
                             {"counterfactual", c.counterfactual},
                             {"transport", c.transport},
                             {"scalar_reduction", c.scalar_reduction},
                             {"moments", c.moments}});
        }
    }
}

inline void to_json(nlohmann::ordered_json& j, const ConfidenceReport& r)
{
    j = {{"assumption", to_string(r.assumption)},
         {"theta_lower", r.theta_lower},
         {"theta_upper", r.theta_upper},
         {"se_lower", r.se_lower},
         {"se_upper", r.se_upper},
         {"correlation", r.correlation},
         {"cv", r.cv},
         {"alpha", r.alpha},
         {"ci", r.ci},
         {"n", r.n},
         {"variance_method", to_string(r.method)},
         {"bounds", r.bounds}};
}

inline void to_json(nlohmann::ordered_json& j, const EstimateRow& row)
{
    if (row.ok()) {
        j = *row.report;
    } else {
        j = {{"assumption", to_string(row.assumption)}, {"error", row.error}};
    }
}

inline void to_json(nlohmann::ordered_json& j, const LoadReport& r)
{
    j = {{"rows_read", r.rows_read}, {"rows_kept", r.rows_kept}, {"treated", r.treated},
         {"control", r.control},     {"dropped", r.dropped}};
}

inline void to_json(nlohmann::ordered_json& j, const CoverageReport& r)
{
    j = {{"assumption", to_string(r.assumption)},
         {"n", r.n},
         {"reps", r.reps},
         {"alpha", r.alpha},
         {"true_att", r.true_att},
         {"population_att", r.population_att},
         {"covered", r.covered},
         {"coverage", r.coverage},
         {"mean_ci_length", r.mean_ci_length},
         {"bias_lower", r.bias_lower},
         {"bias_upper", r.bias_upper},
         {"mean_cv", r.mean_cv}};
}

} // namespace ivdid

#endif // IVDID_SERIALIZE_HPP
