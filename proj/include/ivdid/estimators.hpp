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

#ifndef IVDID_ESTIMATORS_HPP
#define IVDID_ESTIMATORS_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "interval.hpp"
#include "panel.hpp"

namespace ivdid {

/// Identification assumption for the untreated counterfactual.
///
///  - spt: scalar parallel trends on the latent outcome.
///  - ipt: interval parallel trends; the control group's period-1 to
///         period-2 transport also moves the treated group.
///  - ps:  parallel shifts; the control-to-treated map of period 1 also
///         holds in period 2.
///  - cps: parallel shifts within discrete covariate cells.
enum class Assumption { spt, ipt, ps, cps };

inline const char* to_string(Assumption a)
{
    switch (a) {
    case Assumption::spt: return "SPT";
    case Assumption::ipt: return "IPT";
    case Assumption::ps: return "PS";
    case Assumption::cps: return "CPS";
    }
    return "?";
}

inline Assumption parse_assumption(std::string_view s)
{
    std::string u;
    for (char c : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (u == "SPT") return Assumption::spt;
    if (u == "IPT") return Assumption::ipt;
    if (u == "PS") return Assumption::ps;
    if (u == "CPS") return Assumption::cps;
    throw ConfigError("unknown assumption '" + std::string(s) + "' (expected SPT, IPT, PS or CPS)");
}

/// The eight group-by-period endpoint means the bounds are built from.
///
/// Naming follows the roles in the two-by-two design: control_pre is the
/// control group's period-1 Aumann mean, treated_post the treated group's
/// observed period-2 Aumann mean, and so on.
struct GroupMomentVector {
    Interval control_pre;
    Interval control_post;
    Interval treated_pre;
    Interval treated_post;
    std::size_t n_control = 0;
    std::size_t n_treated = 0;
};

inline GroupMomentVector compute_moments(std::span<const PanelUnit> panel)
{
    GroupMomentVector m;
    m.n_control = group_size(panel, Group::control);
    m.n_treated = group_size(panel, Group::treated);
    if (m.n_control == 0) throw PreconditionError("control group is empty");
    if (m.n_treated == 0) throw PreconditionError("treated group is empty");
    m.control_pre = group_moments(panel, Group::control, Period::pre);
    m.control_post = group_moments(panel, Group::control, Period::post);
    m.treated_pre = group_moments(panel, Group::treated, Period::pre);
    m.treated_post = group_moments(panel, Group::treated, Period::post);
    return m;
}

struct EstimatorOptions {
    // Mean pre-period widths at or below this count as zero.
    double width_floor = kDefaultWidthFloor;
    // Allowed gap between the two routes to the parallel-shift ATT set.
    double consistency_tol = 1e-9;
};

// Per-cell detail of a conditional parallel-shifts computation.
struct CellBounds {
    std::string label;
    GroupMomentVector moments;
    LinearIntervalMap transport;
    Interval counterfactual;
    double weight = 0.0;           // share of treated units in the cell
    bool scalar_reduction = false; // both pre-period widths zero; unit slope used
};

struct BoundsResult {
    Assumption assumption = Assumption::spt;
    Interval counterfactual; // identified set for E[Y2(0) | D = 1]
    Interval att;            // identified set for the ATT
    GroupMomentVector moments;
    std::optional<LinearIntervalMap> transport;
    bool scalar_reduction = false;
    std::vector<CellBounds> cells;
};

/// Scalar parallel trends: the counterfactual set is
/// treated_pre ⊕ (control_post ⊖ control_pre).
inline BoundsResult bounds_spt(const GroupMomentVector& m)
{
    BoundsResult r;
    r.assumption = Assumption::spt;
    r.moments = m;
    r.counterfactual = minkowski_sum(m.treated_pre, minkowski_diff(m.control_post, m.control_pre));
    r.att = minkowski_diff(m.treated_post, r.counterfactual);
    return r;
}

/// Interval parallel trends: transport the treated pre-period mean with the
/// map that carries control_pre onto control_post.
inline BoundsResult bounds_ipt(const GroupMomentVector& m, const EstimatorOptions& opt = {})
{
    BoundsResult r;
    r.assumption = Assumption::ipt;
    r.moments = m;
    try {
        r.transport = LinearIntervalMap::between(m.control_pre, m.control_post, opt.width_floor);
    } catch (const TransportUndefined& e) {
        throw TransportUndefined(std::string("IPT transport undefined: ") + e.what());
    }
    r.counterfactual = apply_map(*r.transport, m.treated_pre);
    r.att = minkowski_diff(m.treated_post, r.counterfactual);
    return r;
}

/// Parallel-shift map carrying control_pre onto treated_pre. When both
/// pre-period means are points the map is the unit-slope shift, which
/// reduces parallel shifts to ordinary parallel trends.
inline LinearIntervalMap parallel_shift_map(const Interval& control_pre, const Interval& treated_pre,
                                            double width_floor, bool* scalar_reduction = nullptr)
{
    if (control_pre.width() > width_floor) {
        if (scalar_reduction) *scalar_reduction = false;
        return LinearIntervalMap::between(control_pre, treated_pre, width_floor);
    }
    if (treated_pre.width() <= width_floor) {
        if (scalar_reduction) *scalar_reduction = true;
        return LinearIntervalMap(1.0, control_pre.lower(), treated_pre.lower());
    }
    std::ostringstream os;
    os << "PS transport undefined: control pre-period mean " << control_pre << " has zero width while treated "
       << treated_pre << " does not";
    throw TransportUndefined(os.str());
}

/// Closed-form parallel-shift ATT endpoints, written directly in the
/// moments rather than through the Minkowski difference.
inline Interval ps_att_explicit(const GroupMomentVector& m, double gamma)
{
    const double a1l = m.control_pre.lower();
    const double theta_l = m.treated_post.lower() - gamma * (m.control_post.upper() - a1l) - m.treated_pre.lower();
    const double theta_u = m.treated_post.upper() - gamma * (m.control_post.lower() - a1l) - m.treated_pre.lower();
    return Interval(theta_l, theta_u);
}

inline BoundsResult bounds_ps(const GroupMomentVector& m, const EstimatorOptions& opt = {})
{
    BoundsResult r;
    r.assumption = Assumption::ps;
    r.moments = m;
    r.transport = parallel_shift_map(m.control_pre, m.treated_pre, opt.width_floor, &r.scalar_reduction);
    r.counterfactual = apply_map(*r.transport, m.control_post);
    r.att = minkowski_diff(m.treated_post, r.counterfactual);

    const Interval direct = ps_att_explicit(m, r.transport->slope());
    const double scale = std::max({1.0, std::abs(direct.lower()), std::abs(direct.upper())});
    if (!approx_equal(direct, r.att, opt.consistency_tol * scale)) {
        std::ostringstream os;
        os.precision(17);
        os << "parallel-shift ATT routes disagree: Minkowski " << r.att << " vs closed form " << direct;
        throw InternalConsistencyError(os.str());
    }
    return r;
}

/// Parallel shifts within covariate cells, aggregated over the treated
/// group's cell distribution.
///
/// Every unit must carry a covariate cell, and every cell must contain both
/// treated and control units with a usable control pre-period width.
/// Cell sums run in label order so the result does not depend on row order.
inline BoundsResult bounds_cps(std::span<const PanelUnit> panel, const EstimatorOptions& opt = {})
{
    std::map<std::string, Panel> by_cell;
    for (const auto& u : panel) {
        if (!u.covariate_cell) {
            throw PreconditionError("CPS requires a covariate cell on every unit; unit '" + u.unit_id + "' has none");
        }
        by_cell[*u.covariate_cell].push_back(u);
    }

    BoundsResult r;
    r.assumption = Assumption::cps;
    r.moments = compute_moments(panel);
    const double n_treated = static_cast<double>(r.moments.n_treated);

    std::vector<double> lo_terms;
    std::vector<double> hi_terms;
    for (const auto& [label, units] : by_cell) {
        CellBounds cell;
        cell.label = label;
        const std::size_t n0 = group_size(units, Group::control);
        const std::size_t n1 = group_size(units, Group::treated);
        if (n0 == 0 || n1 == 0) {
            throw PreconditionError("CPS overlap violated in cell '" + label + "': " + std::to_string(n1) +
                                    " treated, " + std::to_string(n0) + " control");
        }
        cell.moments = compute_moments(units);
        try {
            cell.transport = parallel_shift_map(cell.moments.control_pre, cell.moments.treated_pre, opt.width_floor,
                                                &cell.scalar_reduction);
        } catch (const TransportUndefined& e) {
            throw TransportUndefined("CPS cell '" + label + "': " + e.what());
        }
        cell.counterfactual = apply_map(cell.transport, cell.moments.control_post);
        cell.weight = static_cast<double>(n1) / n_treated;
        lo_terms.push_back(cell.weight * cell.counterfactual.lower());
        hi_terms.push_back(cell.weight * cell.counterfactual.upper());
        r.scalar_reduction = r.scalar_reduction || cell.scalar_reduction;
        r.cells.push_back(std::move(cell));
    }
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t k = 0; k < lo_terms.size(); ++k) {
        lo += lo_terms[k];
        hi += hi_terms[k];
    }
    r.counterfactual = Interval(lo, std::max(lo, hi));
    r.att = minkowski_diff(r.moments.treated_post, r.counterfactual);
    return r;
}

inline BoundsResult bounds_from_moments(Assumption a, const GroupMomentVector& m, const EstimatorOptions& opt = {})
{
    switch (a) {
    case Assumption::spt: return bounds_spt(m);
    case Assumption::ipt: return bounds_ipt(m, opt);
    case Assumption::ps: return bounds_ps(m, opt);
    case Assumption::cps: break;
    }
    throw PreconditionError("CPS bounds need unit-level covariates, not a moment vector");
}

inline BoundsResult estimate_bounds(Assumption a, std::span<const PanelUnit> panel, const EstimatorOptions& opt = {})
{
    if (a == Assumption::cps) return bounds_cps(panel, opt);
    return bounds_from_moments(a, compute_moments(panel), opt);
}

// Difference of mean changes, the textbook two-by-two DID, evaluated as
// treated_post - (treated_pre + control trend).
inline double classical_did(double treated_pre, double treated_post, double control_pre, double control_post)
{
    return treated_post - (treated_pre + (control_post - control_pre));
}

enum class ScalarSource { automatic, scalar_column, midpoint };

/// Classical DID on a scalar outcome: the unrecoded scalar column when every
/// unit has one (automatic), otherwise interval midpoints.
inline double classical_did(std::span<const PanelUnit> panel, ScalarSource source = ScalarSource::automatic)
{
    const bool all_scalar = std::all_of(panel.begin(), panel.end(),
                                        [](const PanelUnit& u) { return u.scalar_y1 && u.scalar_y2; });
    if (source == ScalarSource::scalar_column && !all_scalar) {
        throw PreconditionError("classical DID: scalar outcome column missing on some units");
    }
    const bool use_scalar = source == ScalarSource::scalar_column || (source == ScalarSource::automatic && all_scalar);

    std::vector<double> v[2][2];
    for (const auto& u : panel) {
        const int g = u.treated ? 1 : 0;
        v[g][0].push_back(use_scalar ? *u.scalar_y1 : u.y1.midpoint());
        v[g][1].push_back(use_scalar ? *u.scalar_y2 : u.y2.midpoint());
    }
    if (v[0][0].empty()) throw PreconditionError("classical DID: control group is empty");
    if (v[1][0].empty()) throw PreconditionError("classical DID: treated group is empty");
    return classical_did(detail::ordered_mean(v[1][0]), detail::ordered_mean(v[1][1]), detail::ordered_mean(v[0][0]),
                         detail::ordered_mean(v[0][1]));
}

} // namespace ivdid

#endif // IVDID_ESTIMATORS_HPP
