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

#ifndef IVDID_REPORT_HPP
#define IVDID_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "estimators.hpp"
#include "inference.hpp"
#include "loader.hpp"
#include "simulation.hpp"

namespace ivdid {

/// Outcome of estimating under one assumption; exactly one of `report` and
/// `error` is set.
struct EstimateRow {
    Assumption assumption = Assumption::spt;
    std::optional<ConfidenceReport> report;
    std::string error;

    bool ok() const noexcept { return report.has_value(); }
};

namespace detail {

inline std::string sig6(double v)
{
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace detail

// Columns: assumption,status,theta_lower,theta_upper,se_lower,se_upper,
// correlation,cv,ci_lower,ci_upper,cf_lower,cf_upper,slope,alpha,n,method,error
inline void write_results_csv(std::ostream& os, const std::vector<EstimateRow>& rows)
{
    using detail::format_double;
    os << "assumption,status,theta_lower,theta_upper,se_lower,se_upper,correlation,cv,ci_lower,ci_upper,"
          "cf_lower,cf_upper,slope,alpha,n,method,error\n";
    for (const auto& row : rows) {
        os << to_string(row.assumption) << ',';
        if (!row.ok()) {
            os << "error,,,,,,,,,,,,,,," << detail::csv_escape(row.error) << '\n';
            continue;
        }
        const auto& r = *row.report;
        os << "ok," << format_double(r.theta_lower) << ',' << format_double(r.theta_upper) << ','
           << format_double(r.se_lower) << ',' << format_double(r.se_upper) << ',' << format_double(r.correlation)
           << ',' << format_double(r.cv) << ',' << format_double(r.ci.lower()) << ',' << format_double(r.ci.upper())
           << ',' << format_double(r.bounds.counterfactual.lower()) << ','
           << format_double(r.bounds.counterfactual.upper()) << ',';
        if (r.bounds.transport) os << format_double(r.bounds.transport->slope());
        os << ',' << format_double(r.alpha) << ',' << r.n << ',' << to_string(r.method) << ",\n";
    }
}

inline std::string format_results_table(const std::vector<EstimateRow>& rows)
{
    std::ostringstream os;
    auto cell = [&](const std::string& s, int w) { os << std::setw(w) << s; };
    cell("assumption", 10);
    for (const char* h : {"theta_L", "theta_U", "se_L", "se_U", "cv", "ci_L", "ci_U"}) cell(h, 12);
    os << '\n';
    for (const auto& row : rows) {
        cell(to_string(row.assumption), 10);
        if (!row.ok()) {
            os << "  error: " << row.error << '\n';
            continue;
        }
        const auto& r = *row.report;
        for (double v : {r.theta_lower, r.theta_upper, r.se_lower, r.se_upper, r.cv, r.ci.lower(), r.ci.upper()}) {
            cell(detail::sig6(v), 12);
        }
        os << '\n';
    }
    return os.str();
}

/// Bounds-over-time figure data. Observed series are the group Aumann means
/// per period; each counterfactual series starts at the treated group's
/// period-1 mean and ends at that assumption's counterfactual set.
// Columns: series,period,lower,upper
inline void write_bounds_figure_csv(std::ostream& os, const GroupMomentVector& m, const std::vector<EstimateRow>& rows)
{
    using detail::format_double;
    auto line = [&](const std::string& series, int period, const Interval& iv) {
        os << series << ',' << period << ',' << format_double(iv.lower()) << ',' << format_double(iv.upper()) << '\n';
    };
    os << "series,period,lower,upper\n";
    line("control", 1, m.control_pre);
    line("control", 2, m.control_post);
    line("treated", 1, m.treated_pre);
    line("treated", 2, m.treated_post);
    for (const auto& row : rows) {
        if (!row.ok()) continue;
        const std::string name = std::string("counterfactual_") + to_string(row.assumption);
        line(name, 1, m.treated_pre);
        line(name, 2, row.report->bounds.counterfactual);
    }
}

// Columns: assumption,theta_lower,theta_upper,ci_lower,ci_upper
inline void write_att_figure_csv(std::ostream& os, const std::vector<EstimateRow>& rows)
{
    using detail::format_double;
    os << "assumption,theta_lower,theta_upper,ci_lower,ci_upper\n";
    for (const auto& row : rows) {
        if (!row.ok()) continue;
        const auto& r = *row.report;
        os << to_string(row.assumption) << ',' << format_double(r.theta_lower) << ',' << format_double(r.theta_upper)
           << ',' << format_double(r.ci.lower()) << ',' << format_double(r.ci.upper()) << '\n';
    }
}

namespace detail {

// Vertical-range chart: one column per category, a solid bar for each
// interval and an optional dotted whisker around it.
struct RangeColumn {
    std::string label;
    std::string group;
    Interval solid;
    std::optional<Interval> dotted;
};

inline std::string svg_range_chart(const std::string& title, const std::vector<RangeColumn>& cols, bool zero_line)
{
    constexpr double width = 640.0, height = 400.0, left = 60.0, right = 20.0, top = 40.0, bottom = 60.0;
    double lo = zero_line ? 0.0 : std::numeric_limits<double>::infinity();
    double hi = zero_line ? 0.0 : -std::numeric_limits<double>::infinity();
    for (const auto& c : cols) {
        const Interval& outer = c.dotted ? *c.dotted : c.solid;
        lo = std::min({lo, outer.lower(), c.solid.lower()});
        hi = std::max({hi, outer.upper(), c.solid.upper()});
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto y = [&](double v) { return top + (hi - v) / (hi - lo) * (height - top - bottom); };
    const double step = cols.empty() ? 0.0 : (width - left - right) / static_cast<double>(cols.size());

    std::ostringstream os;
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\">" << xml_escape(title) << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
       << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        os << "<text x=\"" << left - 6 << "\" y=\"" << y(v) + 4 << "\" text-anchor=\"end\">" << sig6(v) << "</text>\n";
    }
    if (zero_line) {
        os << "<line x1=\"" << left << "\" y1=\"" << y(0.0) << "\" x2=\"" << width - right << "\" y2=\"" << y(0.0)
           << "\" stroke=\"gray\" stroke-dasharray=\"2,2\"/>\n";
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const auto& c = cols[i];
        const double x = left + step * (static_cast<double>(i) + 0.5);
        const char* colour = c.group == "control" ? "#1f77b4" : c.group == "treated" ? "#d62728" : "#2ca02c";
        if (c.dotted) {
            os << "<line x1=\"" << x << "\" y1=\"" << y(c.dotted->lower()) << "\" x2=\"" << x << "\" y2=\""
               << y(c.dotted->upper()) << "\" stroke=\"" << colour << "\" stroke-dasharray=\"3,3\"/>\n";
        }
        os << "<line x1=\"" << x << "\" y1=\"" << y(c.solid.lower()) << "\" x2=\"" << x << "\" y2=\""
           << y(c.solid.upper()) << "\" stroke=\"" << colour << "\" stroke-width=\"6\"/>\n";
        os << "<text x=\"" << x << "\" y=\"" << height - bottom + 18 << "\" text-anchor=\"middle\">"
           << xml_escape(c.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace detail

inline std::string svg_bounds_figure(const GroupMomentVector& m, const std::vector<EstimateRow>& rows)
{
    std::vector<detail::RangeColumn> cols = {
        {"control t=1", "control", m.control_pre, std::nullopt},
        {"control t=2", "control", m.control_post, std::nullopt},
        {"treated t=1", "treated", m.treated_pre, std::nullopt},
        {"treated t=2", "treated", m.treated_post, std::nullopt},
    };
    for (const auto& row : rows) {
        if (row.ok()) cols.push_back({std::string("M ") + to_string(row.assumption), "counterfactual",
                                      row.report->bounds.counterfactual, std::nullopt});
    }
    return detail::svg_range_chart("Group means and counterfactual sets", cols, false);
}

inline std::string svg_att_figure(const std::vector<EstimateRow>& rows)
{
    std::vector<detail::RangeColumn> cols;
    for (const auto& row : rows) {
        if (row.ok()) cols.push_back({to_string(row.assumption), "att", row.report->bounds.att, row.report->ci});
    }
    return detail::svg_range_chart("ATT bounds and confidence intervals", cols, true);
}

// Columns: assumption,target,set_lower,set_upper,targeted_point,true_counterfactual,error,true_att,assumption_holds,
// passed,skipped
inline void write_sharpness_csv(std::ostream& os, const std::vector<SharpnessCase>& cases)
{
    using detail::format_double;
    os << "assumption,target,set_lower,set_upper,targeted_point,true_counterfactual,error,true_att,assumption_holds,"
          "passed,skipped\n";
    for (const auto& c : cases) {
        os << to_string(c.assumption) << ',' << format_double(c.target) << ',';
        if (!c.skipped.empty()) {
            os << ",,,,,,,false," << detail::csv_escape(c.skipped) << '\n';
            continue;
        }
        os << format_double(c.counterfactual_set.lower()) << ',' << format_double(c.counterfactual_set.upper()) << ','
           << format_double(c.targeted_point) << ',' << format_double(c.true_counterfactual) << ','
           << format_double(c.error()) << ',' << format_double(c.true_att) << ','
           << (c.assumption_holds ? "true" : "false") << ',' << (c.passed ? "true" : "false") << ",\n";
    }
}

// Columns: assumption,n,reps,alpha,true_att,att_lower,att_upper,coverage,mean_ci_length,bias_lower,bias_upper,mean_cv
inline void write_coverage_csv(std::ostream& os, const std::vector<CoverageReport>& reports)
{
    using detail::format_double;
    os << "assumption,n,reps,alpha,true_att,att_lower,att_upper,coverage,mean_ci_length,bias_lower,bias_upper,"
          "mean_cv\n";
    for (const auto& r : reports) {
        os << to_string(r.assumption) << ',' << r.n << ',' << r.reps << ',' << format_double(r.alpha) << ','
           << format_double(r.true_att) << ',' << format_double(r.population_att.lower()) << ','
           << format_double(r.population_att.upper()) << ',' << format_double(r.coverage) << ','
           << format_double(r.mean_ci_length) << ',' << format_double(r.bias_lower) << ','
           << format_double(r.bias_upper) << ',' << format_double(r.mean_cv) << '\n';
    }
}

} // namespace ivdid

#endif // IVDID_REPORT_HPP
