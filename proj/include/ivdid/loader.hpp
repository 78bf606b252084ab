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

#ifndef IVDID_LOADER_HPP
#define IVDID_LOADER_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "kv_config.hpp"
#include "panel.hpp"
#include "recoding.hpp"

namespace ivdid {

enum class CountKind { full_time = 0, part_time = 1, managers = 2 };

inline constexpr std::array<const char*, 3> kCountRoleNames = {"full_time", "part_time", "managers"};

/// Column mapping from a delimited file onto panel roles.
///
/// Two layouts are understood: raw per-period counts (full-time, part-time,
/// managers), which are recoded and combined into FTE intervals, or
/// ready-made per-period interval columns.
struct Schema {
    enum class Layout { counts, intervals };
    enum class Delimiter { automatic, comma, tab, whitespace };

    Delimiter delimiter = Delimiter::automatic;
    std::string id_column;
    std::string group_column;
    std::vector<std::string> treated_values;
    std::vector<std::string> control_values; // empty: every non-treated value is control
    Layout layout = Layout::counts;
    // [period][kind]
    std::array<std::array<std::string, 3>, 2> count_columns{};
    std::array<bool, 3> recode_kind = {true, true, true};
    // [period][lower, upper]
    std::array<std::array<std::string, 2>, 2> interval_columns{};
    std::array<std::string, 2> scalar_columns{};
    std::vector<std::string> covariates;
    bool covariates_optional = false; // missing covariate: no cell instead of a dropped row
    std::vector<std::string> missing_tokens = {"", ".", "NA", "NaN", "nan"};
    RecodingPolicy policy;

    static Delimiter parse_delimiter(const std::string& s)
    {
        if (s == "auto") return Delimiter::automatic;
        if (s == "comma" || s == ",") return Delimiter::comma;
        if (s == "tab" || s == "\\t") return Delimiter::tab;
        if (s == "whitespace" || s == "space") return Delimiter::whitespace;
        throw ConfigError("unknown delimiter '" + s + "'");
    }

    // Reads roles from a key-value file. Missing required roles surface as
    // LoadError(missing_role) naming the role.
    static Schema from_config(const KeyValueConfig& cfg)
    {
        Schema s;
        if (auto d = cfg.get("delimiter")) s.delimiter = parse_delimiter(*d);
        auto role = [&](const std::string& key) -> std::string {
            auto v = cfg.get(key);
            if (!v || v->empty()) {
                throw LoadError(LoadError::Kind::missing_role, "schema is missing required role '" + key + "'");
            }
            return *v;
        };
        s.id_column = role("id");
        s.group_column = role("group");
        s.treated_values = detail::split_list(role("treated_values"));
        if (auto v = cfg.get("control_values")) s.control_values = detail::split_list(*v);
        if (auto v = cfg.get("missing")) s.missing_tokens = detail::split_list(*v);

        const bool has_intervals = cfg.has("y1_lower") || cfg.has("y1_upper") || cfg.has("y2_lower") ||
                                   cfg.has("y2_upper");
        if (has_intervals) {
            s.layout = Layout::intervals;
            s.interval_columns = {{{role("y1_lower"), role("y1_upper")}, {role("y2_lower"), role("y2_upper")}}};
        } else {
            s.layout = Layout::counts;
            for (int p = 0; p < 2; ++p) {
                for (int k = 0; k < 3; ++k) {
                    s.count_columns[p][k] = role(std::string(kCountRoleNames[k]) + "." + std::to_string(p + 1));
                }
            }
            for (int k = 0; k < 3; ++k) {
                if (auto b = cfg.get_bool(std::string("recode.") + kCountRoleNames[k])) s.recode_kind[k] = *b;
            }
        }
        for (int p = 0; p < 2; ++p) {
            if (auto v = cfg.get("scalar." + std::to_string(p + 1))) s.scalar_columns[p] = *v;
        }
        if (auto v = cfg.get("covariates"); v && !v->empty()) s.covariates = detail::split_list(*v);

        if (auto v = cfg.get_int("heap_threshold")) s.policy.heap_threshold = static_cast<int>(*v);
        if (auto v = cfg.get_int("heap_modulus")) s.policy.heap_modulus = static_cast<int>(*v);
        if (auto v = cfg.get_double("heap_halfwidth")) s.policy.heap_halfwidth = *v;
        if (auto v = cfg.get("decimal_rule")) s.policy.decimal_rule = parse_decimal_rule(*v);
        s.policy.validate();
        return s;
    }

    // Layout written by write_panel_csv.
    static Schema recoded_panel()
    {
        Schema s;
        s.delimiter = Delimiter::comma;
        s.id_column = "id";
        s.group_column = "treated";
        s.treated_values = {"1"};
        s.control_values = {"0"};
        s.layout = Layout::intervals;
        s.interval_columns = {{{"y1_lower", "y1_upper"}, {"y2_lower", "y2_upper"}}};
        s.covariates = {"cell"};
        s.covariates_optional = true;
        return s;
    }
};

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t rows_kept = 0;
    std::size_t treated = 0;
    std::size_t control = 0;
    std::map<std::string, std::size_t> dropped; // reason -> count

    std::size_t rows_dropped() const
    {
        std::size_t n = 0;
        for (const auto& [_, c] : dropped) n += c;
        return n;
    }

    std::string to_text() const
    {
        std::ostringstream os;
        os << "rows_read = " << rows_read << '\n'
           << "rows_kept = " << rows_kept << '\n'
           << "rows_dropped = " << rows_dropped() << '\n'
           << "treated = " << treated << '\n'
           << "control = " << control << '\n';
        for (const auto& [reason, count] : dropped) os << "dropped." << reason << " = " << count << '\n';
        return os.str();
    }
};

struct LoadResult {
    Panel units;
    LoadReport report;
};

namespace detail {

inline std::vector<std::string> split_row(const std::string& line, Schema::Delimiter delim)
{
    std::vector<std::string> out;
    if (delim == Schema::Delimiter::whitespace) {
        std::istringstream in(line);
        std::string tok;
        while (in >> tok) out.push_back(tok);
        return out;
    }
    const char sep = delim == Schema::Delimiter::tab ? '\t' : ',';
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == sep) {
            out.push_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(trim(field));
    return out;
}

inline Schema::Delimiter sniff_delimiter(const std::string& header)
{
    if (header.find('\t') != std::string::npos) return Schema::Delimiter::tab;
    if (header.find(',') != std::string::npos) return Schema::Delimiter::comma;
    return Schema::Delimiter::whitespace;
}

inline std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace detail

/// Reads a delimited panel file, recoding counts into FTE intervals.
///
/// Rows with a missing required field in either period (or a missing
/// group/covariate) are dropped and tallied in the report. Unknown columns,
/// unparseable numbers and an empty arm after filtering throw LoadError.
inline LoadResult load_panel(std::istream& in, const Schema& schema)
{
    schema.policy.validate();
    std::string header_line;
    if (!std::getline(in, header_line)) throw LoadError(LoadError::Kind::io, "panel file is empty");
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
    if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0) header_line.erase(0, 3);

    const auto delim =
        schema.delimiter == Schema::Delimiter::automatic ? detail::sniff_delimiter(header_line) : schema.delimiter;
    const auto header = detail::split_row(header_line, delim);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index.emplace(header[i], i);

    auto column = [&](const std::string& name) -> std::size_t {
        const auto it = index.find(name);
        if (it == index.end()) {
            throw LoadError(LoadError::Kind::unknown_column, "column '" + name + "' not found in header");
        }
        return it->second;
    };

    const std::size_t id_col = column(schema.id_column);
    const std::size_t group_col = column(schema.group_column);
    std::array<std::array<std::size_t, 3>, 2> count_idx{};
    std::array<std::array<std::size_t, 2>, 2> interval_idx{};
    if (schema.layout == Schema::Layout::counts) {
        for (int p = 0; p < 2; ++p)
            for (int k = 0; k < 3; ++k) count_idx[p][k] = column(schema.count_columns[p][k]);
    } else {
        for (int p = 0; p < 2; ++p)
            for (int e = 0; e < 2; ++e) interval_idx[p][e] = column(schema.interval_columns[p][e]);
    }
    std::array<std::optional<std::size_t>, 2> scalar_idx;
    for (int p = 0; p < 2; ++p) {
        if (!schema.scalar_columns[p].empty()) scalar_idx[p] = column(schema.scalar_columns[p]);
    }
    std::vector<std::size_t> cov_idx;
    for (const auto& c : schema.covariates) cov_idx.push_back(column(c));

    auto is_missing = [&](const std::string& v) {
        return std::find(schema.missing_tokens.begin(), schema.missing_tokens.end(), v) !=
               schema.missing_tokens.end();
    };

    LoadResult result;
    auto& report = result.report;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        ++report.rows_read;
        auto fields = detail::split_row(line, delim);
        if (fields.size() < header.size()) fields.resize(header.size());

        std::string drop_reason;
        auto number = [&](std::size_t col, const std::string& role) -> std::optional<double> {
            const std::string& raw = fields[col];
            if (is_missing(raw)) {
                if (drop_reason.empty()) drop_reason = "missing_" + role;
                return std::nullopt;
            }
            const auto v = detail::parse_double(raw);
            if (!v || !std::isfinite(*v)) {
                throw LoadError(LoadError::Kind::bad_numeric, "line " + std::to_string(lineno) + ", column '" +
                                                                  header[col] + "': cannot parse '" + raw + "'");
            }
            return v;
        };

        const std::string group_value = fields[group_col];
        if (is_missing(group_value)) drop_reason = "missing_group";

        PanelUnit unit;
        unit.unit_id = fields[id_col];
        unit.treated = std::find(schema.treated_values.begin(), schema.treated_values.end(), group_value) !=
                       schema.treated_values.end();
        if (drop_reason.empty() && !unit.treated && !schema.control_values.empty() &&
            std::find(schema.control_values.begin(), schema.control_values.end(), group_value) ==
                schema.control_values.end()) {
            drop_reason = "other_group";
        }

        std::array<std::optional<Interval>, 2> outcome;
        std::array<std::optional<double>, 2> scalar;
        for (int p = 0; p < 2; ++p) {
            const std::string suffix = "." + std::to_string(p + 1);
            if (schema.layout == Schema::Layout::counts) {
                std::array<std::optional<double>, 3> counts;
                for (int k = 0; k < 3; ++k) counts[k] = number(count_idx[p][k], kCountRoleNames[k] + suffix);
                if (!counts[0] || !counts[1] || !counts[2]) continue;
                std::array<Interval, 3> iv;
                for (int k = 0; k < 3; ++k) {
                    if (*counts[k] < 0.0) {
                        throw LoadError(LoadError::Kind::bad_numeric,
                                        "line " + std::to_string(lineno) + ", column '" +
                                            header[count_idx[p][k]] + "': negative count");
                    }
                    iv[k] = schema.recode_kind[k] ? recode_count(*counts[k], schema.policy)
                                                  : Interval::point(*counts[k]);
                }
                outcome[p] = fte_interval(iv[0], iv[2], iv[1]);
                scalar[p] = fte_scalar(*counts[0], *counts[2], *counts[1]);
            } else {
                const auto lo = number(interval_idx[p][0], "y" + std::to_string(p + 1) + "_lower");
                const auto hi = number(interval_idx[p][1], "y" + std::to_string(p + 1) + "_upper");
                if (!lo || !hi) continue;
                if (*lo > *hi) {
                    throw LoadError(LoadError::Kind::bad_numeric,
                                    "line " + std::to_string(lineno) + ": period " + std::to_string(p + 1) +
                                        " interval has lower > upper");
                }
                outcome[p] = Interval(*lo, *hi);
            }
            if (scalar_idx[p] && !is_missing(fields[*scalar_idx[p]])) {
                scalar[p] = number(*scalar_idx[p], "scalar" + suffix);
            }
        }

        std::string cell;
        bool has_cell = !cov_idx.empty();
        for (std::size_t c = 0; c < cov_idx.size(); ++c) {
            const std::string& v = fields[cov_idx[c]];
            if (is_missing(v)) {
                has_cell = false;
                if (!schema.covariates_optional && drop_reason.empty()) {
                    drop_reason = "missing_" + schema.covariates[c];
                }
                break;
            }
            if (c > 0) cell += '|';
            cell += cov_idx.size() == 1 ? v : schema.covariates[c] + "=" + v;
        }

        if (!drop_reason.empty()) {
            ++report.dropped[drop_reason];
            continue;
        }
        unit.y1 = *outcome[0];
        unit.y2 = *outcome[1];
        unit.scalar_y1 = scalar[0];
        unit.scalar_y2 = scalar[1];
        if (has_cell) unit.covariate_cell = cell;
        ++report.rows_kept;
        ++(unit.treated ? report.treated : report.control);
        result.units.push_back(std::move(unit));
    }

    if (report.treated == 0) throw LoadError(LoadError::Kind::empty_treated, "treated group empty after filtering");
    if (report.control == 0) throw LoadError(LoadError::Kind::empty_control, "control group empty after filtering");
    return result;
}

inline LoadResult load_panel(const std::string& path, const Schema& schema)
{
    std::ifstream in(path);
    if (!in) throw LoadError(LoadError::Kind::io, "cannot open panel file '" + path + "'");
    return load_panel(in, schema);
}

// Writes the columns (id, treated, y1_lower, y1_upper, y2_lower, y2_upper, cell)
// at full round-trip precision.
inline void write_panel_csv(std::ostream& out, std::span<const PanelUnit> panel)
{
    out << "id,treated,y1_lower,y1_upper,y2_lower,y2_upper,cell\n";
    for (const auto& u : panel) {
        out << u.unit_id << ',' << (u.treated ? 1 : 0) << ',' << detail::format_double(u.y1.lower()) << ','
            << detail::format_double(u.y1.upper()) << ',' << detail::format_double(u.y2.lower()) << ','
            << detail::format_double(u.y2.upper()) << ',';
        if (u.covariate_cell) {
            const bool quote = u.covariate_cell->find(',') != std::string::npos;
            if (quote) out << '"';
            out << *u.covariate_cell;
            if (quote) out << '"';
        }
        out << '\n';
    }
}

} // namespace ivdid

#endif // IVDID_LOADER_HPP
