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

#ifndef IVDID_SIMULATION_HPP
#define IVDID_SIMULATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "estimators.hpp"
#include "inference.hpp"
#include "interval.hpp"
#include "kv_config.hpp"
#include "panel.hpp"
#include "parallel.hpp"
#include "recoding.hpp"

namespace ivdid {

/// One support point of a finite population.
///
/// `y1`, `y2` are the observed intervals. `y2_untreated` is the potential
/// period-2 interval without treatment (equal to `y2` for control units).
/// The latent scalars are the unobserved true outcomes.
struct PopulationPoint {
    double mass = 0.0;
    bool treated = false;
    Interval y1;
    Interval y2;
    Interval y2_untreated;
    double latent_y1 = 0.0;
    double latent_y2_0 = 0.0;
    double latent_y2_1 = 0.0;
};

class FinitePopulation {
public:
    FinitePopulation() = default;

    explicit FinitePopulation(std::vector<PopulationPoint> points, double tol = 1e-12) : points_(std::move(points))
    {
        validate(tol);
    }

    const std::vector<PopulationPoint>& points() const noexcept { return points_; }

    double arm_mass(bool treated) const
    {
        std::vector<double> m;
        for (const auto& p : points_)
            if (p.treated == treated) m.push_back(p.mass);
        return detail::ordered_sum(std::move(m));
    }

    // E[f(point) | D = treated], exact over the support.
    template <class F>
    double conditional_mean(bool treated, F&& f) const
    {
        std::vector<double> num;
        std::vector<double> den;
        for (const auto& p : points_) {
            if (p.treated != treated) continue;
            num.push_back(p.mass * f(p));
            den.push_back(p.mass);
        }
        return detail::ordered_sum(std::move(num)) / detail::ordered_sum(std::move(den));
    }

    template <class F>
    Interval conditional_aumann(bool treated, F&& interval_of) const
    {
        const double lo = conditional_mean(treated, [&](const PopulationPoint& p) { return interval_of(p).lower(); });
        const double hi = conditional_mean(treated, [&](const PopulationPoint& p) { return interval_of(p).upper(); });
        return Interval(lo, std::max(lo, hi));
    }

    GroupMomentVector moments() const
    {
        GroupMomentVector m;
        auto y1 = [](const PopulationPoint& p) -> const Interval& { return p.y1; };
        auto y2 = [](const PopulationPoint& p) -> const Interval& { return p.y2; };
        m.control_pre = conditional_aumann(false, y1);
        m.control_post = conditional_aumann(false, y2);
        m.treated_pre = conditional_aumann(true, y1);
        m.treated_post = conditional_aumann(true, y2);
        for (const auto& p : points_) ++(p.treated ? m.n_treated : m.n_control);
        return m;
    }

    double true_counterfactual_mean() const
    {
        return conditional_mean(true, [](const PopulationPoint& p) { return p.latent_y2_0; });
    }

    double true_att() const
    {
        return conditional_mean(true, [](const PopulationPoint& p) { return p.latent_y2_1 - p.latent_y2_0; });
    }

    /// Whether the latent structure satisfies an identification assumption
    /// at population level (and every latent lies in its interval).
    bool satisfies(Assumption a, double tol = 1e-10) const
    {
        for (const auto& p : points_) {
            if (!p.y1.contains(p.latent_y1, tol) || !p.y2_untreated.contains(p.latent_y2_0, tol)) return false;
            if (p.treated && !p.y2.contains(p.latent_y2_1, tol)) return false;
            if (!p.treated && !(p.y2_untreated == p.y2)) return false;
        }
        const GroupMomentVector m = moments();
        auto untreated = [](const PopulationPoint& p) -> const Interval& { return p.y2_untreated; };
        switch (a) {
        case Assumption::spt: {
            auto trend = [](const PopulationPoint& p) { return p.latent_y2_0 - p.latent_y1; };
            return std::abs(conditional_mean(true, trend) - conditional_mean(false, trend)) <= tol;
        }
        case Assumption::ipt: {
            const auto t = LinearIntervalMap::between(m.control_pre, m.control_post);
            return approx_equal(conditional_aumann(true, untreated), apply_map(t, m.treated_pre), tol);
        }
        case Assumption::ps: {
            const auto s = parallel_shift_map(m.control_pre, m.treated_pre, kDefaultWidthFloor);
            return approx_equal(conditional_aumann(true, untreated), apply_map(s, conditional_aumann(false, untreated)),
                                tol);
        }
        case Assumption::cps: break;
        }
        throw PreconditionError("finite populations carry no covariates; CPS is not checkable here");
    }

private:
    void validate(double tol) const
    {
        double total = 0.0;
        double treated = 0.0;
        double control = 0.0;
        for (const auto& p : points_) {
            if (!(p.mass >= 0.0) || !std::isfinite(p.mass)) throw PreconditionError("population masses must be >= 0");
            total += p.mass;
            (p.treated ? treated : control) += p.mass;
        }
        if (std::abs(total - 1.0) > tol) {
            std::ostringstream os;
            os.precision(17);
            os << "population masses sum to " << total << ", not 1";
            throw PreconditionError(os.str());
        }
        if (!(treated > 0.0) || !(control > 0.0)) throw PreconditionError("both treatment arms need positive mass");
    }

    std::vector<PopulationPoint> points_;
};

inline BoundsResult population_bounds(const FinitePopulation& pop, Assumption a, const EstimatorOptions& opt = {})
{
    return bounds_from_moments(a, pop.moments(), opt);
}

// ---------------------------------------------------------------------------
// Data-generating process descriptions

struct GroupPoint {
    double mass = 1.0; // relative within the group; normalized on use
    Interval y1;
    Interval y2;
};

// Draws latent scalar outcomes for a group and coarsens them to intervals.
struct GroupGenerator {
    std::size_t points = 0;
    double level = 0.0;
    double trend = 0.0;
    double spread = 1.0;
    double noise = 0.5;
};

struct Coarsening {
    enum class Kind { bracket, heaping };
    Kind kind = Kind::bracket;
    // bracket: point k gets width bracket_widths[k % size] at a random offset
    std::vector<double> bracket_widths = {1.0};
    // heaping: a count is rounded to the heap modulus with this probability,
    // then read back through the recoding policy
    double heap_probability = 0.5;
    RecodingPolicy policy;
};

/// What population the attainment construction should produce.
///
/// `target` is the relative position in the counterfactual identified set
/// (0 lower endpoint, 1 upper endpoint). The treated units' realized
/// period-2 outcome sits at `treated_outcome_position` within their observed
/// interval, by default 1 - target, which puts the true ATT at the
/// (1 - target) point of the ATT set.
struct DgpSpec {
    Assumption assumption = Assumption::ps;
    double target = 0.0;
    std::optional<double> treated_outcome_position;
    double treated_share = 0.5;
    std::vector<GroupPoint> control;
    std::vector<GroupPoint> treated;
    GroupGenerator control_generator;
    GroupGenerator treated_generator;
    Coarsening coarsening;
    std::uint64_t seed = 1;

    void validate() const
    {
        if (assumption == Assumption::cps) throw ConfigError("DGP spec: CPS has no attainment construction");
        if (!(target >= 0.0 && target <= 1.0)) throw ConfigError("DGP spec: target must lie in [0, 1]");
        if (treated_outcome_position && !(*treated_outcome_position >= 0.0 && *treated_outcome_position <= 1.0)) {
            throw ConfigError("DGP spec: treated_outcome_position must lie in [0, 1]");
        }
        if (!(treated_share > 0.0 && treated_share < 1.0)) throw ConfigError("DGP spec: treated_share must lie in (0, 1)");
        auto check_group = [](const std::vector<GroupPoint>& pts, const GroupGenerator& gen, const char* name) {
            if (pts.empty() && gen.points == 0) {
                throw ConfigError(std::string("DGP spec: group '") + name + "' has no support points or generator");
            }
            for (const auto& p : pts)
                if (!(p.mass > 0.0)) throw ConfigError(std::string("DGP spec: nonpositive mass in group '") + name + "'");
        };
        check_group(control, control_generator, "control");
        check_group(treated, treated_generator, "treated");
        if (coarsening.kind == Coarsening::Kind::bracket) {
            if (coarsening.bracket_widths.empty()) throw ConfigError("DGP spec: bracket_widths is empty");
            for (double w : coarsening.bracket_widths)
                if (!(w >= 0.0)) throw ConfigError("DGP spec: bracket widths must be nonnegative");
        }
        if (!(coarsening.heap_probability >= 0.0 && coarsening.heap_probability <= 1.0)) {
            throw ConfigError("DGP spec: heap_probability must lie in [0, 1]");
        }
        coarsening.policy.validate();
    }

    static double parse_target(const std::string& s)
    {
        if (s == "lower") return 0.0;
        if (s == "upper") return 1.0;
        const auto v = detail::parse_double(s);
        if (!v) throw ConfigError("DGP spec: target must be lower, upper or a number in [0, 1], got '" + s + "'");
        return *v;
    }

    /// Keys: assumption, target, treated_share, treated_outcome_position,
    /// seed, control.point / treated.point (repeatable: "mass, y1l, y1u,
    /// y2l, y2u"), control.generate / treated.generate ("points, level,
    /// trend, spread, noise"), coarsening (bracket | heaping),
    /// bracket_widths, heap_probability and the recoding policy keys.
    static DgpSpec from_config(const KeyValueConfig& cfg)
    {
        DgpSpec s;
        if (auto v = cfg.get("assumption")) s.assumption = parse_assumption(*v);
        if (auto v = cfg.get("target")) s.target = parse_target(*v);
        if (auto v = cfg.get_double("treated_outcome_position")) s.treated_outcome_position = *v;
        if (auto v = cfg.get_double("treated_share")) s.treated_share = *v;
        if (auto v = cfg.get_int("seed")) s.seed = static_cast<std::uint64_t>(*v);

        auto numbers = [&](const std::string& key, const std::string& raw, std::size_t min_n, std::size_t max_n) {
            std::vector<double> out;
            for (const auto& tok : detail::split_list(raw)) {
                const auto d = detail::parse_double(tok);
                if (!d) throw ConfigError(cfg.origin() + ": '" + key + "' has a non-numeric entry '" + tok + "'");
                out.push_back(*d);
            }
            if (out.size() < min_n || out.size() > max_n) {
                throw ConfigError(cfg.origin() + ": '" + key + "' expects " + std::to_string(min_n) + ".." +
                                  std::to_string(max_n) + " numbers");
            }
            return out;
        };
        auto points = [&](const std::string& key) {
            std::vector<GroupPoint> pts;
            for (const auto& raw : cfg.get_all(key)) {
                const auto v = numbers(key, raw, 5, 5);
                try {
                    pts.push_back({v[0], Interval(v[1], v[2]), Interval(v[3], v[4])});
                } catch (const InvalidInterval& e) {
                    throw ConfigError(cfg.origin() + ": '" + key + "': " + e.what());
                }
            }
            return pts;
        };
        auto generator = [&](const std::string& key) {
            GroupGenerator g;
            if (auto raw = cfg.get(key)) {
                const auto v = numbers(key, *raw, 1, 5);
                if (v[0] < 1.0 || std::floor(v[0]) != v[0]) throw ConfigError(cfg.origin() + ": '" + key + "' needs a positive point count");
                g.points = static_cast<std::size_t>(v[0]);
                if (v.size() > 1) g.level = v[1];
                if (v.size() > 2) g.trend = v[2];
                if (v.size() > 3) g.spread = v[3];
                if (v.size() > 4) g.noise = v[4];
            }
            return g;
        };
        s.control = points("control.point");
        s.treated = points("treated.point");
        s.control_generator = generator("control.generate");
        s.treated_generator = generator("treated.generate");

        if (auto v = cfg.get("coarsening")) {
            if (*v == "bracket") {
                s.coarsening.kind = Coarsening::Kind::bracket;
            } else if (*v == "heaping") {
                s.coarsening.kind = Coarsening::Kind::heaping;
            } else {
                throw ConfigError(cfg.origin() + ": unknown coarsening '" + *v + "' (expected bracket or heaping)");
            }
        }
        if (auto v = cfg.get("bracket_widths")) s.coarsening.bracket_widths = numbers("bracket_widths", *v, 1, 1024);
        if (auto v = cfg.get_double("heap_probability")) s.coarsening.heap_probability = *v;
        if (auto v = cfg.get_int("heap_threshold")) s.coarsening.policy.heap_threshold = static_cast<int>(*v);
        if (auto v = cfg.get_int("heap_modulus")) s.coarsening.policy.heap_modulus = static_cast<int>(*v);
        if (auto v = cfg.get_double("heap_halfwidth")) s.coarsening.policy.heap_halfwidth = *v;
        s.validate();
        return s;
    }
};

namespace detail {

inline Interval coarsen(double latent, std::size_t k, const Coarsening& c, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (c.kind == Coarsening::Kind::bracket) {
        const double w = c.bracket_widths[k % c.bracket_widths.size()];
        const double u = unif(rng);
        return Interval(latent - u * w, latent + (1.0 - u) * w);
    }
    double count = std::max(0.0, std::round(latent));
    if (unif(rng) < c.heap_probability) {
        const double m = c.policy.heap_modulus;
        const double heaped = m * std::round(count / m);
        if (heaped >= c.policy.heap_threshold) count = heaped;
    }
    return recode_count(count, c.policy);
}

inline std::vector<GroupPoint> generate_group(const GroupGenerator& g, const Coarsening& c, std::uint64_t seed,
                                              std::uint64_t group_tag)
{
    std::vector<GroupPoint> pts;
    pts.reserve(g.points);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 0; k < g.points; ++k) {
        auto rng = substream(seed, (group_tag << 32) | k, 7);
        const double y1 = g.level + g.spread * normal(rng);
        const double y2 = y1 + g.trend + g.noise * normal(rng);
        pts.push_back({1.0, coarsen(y1, k, c, rng), coarsen(y2, k, c, rng)});
    }
    return pts;
}

inline std::vector<GroupPoint> normalized(std::vector<GroupPoint> pts)
{
    std::vector<double> m;
    for (const auto& p : pts) m.push_back(p.mass);
    const double total = ordered_sum(std::move(m));
    for (auto& p : pts) p.mass /= total;
    return pts;
}

inline Interval weighted_aumann(const std::vector<GroupPoint>& pts, bool post)
{
    std::vector<double> lo;
    std::vector<double> hi;
    for (const auto& p : pts) {
        const Interval& y = post ? p.y2 : p.y1;
        lo.push_back(p.mass * y.lower());
        hi.push_back(p.mass * y.upper());
    }
    const double l = ordered_sum(std::move(lo));
    return Interval(l, std::max(l, ordered_sum(std::move(hi))));
}

} // namespace detail

// Explicit support points when given, otherwise generated ones; masses
// normalized within each group.
inline std::pair<std::vector<GroupPoint>, std::vector<GroupPoint>> resolve_support(const DgpSpec& spec)
{
    auto control = spec.control.empty() ? detail::generate_group(spec.control_generator, spec.coarsening, spec.seed, 0)
                                        : spec.control;
    auto treated = spec.treated.empty() ? detail::generate_group(spec.treated_generator, spec.coarsening, spec.seed, 1)
                                        : spec.treated;
    return {detail::normalized(std::move(control)), detail::normalized(std::move(treated))};
}

/// Builds a population consistent with the observed interval support whose
/// true counterfactual mean E[Y2(0) | D = 1] sits at `spec.target` within
/// the identified set of `spec.assumption`.
///
///  - SPT: control units take the opposite ends of their pre/post intervals
///    (pre at 1 - t, post at t), treated units their pre interval at t and
///    the control group's mean trend added on.
///  - IPT: treated potential intervals are the transport T of their own
///    pre-period interval, latent outcome T(pre at t).
///  - PS: each treated unit is paired with every control support point
///    (product support); its potential interval is S applied to that
///    control point's period-2 interval, latent outcome S(post at t).
///
/// Treated realized outcomes are placed independently of these choices.
inline FinitePopulation attainment_oracle(const DgpSpec& spec)
{
    spec.validate();
    const auto [control, treated] = resolve_support(spec);
    const double t = spec.target;
    const double s = spec.treated_outcome_position.value_or(1.0 - t);
    const double pi = spec.treated_share;

    const Interval a1 = detail::weighted_aumann(control, false);
    const Interval a2 = detail::weighted_aumann(control, true);
    const Interval b1 = detail::weighted_aumann(treated, false);

    std::vector<PopulationPoint> pts;
    for (const auto& c : control) {
        PopulationPoint p;
        p.mass = (1.0 - pi) * c.mass;
        p.treated = false;
        p.y1 = c.y1;
        p.y2 = c.y2;
        p.y2_untreated = c.y2;
        if (spec.assumption == Assumption::spt) {
            p.latent_y1 = c.y1.at(1.0 - t);
            p.latent_y2_0 = c.y2.at(t);
        } else {
            p.latent_y1 = c.y1.midpoint();
            p.latent_y2_0 = c.y2.midpoint();
        }
        p.latent_y2_1 = p.latent_y2_0;
        pts.push_back(p);
    }

    auto treated_point = [&](const GroupPoint& g, double mass) {
        PopulationPoint p;
        p.mass = mass;
        p.treated = true;
        p.y1 = g.y1;
        p.y2 = g.y2;
        p.latent_y1 = g.y1.at(t);
        p.latent_y2_1 = g.y2.at(s);
        return p;
    };

    try {
        switch (spec.assumption) {
        case Assumption::spt: {
            std::vector<double> trend;
            for (const auto& c : control) trend.push_back(c.mass * (c.y2.at(t) - c.y1.at(1.0 - t)));
            const double control_trend = detail::ordered_sum(std::move(trend));
            for (const auto& g : treated) {
                PopulationPoint p = treated_point(g, pi * g.mass);
                p.latent_y2_0 = p.latent_y1 + control_trend;
                p.y2_untreated = Interval::point(p.latent_y2_0);
                pts.push_back(p);
            }
            break;
        }
        case Assumption::ipt: {
            const auto map = LinearIntervalMap::between(a1, a2);
            for (const auto& g : treated) {
                PopulationPoint p = treated_point(g, pi * g.mass);
                p.y2_untreated = apply_map(map, g.y1);
                p.latent_y2_0 = map(p.latent_y1);
                pts.push_back(p);
            }
            break;
        }
        case Assumption::ps: {
            const auto map = parallel_shift_map(a1, b1, kDefaultWidthFloor);
            for (const auto& g : treated) {
                for (const auto& c : control) {
                    PopulationPoint p = treated_point(g, pi * g.mass * c.mass);
                    p.y2_untreated = apply_map(map, c.y2);
                    p.latent_y2_0 = map(c.y2.at(t));
                    pts.push_back(p);
                }
            }
            break;
        }
        case Assumption::cps: break;
        }
    } catch (const TransportUndefined& e) {
        throw InfeasibleSpec(std::string("infeasible DGP spec: ") + e.what());
    }
    return FinitePopulation(std::move(pts), 1e-9);
}

// ---------------------------------------------------------------------------
// Sampling

struct SampleOptions {
    enum class Mode { iid, enumerate };
    enum class EmptyArm { error, resample };
    Mode mode = Mode::iid;
    EmptyArm on_empty_arm = EmptyArm::resample;
    std::size_t max_attempts = 100;
};

/// Draws a panel of n units from the population. `iid` draws multinomially
/// over the support; `enumerate` replicates each point mass * n times and
/// requires those to be integers.
inline Panel sample_from(const FinitePopulation& pop, std::size_t n, std::uint64_t seed, const SampleOptions& opt = {})
{
    if (n == 0) throw PreconditionError("sample size must be positive");
    const auto& pts = pop.points();
    auto make_unit = [&](std::size_t idx, std::size_t serial) {
        const auto& p = pts[idx];
        PanelUnit u;
        std::ostringstream id;
        id << 's' << std::setw(6) << std::setfill('0') << serial;
        u.unit_id = id.str();
        u.treated = p.treated;
        u.y1 = p.y1;
        u.y2 = p.y2;
        return u;
    };

    Panel panel;
    panel.reserve(n);
    if (opt.mode == SampleOptions::Mode::enumerate) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double copies = pts[i].mass * static_cast<double>(n);
            const double rounded = std::round(copies);
            if (std::abs(copies - rounded) > 1e-9 * std::max(1.0, copies)) {
                throw PreconditionError("enumerate mode needs mass * n to be an integer for every support point");
            }
            for (std::size_t c = 0; c < static_cast<std::size_t>(rounded); ++c) panel.push_back(make_unit(i, panel.size()));
        }
        if (panel.size() != n) throw PreconditionError("enumerate mode: replicated support does not have n units");
        return panel;
    }

    std::vector<double> cumulative(pts.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        acc += pts[i].mass;
        cumulative[i] = acc;
    }
    for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
        auto rng = detail::substream(seed, 0, attempt);
        std::uniform_real_distribution<double> unif(0.0, acc);
        panel.clear();
        for (std::size_t k = 0; k < n; ++k) {
            const double u = unif(rng);
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            const auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
                it - cumulative.begin(), static_cast<std::ptrdiff_t>(pts.size()) - 1));
            panel.push_back(make_unit(idx, k));
        }
        const std::size_t n1 = group_size(panel, Group::treated);
        if (n1 > 0 && n1 < n) return panel;
        if (opt.on_empty_arm == SampleOptions::EmptyArm::error) {
            throw PreconditionError("sampled panel has an empty treatment arm");
        }
    }
    throw PreconditionError("could not draw a panel with both treatment arms");
}

// ---------------------------------------------------------------------------
// Coverage

struct CoverageReport {
    Assumption assumption = Assumption::ps;
    std::size_t n = 0;
    std::size_t reps = 0;
    double alpha = 0.05;
    double true_att = 0.0;
    Interval population_att;
    std::size_t covered = 0;
    double coverage = 0.0;
    double mean_ci_length = 0.0;
    double bias_lower = 0.0; // mean of estimated minus population endpoint
    double bias_upper = 0.0;
    double mean_cv = 0.0;

    std::string to_text() const
    {
        std::ostringstream os;
        os.precision(10);
        os << "assumption = " << to_string(assumption) << '\n'
           << "n = " << n << '\n'
           << "reps = " << reps << '\n'
           << "alpha = " << alpha << '\n'
           << "true_att = " << true_att << '\n'
           << "population_att_lower = " << population_att.lower() << '\n'
           << "population_att_upper = " << population_att.upper() << '\n'
           << "covered = " << covered << '\n'
           << "coverage = " << coverage << '\n'
           << "mean_ci_length = " << mean_ci_length << '\n'
           << "bias_lower = " << bias_lower << '\n'
           << "bias_upper = " << bias_upper << '\n'
           << "mean_cv = " << mean_cv << '\n';
        return os.str();
    }
};

struct CoverageOptions {
    std::size_t n = 500;
    std::size_t reps = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    VarianceOptions variance; // delta by default
};

/// Repeatedly samples from `pop`, builds the Imbens-Manski interval under
/// `assumption`, and counts how often it covers the population's true ATT.
inline CoverageReport coverage_experiment(const FinitePopulation& pop, Assumption assumption,
                                          const CoverageOptions& opt)
{
    if (opt.reps < 100) throw PreconditionError("coverage experiments need at least 100 replications");
    const BoundsResult truth = population_bounds(pop, assumption, opt.variance.estimator);

    struct Rep {
        bool covered = false;
        double length = 0.0, lower = 0.0, upper = 0.0, cv = 0.0;
    };
    std::vector<Rep> reps(opt.reps);
    const double true_att = pop.true_att();
    VarianceOptions vopt = opt.variance;
    vopt.threads = 1;
    detail::parallel_for(opt.reps, opt.threads, [&](std::size_t r) {
        const Panel panel = sample_from(pop, opt.n, detail::substream(opt.seed, r, 0)());
        VarianceOptions local = vopt;
        local.seed = detail::substream(opt.seed, r, 1)();
        const ConfidenceReport ci = confidence_interval(panel, assumption, opt.alpha, local);
        reps[r] = {ci.ci.contains(true_att), ci.ci.width(), ci.theta_lower, ci.theta_upper, ci.cv};
    });

    CoverageReport out;
    out.assumption = assumption;
    out.n = opt.n;
    out.reps = opt.reps;
    out.alpha = opt.alpha;
    out.true_att = true_att;
    out.population_att = truth.att;
    std::vector<double> len, lo, hi, cv;
    for (const auto& r : reps) {
        out.covered += r.covered ? 1 : 0;
        len.push_back(r.length);
        lo.push_back(r.lower - truth.att.lower());
        hi.push_back(r.upper - truth.att.upper());
        cv.push_back(r.cv);
    }
    out.coverage = static_cast<double>(out.covered) / static_cast<double>(opt.reps);
    out.mean_ci_length = detail::ordered_mean(std::move(len));
    out.bias_lower = detail::ordered_mean(std::move(lo));
    out.bias_upper = detail::ordered_mean(std::move(hi));
    out.mean_cv = detail::ordered_mean(std::move(cv));
    return out;
}

inline CoverageReport coverage_experiment(const DgpSpec& spec, const CoverageOptions& opt)
{
    return coverage_experiment(attainment_oracle(spec), spec.assumption, opt);
}

// ---------------------------------------------------------------------------
// Sharpness

struct SharpnessCase {
    Assumption assumption = Assumption::ps;
    double target = 0.0;
    Interval counterfactual_set;
    double targeted_point = 0.0;
    double true_counterfactual = 0.0;
    double true_att = 0.0;
    Interval att_set;
    bool assumption_holds = false;
    bool passed = false;
    std::string skipped; // why the construction does not exist on this support

    double error() const { return std::abs(true_counterfactual - targeted_point); }
};

inline constexpr double kSharpnessTargets[] = {0.0, 1.0, 0.25, 0.5, 0.75};

/// For every assumption and target, builds the attainment population on the
/// spec's support and checks that its true counterfactual mean is the
/// targeted point of the population identified set. Assumptions whose
/// transport is undefined on the support are reported as skipped.
inline std::vector<SharpnessCase> sharpness_suite(DgpSpec spec, double tol = 1e-10)
{
    std::vector<SharpnessCase> out;
    for (Assumption a : {Assumption::spt, Assumption::ipt, Assumption::ps}) {
        for (double t : kSharpnessTargets) {
            spec.assumption = a;
            spec.target = t;
            SharpnessCase c;
            c.assumption = a;
            c.target = t;
            std::optional<FinitePopulation> built;
            try {
                built = attainment_oracle(spec);
            } catch (const InfeasibleSpec& e) {
                c.skipped = e.what();
                out.push_back(c);
                continue;
            }
            const FinitePopulation& pop = *built;
            const BoundsResult b = population_bounds(pop, a);
            c.counterfactual_set = b.counterfactual;
            c.targeted_point = b.counterfactual.at(t);
            c.true_counterfactual = pop.true_counterfactual_mean();
            c.true_att = pop.true_att();
            c.att_set = b.att;
            c.assumption_holds = pop.satisfies(a, tol);
            c.passed = c.assumption_holds && c.error() <= tol && b.att.contains(c.true_att, tol);
            out.push_back(c);
        }
    }
    return out;
}

} // namespace ivdid

#endif // IVDID_SIMULATION_HPP
