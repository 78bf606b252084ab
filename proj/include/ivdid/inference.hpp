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

#ifndef IVDID_INFERENCE_HPP
#define IVDID_INFERENCE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "estimators.hpp"
#include "interval.hpp"
#include "normal.hpp"
#include "panel.hpp"
#include "parallel.hpp"

namespace ivdid {

enum class VarianceMethod { delta, bootstrap };

inline const char* to_string(VarianceMethod m) { return m == VarianceMethod::delta ? "delta" : "bootstrap"; }

inline VarianceMethod parse_variance_method(std::string_view s)
{
    if (s == "delta") return VarianceMethod::delta;
    if (s == "bootstrap") return VarianceMethod::bootstrap;
    throw ConfigError("unknown variance method '" + std::string(s) + "' (expected delta or bootstrap)");
}

struct VarianceOptions {
    VarianceMethod method = VarianceMethod::delta;
    std::size_t boot_reps = 2000;
    std::uint64_t seed = 20240601;
    unsigned threads = 0; // 0: hardware concurrency
    // Redraws allowed per replication when a resample cannot be estimated
    // (e.g. a covariate cell loses all its treated units).
    std::size_t max_attempts = 50;
    EstimatorOptions estimator;
};

/// Standard errors of the two ATT endpoint estimators, on the sqrt(n)
/// scale: the standard error of an endpoint is se / sqrt(n).
struct EndpointVariance {
    double se_lower = 0.0;
    double se_upper = 0.0;
    double correlation = 0.0;
    std::size_t n = 0;
    VarianceMethod method = VarianceMethod::delta;
    std::size_t failed_draws = 0; // bootstrap only
};

/// Gradient of an endpoint with respect to one group's four endpoint means,
/// ordered (pre lower, pre upper, post lower, post upper).
using MomentGradient = std::array<double, 4>;

struct EndpointGradients {
    MomentGradient lower_control{};
    MomentGradient lower_treated{};
    MomentGradient upper_control{};
    MomentGradient upper_treated{};
};

/// Analytic gradients of the ATT endpoints as functions of the group moment
/// vector, for the moment-based assumptions (SPT, IPT, PS).
inline EndpointGradients att_gradients(Assumption a, const GroupMomentVector& m, const EstimatorOptions& opt = {})
{
    EndpointGradients g;
    const double a1l = m.control_pre.lower();
    const double w1 = m.control_pre.width();
    switch (a) {
    case Assumption::spt:
        // lower = c2l - (b1u + (a2u - a1l)); upper = c2u - (b1l + (a2l - a1u))
        g.lower_control = {1.0, 0.0, 0.0, -1.0};
        g.lower_treated = {0.0, -1.0, 1.0, 0.0};
        g.upper_control = {0.0, 1.0, -1.0, 0.0};
        g.upper_treated = {-1.0, 0.0, 0.0, 1.0};
        return g;
    case Assumption::ipt: {
        const double tau = bounds_ipt(m, opt).transport->slope();
        // endpoint = c2 - (tau * (x - a1l) + a2l), x the opposite treated pre endpoint
        auto control = [&](double x) -> MomentGradient {
            const double k = x - a1l;
            return {tau - k * tau / w1, k * tau / w1, k / w1 - 1.0, -k / w1};
        };
        g.lower_control = control(m.treated_pre.upper());
        g.lower_treated = {0.0, -tau, 1.0, 0.0};
        g.upper_control = control(m.treated_pre.lower());
        g.upper_treated = {-tau, 0.0, 0.0, 1.0};
        return g;
    }
    case Assumption::ps: {
        bool unit_slope = false;
        const double gamma =
            parallel_shift_map(m.control_pre, m.treated_pre, opt.width_floor, &unit_slope).slope();
        // endpoint = c2 - (gamma * (x - a1l) + b1l), x the opposite control post endpoint
        auto pre_terms = [&](double x, MomentGradient& control, MomentGradient& treated) {
            if (unit_slope) {
                control[0] = 1.0;
                treated[0] = -1.0;
                return;
            }
            const double h = x - a1l;
            control[0] = gamma - h * gamma / w1;
            control[1] = h * gamma / w1;
            treated[0] = h / w1 - 1.0;
            treated[1] = -h / w1;
        };
        pre_terms(m.control_post.upper(), g.lower_control, g.lower_treated);
        g.lower_control[3] = -gamma;
        g.lower_treated[2] = 1.0;
        pre_terms(m.control_post.lower(), g.upper_control, g.upper_treated);
        g.upper_control[2] = -gamma;
        g.upper_treated[3] = 1.0;
        return g;
    }
    case Assumption::cps: break;
    }
    throw PreconditionError("CPS gradients are cell-level; use endpoint_variance on the panel");
}

namespace detail {

inline std::array<double, 4> endpoint_vector(const PanelUnit& u)
{
    return {u.y1.lower(), u.y1.upper(), u.y2.lower(), u.y2.upper()};
}

inline double dot4(const MomentGradient& g, const std::array<double, 4>& z, const std::array<double, 4>& mu)
{
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += g[k] * (z[k] - mu[k]);
    return s;
}

inline std::array<double, 4> moment_array(const Interval& pre, const Interval& post)
{
    return {pre.lower(), pre.upper(), post.lower(), post.upper()};
}

// Accumulates per-unit influence values of both endpoints, group by group,
// and turns them into a variance of the endpoint estimators.
class InfluenceAccumulator {
public:
    void add(bool treated, double psi_lower, double psi_upper)
    {
        auto& g = groups_[treated ? 1 : 0];
        g.ll.push_back(psi_lower * psi_lower);
        g.uu.push_back(psi_upper * psi_upper);
        g.lu.push_back(psi_lower * psi_upper);
    }

    EndpointVariance finish(std::size_t n_total) const
    {
        double var_l = 0.0;
        double var_u = 0.0;
        double cov = 0.0;
        for (const auto& g : groups_) {
            const double nd = static_cast<double>(g.ll.size());
            if (g.ll.size() < 2) throw PreconditionError("endpoint variance undefined: a group has fewer than 2 units");
            // sample covariance of the influence values, divided by the group size
            var_l += ordered_sum(g.ll) / (nd - 1.0) / nd;
            var_u += ordered_sum(g.uu) / (nd - 1.0) / nd;
            cov += ordered_sum(g.lu) / (nd - 1.0) / nd;
        }
        EndpointVariance v;
        v.n = n_total;
        v.method = VarianceMethod::delta;
        const double n = static_cast<double>(n_total);
        v.se_lower = std::sqrt(n * var_l);
        v.se_upper = std::sqrt(n * var_u);
        v.correlation = (var_l > 0.0 && var_u > 0.0) ? cov / std::sqrt(var_l * var_u) : 0.0;
        return v;
    }

private:
    struct Terms {
        std::vector<double> ll, uu, lu;
    };
    std::array<Terms, 2> groups_;
};

inline EndpointVariance delta_variance_moments(Assumption a, std::span<const PanelUnit> panel,
                                               const EstimatorOptions& opt)
{
    const GroupMomentVector m = compute_moments(panel);
    const EndpointGradients g = att_gradients(a, m, opt);
    const auto mu_control = moment_array(m.control_pre, m.control_post);
    const auto mu_treated = moment_array(m.treated_pre, m.treated_post);
    InfluenceAccumulator acc;
    for (const auto& u : panel) {
        const auto z = endpoint_vector(u);
        if (u.treated) {
            acc.add(true, dot4(g.lower_treated, z, mu_treated), dot4(g.upper_treated, z, mu_treated));
        } else {
            acc.add(false, dot4(g.lower_control, z, mu_control), dot4(g.upper_control, z, mu_control));
        }
    }
    return acc.finish(panel.size());
}

// CPS endpoints are treated-share-weighted averages of cell-level parallel
// shift endpoints. The cell shares are estimated, so each treated unit also
// carries the deviation of its cell's endpoint from the aggregate.
inline EndpointVariance delta_variance_cps(std::span<const PanelUnit> panel, const EstimatorOptions& opt)
{
    const BoundsResult agg = bounds_cps(panel, opt);
    const double n0 = static_cast<double>(agg.moments.n_control);

    struct CellTerms {
        EndpointGradients grad;
        Interval att;
        std::array<double, 4> mu_control, mu_treated;
        double control_scale = 0.0; // p_x / q_x
    };
    std::map<std::string, CellTerms> cells;
    std::vector<double> lo_terms;
    std::vector<double> hi_terms;
    for (const auto& c : agg.cells) {
        CellTerms t;
        t.grad = att_gradients(Assumption::ps, c.moments, opt);
        t.att = minkowski_diff(c.moments.treated_post, c.counterfactual);
        t.mu_control = moment_array(c.moments.control_pre, c.moments.control_post);
        t.mu_treated = moment_array(c.moments.treated_pre, c.moments.treated_post);
        t.control_scale = c.weight / (static_cast<double>(c.moments.n_control) / n0);
        lo_terms.push_back(c.weight * t.att.lower());
        hi_terms.push_back(c.weight * t.att.upper());
        cells.emplace(c.label, t);
    }
    double theta_l = 0.0;
    double theta_u = 0.0;
    for (std::size_t k = 0; k < lo_terms.size(); ++k) {
        theta_l += lo_terms[k];
        theta_u += hi_terms[k];
    }

    InfluenceAccumulator acc;
    for (const auto& u : panel) {
        const CellTerms& t = cells.at(*u.covariate_cell);
        const auto z = endpoint_vector(u);
        if (u.treated) {
            acc.add(true, (t.att.lower() - theta_l) + dot4(t.grad.lower_treated, z, t.mu_treated),
                    (t.att.upper() - theta_u) + dot4(t.grad.upper_treated, z, t.mu_treated));
        } else {
            acc.add(false, t.control_scale * dot4(t.grad.lower_control, z, t.mu_control),
                    t.control_scale * dot4(t.grad.upper_control, z, t.mu_control));
        }
    }
    return acc.finish(panel.size());
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(attempt)};
    return std::mt19937_64(seq);
}

inline double sample_sd(const std::vector<double>& x, double mean)
{
    std::vector<double> sq;
    sq.reserve(x.size());
    for (double v : x) sq.push_back((v - mean) * (v - mean));
    return std::sqrt(ordered_sum(std::move(sq)) / static_cast<double>(x.size() - 1));
}

inline EndpointVariance bootstrap_variance(Assumption a, std::span<const PanelUnit> panel,
                                           const VarianceOptions& opt)
{
    if (opt.boot_reps < 2) throw PreconditionError("bootstrap needs at least 2 replications");
    // canonical order makes the draws independent of row order and ids
    const Panel sorted = canonical_order(Panel(panel.begin(), panel.end()));
    std::array<std::vector<const PanelUnit*>, 2> arms;
    for (const auto& u : sorted) arms[u.treated ? 1 : 0].push_back(&u);
    if (arms[0].size() < 2 || arms[1].size() < 2) {
        throw PreconditionError("endpoint variance undefined: a group has fewer than 2 units");
    }

    std::vector<double> lo(opt.boot_reps);
    std::vector<double> hi(opt.boot_reps);
    std::vector<std::size_t> failures(opt.boot_reps, 0);
    parallel_for(opt.boot_reps, opt.threads, [&](std::size_t rep) {
        Panel draw;
        draw.reserve(sorted.size());
        for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
            auto rng = substream(opt.seed, rep, attempt);
            draw.clear();
            for (const auto& arm : arms) {
                std::uniform_int_distribution<std::size_t> pick(0, arm.size() - 1);
                for (std::size_t i = 0; i < arm.size(); ++i) draw.push_back(*arm[pick(rng)]);
            }
            try {
                const BoundsResult b = estimate_bounds(a, draw, opt.estimator);
                lo[rep] = b.att.lower();
                hi[rep] = b.att.upper();
                return;
            } catch (const PreconditionError&) {
            } catch (const TransportUndefined&) {
            }
            ++failures[rep];
        }
        throw PreconditionError("bootstrap replication " + std::to_string(rep) + " failed " +
                                std::to_string(opt.max_attempts) + " times");
    });

    const double mean_l = ordered_mean(lo);
    const double mean_u = ordered_mean(hi);
    std::vector<double> cross;
    cross.reserve(lo.size());
    for (std::size_t r = 0; r < lo.size(); ++r) cross.push_back((lo[r] - mean_l) * (hi[r] - mean_u));

    EndpointVariance v;
    v.method = VarianceMethod::bootstrap;
    v.n = panel.size();
    const double root_n = std::sqrt(static_cast<double>(v.n));
    const double sd_l = sample_sd(lo, mean_l);
    const double sd_u = sample_sd(hi, mean_u);
    v.se_lower = root_n * sd_l;
    v.se_upper = root_n * sd_u;
    const double cov = ordered_sum(std::move(cross)) / static_cast<double>(lo.size() - 1);
    v.correlation = (sd_l > 0.0 && sd_u > 0.0) ? cov / (sd_l * sd_u) : 0.0;
    for (auto f : failures) v.failed_draws += f;
    return v;
}

} // namespace detail

/// Standard errors of the estimated ATT endpoints.
///
/// The delta method differentiates each endpoint, a smooth function of the
/// group endpoint means, and combines the gradient with the within-group
/// covariance of the per-unit endpoint vectors (groups independent). The
/// bootstrap resamples whole units within each treatment group.
inline EndpointVariance endpoint_variance(std::span<const PanelUnit> panel, Assumption a,
                                          const VarianceOptions& opt = {})
{
    if (opt.method == VarianceMethod::bootstrap) return detail::bootstrap_variance(a, panel, opt);
    if (a == Assumption::cps) return detail::delta_variance_cps(panel, opt.estimator);
    return detail::delta_variance_moments(a, panel, opt.estimator);
}

/// Critical value of the Imbens-Manski interval for a partially identified
/// parameter: the C solving Phi(C + sqrt(n) * delta / se_max) - Phi(-C) = 1 - alpha.
///
/// The root always lies between the one-sided and two-sided normal
/// quantiles; it is found by bisection. With se_max <= 0 the two-sided
/// quantile is returned and the interval collapses to the estimated set.
inline double im_critical_value(double delta_hat, double se_max, std::size_t n, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("alpha must lie in (0, 1)");
    if (!(delta_hat >= 0.0)) throw PreconditionError("IM critical value needs a nonnegative set length");
    const double hi_q = normal_quantile(1.0 - alpha / 2.0);
    if (!(se_max > 0.0)) return hi_q;
    const double lo_q = normal_quantile(1.0 - alpha);
    const double shift = std::sqrt(static_cast<double>(n)) * delta_hat / se_max;
    auto excess = [&](double c) { return normal_cdf(c + shift) - normal_cdf(-c) - (1.0 - alpha); };

    double lo = lo_q;
    double hi = hi_q;
    if (excess(lo) >= 0.0) return lo;
    if (excess(hi) <= 0.0) return hi;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct ConfidenceReport {
    Assumption assumption = Assumption::spt;
    BoundsResult bounds;
    double theta_lower = 0.0;
    double theta_upper = 0.0;
    double se_lower = 0.0;
    double se_upper = 0.0;
    double correlation = 0.0;
    double cv = 0.0;
    double alpha = 0.05;
    Interval ci;
    std::size_t n = 0;
    VarianceMethod method = VarianceMethod::delta;
};

inline ConfidenceReport confidence_interval(const BoundsResult& bounds, const EndpointVariance& var, double alpha)
{
    ConfidenceReport r;
    r.assumption = bounds.assumption;
    r.bounds = bounds;
    r.theta_lower = bounds.att.lower();
    r.theta_upper = bounds.att.upper();
    r.se_lower = var.se_lower;
    r.se_upper = var.se_upper;
    r.correlation = var.correlation;
    r.alpha = alpha;
    r.n = var.n;
    r.method = var.method;
    r.cv = im_critical_value(r.theta_upper - r.theta_lower, std::max(var.se_lower, var.se_upper), var.n, alpha);
    const double root_n = std::sqrt(static_cast<double>(var.n));
    r.ci = Interval(r.theta_lower - r.cv * r.se_lower / root_n, r.theta_upper + r.cv * r.se_upper / root_n);
    return r;
}

/// Imbens-Manski confidence interval for the ATT under one assumption.
inline ConfidenceReport confidence_interval(std::span<const PanelUnit> panel, Assumption a, double alpha,
                                            const VarianceOptions& opt = {})
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("alpha must lie in (0, 1)");
    const BoundsResult bounds = estimate_bounds(a, panel, opt.estimator);
    return confidence_interval(bounds, endpoint_variance(panel, a, opt), alpha);
}

} // namespace ivdid

#endif // IVDID_INFERENCE_HPP
