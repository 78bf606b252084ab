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

#ifndef IVDID_SELFTEST_HPP
#define IVDID_SELFTEST_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "estimators.hpp"
#include "inference.hpp"
#include "interval.hpp"
#include "kv_config.hpp"
#include "normal.hpp"
#include "simulation.hpp"

namespace ivdid {

// Generated-support parallel-shifts design used for coverage checks.
inline constexpr const char* kReferenceCoverageDgp = R"(assumption = PS
target = lower
treated_share = 0.4
seed = 7
control.generate = 40, 20, 1.0, 4, 2
treated.generate = 40, 17, -0.5, 5, 2
coarsening = bracket
bracket_widths = 0, 2, 4, 8
)";

// Two support points per group whose Aumann means are A1 = [1, 3],
// A2 = [0, 0.5], B1 = [-3, -1] and a treated period-2 mean of [0, 0].
inline constexpr const char* kReferenceSharpnessDgp = R"(assumption = PS
target = lower
treated_share = 0.5
control.point = 1, 0, 2, 0, 0
control.point = 1, 2, 4, 0, 1
treated.point = 1, -4, -2, 0, 0
treated.point = 1, -2, 0, -1, 1
)";

struct SelftestOptions {
    std::uint64_t seed = 20240601;
    std::size_t random_vectors = 1000;
    std::size_t coverage_reps = 1000;
    std::size_t coverage_n = 500;
    unsigned threads = 0;
};

struct SelftestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelftestReport {
    std::vector<SelftestCheck> checks;

    bool passed() const
    {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }

    std::string to_text() const
    {
        std::ostringstream os;
        std::size_t ok = 0;
        for (const auto& c : checks) {
            os << (c.passed ? "PASS " : "FAIL ") << c.name;
            if (!c.detail.empty()) os << ": " << c.detail;
            os << '\n';
            ok += c.passed ? 1 : 0;
        }
        os << "summary = " << ok << '/' << checks.size() << " passed\n";
        return os.str();
    }
};

namespace detail {

inline GroupMomentVector example_moments(Interval a1, Interval a2, Interval b1, Interval b2 = Interval(0.0, 0.0))
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

inline std::string fmt(double v, int precision = 10)
{
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

inline std::string fmt(const Interval& iv, int precision = 10)
{
    return "[" + fmt(iv.lower(), precision) + ", " + fmt(iv.upper(), precision) + "]";
}

inline Interval random_interval(std::mt19937_64& rng, double min_width)
{
    std::uniform_real_distribution<double> centre(-50.0, 50.0);
    std::uniform_real_distribution<double> width(min_width, 20.0);
    const double c = centre(rng);
    const double w = width(rng);
    return Interval(c - 0.5 * w, c + 0.5 * w);
}

} // namespace detail

/// Runs the built-in oracle and golden suites. The report depends only on
/// the options, so two runs with the same seed are byte-identical.
inline SelftestReport run_selftest(const SelftestOptions& opt = {})
{
    using detail::example_moments;
    using detail::fmt;
    SelftestReport rep;
    auto add = [&](std::string name, bool ok, std::string detail = {}) {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };
    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            add(name, false, std::string("exception: ") + e.what());
        }
    };

    struct Golden {
        const char* name;
        GroupMomentVector m;
        Interval ipt, ps;
    };
    const Golden goldens[] = {
        {"example1", example_moments({1, 3}, {0, 0.5}, {-3, -1}), {-1, -0.5}, {-4, -3.5}},
        {"example2", example_moments({1, 3}, {2.75, 3.25}, {-3, -1}), {1.75, 2.25}, {-1.25, -0.75}},
        {"example3", example_moments({-1, 3}, {1.5, 4}, {-3, -2}), {0.25, 0.875}, {-2.375, -1.75}},
    };
    for (const auto& g : goldens) {
        guarded(std::string("golden.") + g.name, [&] {
            const auto ipt = bounds_ipt(g.m).counterfactual;
            const auto ps = bounds_ps(g.m).counterfactual;
            add(std::string("golden.") + g.name, approx_equal(ipt, g.ipt, 1e-9) && approx_equal(ps, g.ps, 1e-9),
                "IPT " + fmt(ipt) + " PS " + fmt(ps));
        });
    }
    guarded("golden.example1.spt", [&] {
        const auto b = bounds_spt(goldens[0].m);
        add("golden.example1.spt", approx_equal(b.counterfactual, {-6, -1.5}, 1e-9) && approx_equal(b.att, {1.5, 6}, 1e-9),
            "M " + fmt(b.counterfactual) + " ATT " + fmt(b.att));
    });
    guarded("golden.example1.ps_att", [&] {
        const auto b = bounds_ps(goldens[0].m);
        add("golden.example1.ps_att", approx_equal(b.att, {3.5, 4}, 1e-9), "ATT " + fmt(b.att));
    });

    guarded("sharpness", [&] {
        const DgpSpec spec = DgpSpec::from_config(KeyValueConfig::parse_string(kReferenceSharpnessDgp, "sharpness"));
        const auto cases = sharpness_suite(spec, 1e-10);
        double worst = 0.0;
        bool all = true;
        for (const auto& c : cases) {
            worst = std::max(worst, c.error());
            all = all && c.passed;
        }
        add("sharpness.closure", all, std::to_string(cases.size()) + " cases, max error " + fmt(worst, 3));
    });

    guarded("width_identities", [&] {
        std::mt19937_64 rng(opt.seed);
        double worst_spt = 0.0;
        double worst_equal = 0.0;
        for (std::size_t k = 0; k < opt.random_vectors; ++k) {
            const auto m = example_moments(detail::random_interval(rng, 0.01), detail::random_interval(rng, 0.0),
                                           detail::random_interval(rng, 0.0), detail::random_interval(rng, 0.0));
            const double a1 = m.control_pre.width(), a2 = m.control_post.width(), b1 = m.treated_pre.width();
            worst_spt = std::max(worst_spt, std::abs(bounds_spt(m).counterfactual.width() - (b1 + a1 + a2)));
            const double target = a2 * b1 / a1;
            worst_equal = std::max({worst_equal, std::abs(bounds_ipt(m).counterfactual.width() - target),
                                    std::abs(bounds_ps(m).counterfactual.width() - target)});
        }
        add("width.spt", worst_spt <= 1e-9, "max deviation " + fmt(worst_spt, 3));
        add("width.ipt_ps", worst_equal <= 1e-9, "max deviation " + fmt(worst_equal, 3));
    });

    guarded("lemma", [&] {
        std::mt19937_64 rng(opt.seed + 1);
        std::size_t ps_fail = 0;
        for (std::size_t k = 0; k < opt.random_vectors; ++k) {
            const Interval a1 = detail::random_interval(rng, 0.01);
            const Interval a2 = detail::random_interval(rng, 0.0);
            const Interval b1 = detail::random_interval(rng, 0.01);
            const auto image = apply_map(LinearIntervalMap::between(a1, b1), a2);
            if (!check_lemma_conditions(a1, a2, b1, image).all()) ++ps_fail;
        }
        add("lemma.ps_images", ps_fail == 0, std::to_string(ps_fail) + " failures");
        std::size_t ipt_pass = 0;
        for (const auto& g : goldens) {
            const auto image = bounds_ipt(g.m).counterfactual;
            if (check_lemma_conditions(g.m.control_pre, g.m.control_post, g.m.treated_pre, image).parallel_shift) {
                ++ipt_pass;
            }
        }
        add("lemma.ipt_examples_fail_iii", ipt_pass == 0, std::to_string(ipt_pass) + " unexpected passes");
    });

    guarded("scalar_reduction", [&] {
        const auto m = example_moments(Interval::point(20.44), Interval::point(21.03), Interval::point(23.33),
                                       Interval::point(21.17));
        const double did = classical_did(23.33, 21.17, 20.44, 21.03);
        const auto spt = bounds_spt(m).att;
        const auto ps = bounds_ps(m).att;
        const bool ok = spt.lower() == did && spt.upper() == did && ps.lower() == did && ps.upper() == did;
        add("scalar_reduction", ok, "DID " + fmt(did, 17));
    });

    guarded("im_critical_value", [&] {
        const double c0 = im_critical_value(0.0, 1.0, 100, 0.05);
        const double cinf = im_critical_value(1.0, 1.0, 100, 0.05);
        const double c1 = im_critical_value(0.1, 1.0, 100, 0.05);
        const double residual = normal_cdf(c1 + 1.0) - normal_cdf(-c1) - 0.95;
        add("im.point_limit", std::abs(c0 - 1.959964) < 1e-5, fmt(c0, 8));
        add("im.one_sided_limit", std::abs(cinf - 1.644854) < 1e-5, fmt(cinf, 8));
        add("im.root", std::abs(residual) < 1e-10, "C " + fmt(c1, 10));
    });

    guarded("coverage", [&] {
        const DgpSpec spec = DgpSpec::from_config(KeyValueConfig::parse_string(kReferenceCoverageDgp, "coverage"));
        CoverageOptions copt;
        copt.n = opt.coverage_n;
        copt.reps = opt.coverage_reps;
        copt.alpha = 0.05;
        copt.seed = opt.seed;
        copt.threads = opt.threads;
        const auto r = coverage_experiment(spec, copt);
        add("coverage.ps", r.coverage >= 0.93 && r.coverage <= 0.98,
            "coverage " + fmt(r.coverage, 4) + " over " + std::to_string(r.reps) + " reps");
    });

    return rep;
}

} // namespace ivdid

#endif // IVDID_SELFTEST_HPP
