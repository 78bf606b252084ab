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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "support.hpp"

using namespace ivdid;

#ifndef IVDID_DATA_DIR
#error "IVDID_DATA_DIR must point at the data directory"
#endif

namespace {

const std::string kDataDir = IVDID_DATA_DIR;

DgpSpec spec_from(const std::string& text) { return DgpSpec::from_config(KeyValueConfig::parse_string(text)); }

DgpSpec example1_spec(Assumption a, double target)
{
    DgpSpec s = spec_from(kReferenceSharpnessDgp);
    s.assumption = a;
    s.target = target;
    return s;
}

std::string config_error(const std::string& text)
{
    try {
        spec_from(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "no error";
}

// Random support: `k` points per group with positive pre-period widths.
DgpSpec random_spec(std::mt19937_64& rng, int k)
{
    DgpSpec s;
    std::uniform_real_distribution<double> mass(0.5, 2.0);
    std::uniform_real_distribution<double> share(0.2, 0.8);
    s.treated_share = share(rng);
    for (int i = 0; i < k; ++i) {
        s.control.push_back({mass(rng), fixtures::random_interval(rng, 0.1, 10), fixtures::random_interval(rng, 0, 10)});
        s.treated.push_back({mass(rng), fixtures::random_interval(rng, 0.1, 10), fixtures::random_interval(rng, 0, 10)});
    }
    return s;
}

// Populations satisfying an assumption, with latent outcomes drawn at random
// positions inside their intervals (not at a common target).
FinitePopulation random_population_satisfying(Assumption a, const DgpSpec& spec, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    const auto [control, treated] = resolve_support(spec);
    const double pi = spec.treated_share;
    std::vector<PopulationPoint> pts;
    std::vector<double> trend;
    Interval a1, a2, b1;
    {
        double l1 = 0, u1 = 0, l2 = 0, u2 = 0, bl = 0, bu = 0;
        for (const auto& c : control) {
            l1 += c.mass * c.y1.lower();
            u1 += c.mass * c.y1.upper();
            l2 += c.mass * c.y2.lower();
            u2 += c.mass * c.y2.upper();
        }
        for (const auto& t : treated) {
            bl += t.mass * t.y1.lower();
            bu += t.mass * t.y1.upper();
        }
        a1 = Interval(l1, u1);
        a2 = Interval(l2, u2);
        b1 = Interval(bl, bu);
    }
    double control_trend = 0.0;
    for (const auto& c : control) {
        PopulationPoint p;
        p.mass = (1 - pi) * c.mass;
        p.y1 = c.y1;
        p.y2 = c.y2;
        p.y2_untreated = c.y2;
        p.latent_y1 = c.y1.at(pos(rng));
        p.latent_y2_0 = c.y2.at(pos(rng));
        p.latent_y2_1 = p.latent_y2_0;
        control_trend += c.mass * (p.latent_y2_0 - p.latent_y1);
        pts.push_back(p);
    }
    const auto t_map = LinearIntervalMap::between(a1, a2);
    const auto s_map = LinearIntervalMap::between(a1, b1);
    for (const auto& t : treated) {
        auto base = [&](double mass) {
            PopulationPoint p;
            p.mass = mass;
            p.treated = true;
            p.y1 = t.y1;
            p.y2 = t.y2;
            p.latent_y1 = t.y1.at(pos(rng));
            p.latent_y2_1 = t.y2.at(pos(rng));
            return p;
        };
        if (a == Assumption::spt) {
            auto p = base(pi * t.mass);
            p.latent_y2_0 = p.latent_y1 + control_trend;
            p.y2_untreated = Interval::point(p.latent_y2_0);
            pts.push_back(p);
        } else if (a == Assumption::ipt) {
            auto p = base(pi * t.mass);
            p.y2_untreated = apply_map(t_map, t.y1);
            p.latent_y2_0 = p.y2_untreated.at(pos(rng));
            pts.push_back(p);
        } else {
            for (const auto& c : control) {
                auto p = base(pi * t.mass * c.mass);
                p.y2_untreated = apply_map(s_map, c.y2);
                p.latent_y2_0 = p.y2_untreated.at(pos(rng));
                pts.push_back(p);
            }
        }
    }
    return FinitePopulation(std::move(pts), 1e-9);
}

} // namespace

TEST(FinitePopulation, Validates)
{
    PopulationPoint c{0.5, false, {0, 1}, {0, 1}, {0, 1}, 0, 0, 0};
    PopulationPoint t{0.5, true, {0, 1}, {0, 1}, {0, 1}, 0, 0, 0};
    EXPECT_NO_THROW(FinitePopulation({c, t}));
    t.mass = 0.4;
    EXPECT_THROW(FinitePopulation({c, t}), PreconditionError);
    c.mass = 1.0;
    t.mass = 0.0;
    EXPECT_THROW(FinitePopulation({c, t}), PreconditionError);
}

TEST(Attainment, ScalarTrendsLowerEndOfFirstExample)
{
    const auto pop = attainment_oracle(example1_spec(Assumption::spt, 0.0));
    EXPECT_NEAR(pop.true_counterfactual_mean(), -6.0, 1e-12);
    EXPECT_NEAR(population_bounds(pop, Assumption::spt).counterfactual.lower(), -6.0, 1e-12);
    EXPECT_TRUE(pop.satisfies(Assumption::spt));
}

TEST(Attainment, ParallelShiftsLowerEndOfFirstExample)
{
    const auto pop = attainment_oracle(example1_spec(Assumption::ps, 0.0));
    EXPECT_NEAR(pop.true_counterfactual_mean(), -4.0, 1e-12);
    EXPECT_TRUE(pop.satisfies(Assumption::ps));
}

TEST(Attainment, IntervalTrendsUpperEndOfFirstExample)
{
    const auto pop = attainment_oracle(example1_spec(Assumption::ipt, 1.0));
    EXPECT_NEAR(pop.true_counterfactual_mean(), -0.5, 1e-12);
    EXPECT_TRUE(pop.satisfies(Assumption::ipt));
}

TEST(Attainment, InteriorMixtureHitsMidpoint)
{
    for (Assumption a : {Assumption::spt, Assumption::ipt, Assumption::ps}) {
        const auto pop = attainment_oracle(example1_spec(a, 0.5));
        EXPECT_NEAR(pop.true_counterfactual_mean(), population_bounds(pop, a).counterfactual.midpoint(), 1e-12);
    }
}

TEST(Attainment, TrueAttSitsAtOppositeEnd)
{
    const auto pop = attainment_oracle(example1_spec(Assumption::ps, 0.0));
    EXPECT_NEAR(pop.true_att(), population_bounds(pop, Assumption::ps).att.upper(), 1e-12);
}

TEST(Attainment, InfeasibleSpecIsRejected)
{
    DgpSpec s = example1_spec(Assumption::ipt, 0.0);
    for (auto& p : s.control) p.y1 = Interval::point(1.0);
    EXPECT_THROW(attainment_oracle(s), InfeasibleSpec);
    s.assumption = Assumption::cps;
    EXPECT_THROW(attainment_oracle(s), ConfigError);
}

TEST(Sharpness, ReferenceSupportClosesAtEveryTarget)
{
    const auto cases = sharpness_suite(spec_from(kReferenceSharpnessDgp));
    ASSERT_EQ(cases.size(), 15u);
    for (const auto& c : cases) {
        EXPECT_TRUE(c.skipped.empty());
        EXPECT_TRUE(c.passed) << to_string(c.assumption) << " t=" << c.target << " error " << c.error();
        EXPECT_LE(c.error(), 1e-10);
    }
}

TEST(Sharpness, RandomSupportsCloseAtEveryTarget)
{
    std::mt19937_64 rng(21);
    for (int k = 0; k < 40; ++k) {
        const auto spec = random_spec(rng, 1 + k % 5);
        for (const auto& c : sharpness_suite(spec)) {
            ASSERT_TRUE(c.passed) << to_string(c.assumption) << " t=" << c.target << " error " << c.error();
        }
    }
}

TEST(Sharpness, DegenerateSupportSkipsUndefinedTransport)
{
    const auto cases = sharpness_suite(DgpSpec::from_config(KeyValueConfig::load(kDataDir + "/degenerate_coverage.dgp")));
    int skipped = 0;
    for (const auto& c : cases) {
        if (!c.skipped.empty()) {
            ++skipped;
            EXPECT_EQ(c.assumption, Assumption::ipt);
        } else {
            EXPECT_TRUE(c.passed);
        }
    }
    EXPECT_EQ(skipped, 5);
}

TEST(Validity, TrueAttInsideSetForRandomPopulations)
{
    std::mt19937_64 rng(22);
    for (int k = 0; k < 300; ++k) {
        const auto spec = random_spec(rng, 1 + k % 4);
        for (Assumption a : {Assumption::spt, Assumption::ipt, Assumption::ps}) {
            const auto pop = random_population_satisfying(a, spec, rng);
            ASSERT_TRUE(pop.satisfies(a, 1e-9)) << to_string(a);
            const auto b = population_bounds(pop, a);
            EXPECT_TRUE(b.att.contains(pop.true_att(), 1e-9)) << to_string(a) << ' ' << b.att << ' ' << pop.true_att();
            EXPECT_TRUE(b.counterfactual.contains(pop.true_counterfactual_mean(), 1e-9));
        }
    }
}

TEST(PopulationBounds, WidthIdentitiesHoldExactly)
{
    std::mt19937_64 rng(23);
    for (int k = 0; k < 100; ++k) {
        const auto pop = attainment_oracle(random_spec(rng, 3));
        const auto m = pop.moments();
        const double a1 = m.control_pre.width(), a2 = m.control_post.width(), b1 = m.treated_pre.width();
        EXPECT_NEAR(population_bounds(pop, Assumption::spt).counterfactual.width(), a1 + a2 + b1, 1e-9);
        EXPECT_NEAR(population_bounds(pop, Assumption::ipt).counterfactual.width(), a2 * b1 / a1, 1e-9);
        EXPECT_NEAR(population_bounds(pop, Assumption::ps).counterfactual.width(), a2 * b1 / a1, 1e-9);
    }
}

TEST(PopulationBounds, MatchEnumeratedSample)
{
    const auto pop = attainment_oracle(example1_spec(Assumption::spt, 0.0));
    SampleOptions opt;
    opt.mode = SampleOptions::Mode::enumerate;
    const Panel panel = sample_from(pop, 4, 1, opt);
    ASSERT_EQ(panel.size(), 4u);
    for (Assumption a : {Assumption::spt, Assumption::ipt, Assumption::ps}) {
        EXPECT_TRUE(approx_equal(population_bounds(pop, a).att, estimate_bounds(a, panel).att, 1e-12));
    }
    EXPECT_THROW(sample_from(pop, 5, 1, opt), PreconditionError);
}

TEST(PopulationBounds, DegeneratePopulationGivesPoints)
{
    const auto pop = attainment_oracle(DgpSpec::from_config(KeyValueConfig::load(kDataDir + "/degenerate_coverage.dgp")));
    for (Assumption a : {Assumption::spt, Assumption::ps}) {
        const auto b = population_bounds(pop, a);
        EXPECT_TRUE(b.counterfactual.degenerate());
        EXPECT_TRUE(b.att.degenerate());
    }
}

TEST(Sampling, SeedDeterminesPanel)
{
    const auto pop = attainment_oracle(spec_from(kReferenceCoverageDgp));
    const Panel a = sample_from(pop, 200, 77);
    const Panel b = sample_from(pop, 200, 77);
    const Panel c = sample_from(pop, 200, 78);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].y1, b[i].y1);
        EXPECT_EQ(a[i].treated, b[i].treated);
        differs = differs || !(a[i].y1 == c[i].y1);
    }
    EXPECT_TRUE(differs);
}

TEST(Sampling, EmptyArmHandling)
{
    PopulationPoint c{0.999, false, {0, 1}, {0, 1}, {0, 1}, 0, 0, 0};
    PopulationPoint t{0.001, true, {0, 1}, {0, 1}, {0, 1}, 0, 0, 0};
    const FinitePopulation pop({c, t});
    SampleOptions strict;
    strict.on_empty_arm = SampleOptions::EmptyArm::error;
    EXPECT_THROW(sample_from(pop, 3, 1, strict), PreconditionError);
    SampleOptions lenient;
    lenient.max_attempts = 5000;
    const Panel p = sample_from(pop, 3, 1, lenient);
    EXPECT_GE(group_size(p, Group::treated), 1u);
}

// Sample bounds approach population bounds as n grows.
TEST(Sampling, LawOfLargeNumbers)
{
    const auto pop = attainment_oracle(spec_from(kReferenceCoverageDgp));
    const auto truth = population_bounds(pop, Assumption::ps).att;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t n : {500u, 5000u, 50000u}) {
        // average absolute error over a few draws to smooth out single-draw luck
        double err = 0.0;
        for (std::uint64_t seed = 1; seed <= 8; ++seed) {
            const Panel p = sample_from(pop, n, seed);
            const auto ci = confidence_interval(p, Assumption::ps, 0.05);
            const double el = std::abs(ci.theta_lower - truth.lower());
            const double eu = std::abs(ci.theta_upper - truth.upper());
            const double rn = std::sqrt(static_cast<double>(n));
            EXPECT_LE(el, 3.0 * ci.se_lower / rn + 1e-12) << "n=" << n;
            EXPECT_LE(eu, 3.0 * ci.se_upper / rn + 1e-12) << "n=" << n;
            err += std::max(el, eu) / 8.0;
        }
        EXPECT_LT(err, previous) << "n=" << n;
        previous = err;
    }
}

TEST(DgpSpec, NamedConfigErrors)
{
    EXPECT_NE(config_error("target = sideways\ncontrol.generate = 5\ntreated.generate = 5\n").find("target"),
              std::string::npos);
    EXPECT_NE(config_error("coarsening = blur\ncontrol.generate = 5\ntreated.generate = 5\n").find("coarsening"),
              std::string::npos);
    EXPECT_NE(config_error("control.generate = 5\n").find("treated"), std::string::npos);
    EXPECT_NE(config_error("control.point = 1, 2, 3\ntreated.generate = 5\n").find("control.point"),
              std::string::npos);
    EXPECT_NE(config_error("control.point = 1, 3, 2, 0, 0\ntreated.generate = 5\n").find("control.point"),
              std::string::npos);
    EXPECT_NE(config_error("treated_share = 1.5\ncontrol.generate = 5\ntreated.generate = 5\n").find("treated_share"),
              std::string::npos);
}

TEST(DgpSpec, BundledReferenceFileMatchesBuiltIn)
{
    const auto file = DgpSpec::from_config(KeyValueConfig::load(kDataDir + "/ps_coverage.dgp"));
    const auto built = spec_from(kReferenceCoverageDgp);
    const auto pf = attainment_oracle(file).moments();
    const auto pb = attainment_oracle(built).moments();
    EXPECT_EQ(pf.control_pre, pb.control_pre);
    EXPECT_EQ(pf.treated_post, pb.treated_post);
}

TEST(DgpSpec, HeapingCoarseningUsesRecodingRule)
{
    const auto spec = DgpSpec::from_config(KeyValueConfig::load(kDataDir + "/heaping_coverage.dgp"));
    const auto [control, treated] = resolve_support(spec);
    std::size_t wide = 0;
    for (const auto& g : {control, treated}) {
        for (const auto& p : g) {
            for (const Interval& y : {p.y1, p.y2}) {
                EXPECT_TRUE(y.degenerate() || y.width() == 10.0 || y.upper() == y.lower() + 10.0 ||
                            y.lower() == 0.0);
                wide += y.degenerate() ? 0 : 1;
            }
        }
    }
    EXPECT_GT(wide, 20u);
}

// 5000 replications: at 1000 the Monte Carlo spread alone is about 0.007.
TEST(Coverage, ParallelShiftsNominal95)
{
    CoverageOptions opt;
    opt.n = 500;
    opt.reps = 5000;
    opt.seed = 31;
    const auto r = coverage_experiment(spec_from(kReferenceCoverageDgp), opt);
    EXPECT_GE(r.coverage, 0.93);
    EXPECT_LE(r.coverage, 0.98);
    EXPECT_GT(r.mean_ci_length, r.population_att.width());
}

TEST(Coverage, PointIdentifiedBaseline)
{
    const auto spec = DgpSpec::from_config(KeyValueConfig::load(kDataDir + "/degenerate_coverage.dgp"));
    CoverageOptions opt;
    opt.n = 500;
    opt.reps = 1000;
    opt.seed = 32;
    const auto r = coverage_experiment(spec, opt);
    EXPECT_TRUE(r.population_att.degenerate());
    EXPECT_GE(r.coverage, 0.93);
    EXPECT_LE(r.coverage, 0.97);
}

TEST(Coverage, HalfLevel)
{
    CoverageOptions opt;
    opt.n = 500;
    opt.reps = 1000;
    opt.alpha = 0.5;
    opt.seed = 33;
    const auto r = coverage_experiment(spec_from(kReferenceCoverageDgp), opt);
    EXPECT_NEAR(r.coverage, 0.5, 0.05);
}

TEST(Coverage, DeterministicAndThreadIndependent)
{
    CoverageOptions opt;
    opt.n = 200;
    opt.reps = 100;
    opt.seed = 34;
    opt.threads = 1;
    const auto spec = spec_from(kReferenceCoverageDgp);
    const auto a = coverage_experiment(spec, opt);
    opt.threads = 3;
    const auto b = coverage_experiment(spec, opt);
    EXPECT_EQ(a.to_text(), b.to_text());
    opt.reps = 99;
    EXPECT_THROW(coverage_experiment(spec, opt), PreconditionError);
}
