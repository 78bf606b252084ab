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

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace ivdid;

#ifndef IVDID_DATA_DIR
#error "IVDID_DATA_DIR must point at the data directory"
#endif

namespace {

const std::string kDataDir = IVDID_DATA_DIR;

const char* kCountSchema = R"(id = id
group = state
treated_values = NJ
control_values = PA
full_time.1 = ft1
part_time.1 = pt1
managers.1 = mgr1
full_time.2 = ft2
part_time.2 = pt2
managers.2 = mgr2
)";

LoadResult load_text(const std::string& csv, const std::string& schema_text = kCountSchema)
{
    std::istringstream in(csv);
    return load_panel(in, Schema::from_config(KeyValueConfig::parse_string(schema_text)));
}

LoadError::Kind load_error_kind(const std::string& csv, const std::string& schema_text = kCountSchema)
{
    try {
        load_text(csv, schema_text);
    } catch (const LoadError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected a LoadError";
    return LoadError::Kind::io;
}

} // namespace

TEST(Recode, HeapedMultiplesBecomeBrackets)
{
    EXPECT_EQ(recode_count(15), Interval(10, 20));
    EXPECT_EQ(recode_count(10), Interval(5, 15));
    EXPECT_EQ(recode_count(30), Interval(25, 35));
    EXPECT_EQ(recode_count(15.0), Interval(10, 20));
}

TEST(Recode, SmallOrUnroundCountsStayScalar)
{
    EXPECT_EQ(recode_count(9), Interval(9, 9));
    EXPECT_EQ(recode_count(5), Interval(5, 5));
    EXPECT_EQ(recode_count(0), Interval(0, 0));
    EXPECT_EQ(recode_count(17), Interval(17, 17));
}

TEST(Recode, Decimals)
{
    EXPECT_EQ(recode_count(6.5), Interval(6, 7));
    RecodingPolicy keep;
    keep.decimal_rule = DecimalRule::keep_scalar;
    EXPECT_EQ(recode_count(6.5, keep), Interval(6.5, 6.5));
}

TEST(Recode, LowerEndClampsAtZero)
{
    RecodingPolicy p;
    p.heap_threshold = 2;
    p.heap_halfwidth = 7;
    EXPECT_EQ(recode_count(5, p), Interval(0, 12));
}

TEST(Recode, RejectsNegativeInput)
{
    EXPECT_THROW(recode_count(-1), PreconditionError);
    EXPECT_THROW(recode_count(std::nan("")), PreconditionError);
}

TEST(Recode, IdempotentOnScalarOutputs)
{
    for (int k = 0; k <= 400; ++k) {
        const double x = k * 0.25;
        const Interval r = recode_count(x);
        EXPECT_LE(r.lower(), r.upper());
        if (r.degenerate()) {
            EXPECT_EQ(recode_count(r.lower()), r);
        }
    }
}

TEST(Fte, Examples)
{
    EXPECT_EQ(fte_interval({10, 20}, {3, 3}, {15, 15}), Interval(20.5, 30.5));
    EXPECT_EQ(fte_interval({0, 0}, {0, 0}, {0, 0}), Interval(0, 0));
    EXPECT_EQ(fte_interval({5, 5}, {2, 2}, {10, 20}), Interval(12, 17));
}

TEST(Fte, MonotoneInInclusion)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> grow(0.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
        const Interval ft = fixtures::random_interval(rng), mgr = fixtures::random_interval(rng),
                       pt = fixtures::random_interval(rng);
        const Interval base = fte_interval(ft, mgr, pt);
        const Interval wider = fte_interval(Interval(ft.lower() - grow(rng), ft.upper() + grow(rng)), mgr,
                                            Interval(pt.lower() - grow(rng), pt.upper()));
        EXPECT_TRUE(wider.contains(base, 1e-12));
    }
}

TEST(GroupMoments, AumannMean)
{
    const Panel p = {fixtures::unit("a", false, {0, 2}, {0, 0}), fixtures::unit("b", false, {2, 4}, {0, 0}),
                     fixtures::unit("c", true, {5, 5}, {0, 0})};
    EXPECT_EQ(group_moments(p, Group::control, Period::pre), Interval(1, 3));
    EXPECT_EQ(group_moments(p, Group::treated, Period::pre), Interval(5, 5));

    const Panel q = {fixtures::unit("a", true, {10, 20}, {0, 0}), fixtures::unit("b", true, {9, 9}, {0, 0}),
                     fixtures::unit("c", true, {6, 7}, {0, 0})};
    const Interval m = group_moments(q, Group::treated, Period::pre);
    EXPECT_NEAR(m.lower(), 25.0 / 3.0, 1e-12);
    EXPECT_NEAR(m.upper(), 12.0, 1e-12);
    EXPECT_THROW(group_moments(q, Group::control, Period::pre), PreconditionError);
}

TEST(GroupMoments, WidthIsMeanWidth)
{
    std::mt19937_64 rng(9);
    const Panel p = fixtures::random_panel(rng, 40, 60);
    std::vector<double> widths;
    for (const auto& u : p)
        if (u.treated) widths.push_back(u.y2.width());
    EXPECT_NEAR(group_moments(p, Group::treated, Period::post).width(), detail::ordered_mean(widths), 1e-12);
}

TEST(Loader, CountsBecomeFteIntervals)
{
    const auto r = load_text("id,state,ft1,pt1,mgr1,ft2,pt2,mgr2\n"
                             "s1,NJ,15,15,3,9,6.5,2\n"
                             "s2,PA,5,10,2,20,0,1\n");
    ASSERT_EQ(r.units.size(), 2u);
    EXPECT_EQ(r.units[0].unit_id, "s1");
    EXPECT_TRUE(r.units[0].treated);
    // ft 15 -> [10,20], pt 15 -> [10,20], mgr 3
    EXPECT_EQ(r.units[0].y1, Interval(18, 33));
    // ft 9, pt 6.5 -> [6,7], mgr 2
    EXPECT_EQ(r.units[0].y2, Interval(14, 14.5));
    EXPECT_FALSE(r.units[1].treated);
    EXPECT_EQ(r.units[1].y1, Interval(9.5, 14.5));
    EXPECT_EQ(r.units[1].y2, Interval(16, 26));
    ASSERT_TRUE(r.units[0].scalar_y1.has_value());
    EXPECT_DOUBLE_EQ(*r.units[0].scalar_y1, 25.5);
    EXPECT_EQ(r.report.rows_kept, 2u);
}

TEST(Loader, MissingFieldDropsRow)
{
    const auto r = load_text("id,state,ft1,pt1,mgr1,ft2,pt2,mgr2\n"
                             "s1,NJ,15,15,3,.,6,2\n"
                             "s2,NJ,10,10,3,9,6,2\n"
                             "s3,PA,5,10,2,20,0,1\n");
    EXPECT_EQ(r.units.size(), 2u);
    EXPECT_EQ(r.report.rows_read, 3u);
    EXPECT_EQ(r.report.rows_dropped(), 1u);
    EXPECT_EQ(r.report.dropped.at("missing_full_time.2"), 1u);
    EXPECT_NE(r.report.to_text().find("dropped.missing_full_time.2 = 1"), std::string::npos);
}

TEST(Loader, ManagerRecodingCanBeSwitchedOff)
{
    const std::string csv = "id,state,ft1,pt1,mgr1,ft2,pt2,mgr2\ns1,NJ,0,0,10,0,0,10\ns2,PA,0,0,1,0,0,1\n";
    EXPECT_EQ(load_text(csv).units[0].y1, Interval(5, 15));
    EXPECT_EQ(load_text(csv, std::string(kCountSchema) + "recode.managers = false\n").units[0].y1, Interval(10, 10));
}

TEST(Loader, DistinctErrors)
{
    const std::string header = "id,state,ft1,pt1,mgr1,ft2,pt2,mgr2\n";
    EXPECT_EQ(load_error_kind(header + "s1,NJ,1,1,1,1,1,1\ns2,NJ,1,1,1,1,1,1\n"), LoadError::Kind::empty_control);
    EXPECT_EQ(load_error_kind(header + "s1,PA,1,1,1,1,1,1\n"), LoadError::Kind::empty_treated);
    EXPECT_EQ(load_error_kind(header + "s1,NJ,x,1,1,1,1,1\ns2,PA,1,1,1,1,1,1\n"), LoadError::Kind::bad_numeric);
    EXPECT_EQ(load_error_kind(header + "s1,NJ,-2,1,1,1,1,1\ns2,PA,1,1,1,1,1,1\n"), LoadError::Kind::bad_numeric);
    EXPECT_EQ(load_error_kind("id,state,ft1,pt1,mgr1,ft2,pt2\ns1,NJ,1,1,1,1,1\n"), LoadError::Kind::unknown_column);
    EXPECT_EQ(load_error_kind(header, "id = id\ntreated_values = NJ\n"), LoadError::Kind::missing_role);
}

TEST(Loader, EmptyControlMessage)
{
    try {
        load_text("id,state,ft1,pt1,mgr1,ft2,pt2,mgr2\ns1,NJ,1,1,1,1,1,1\n");
        FAIL();
    } catch (const LoadError& e) {
        EXPECT_NE(std::string(e.what()).find("control group empty"), std::string::npos) << e.what();
    }
}

TEST(Loader, MissingRoleIsNamed)
{
    try {
        Schema::from_config(KeyValueConfig::parse_string("id = id\ntreated_values = 1\n"));
        FAIL();
    } catch (const LoadError& e) {
        EXPECT_NE(std::string(e.what()).find("'group'"), std::string::npos) << e.what();
    }
}

TEST(Loader, TabDelimitedAndQuoted)
{
    const auto r = load_text("id\tstate\tft1\tpt1\tmgr1\tft2\tpt2\tmgr2\n"
                             "\"s 1\"\tNJ\t1\t2\t1\t1\t2\t1\n"
                             "s2\tPA\t1\t2\t1\t3\t2\t1\n");
    ASSERT_EQ(r.units.size(), 2u);
    EXPECT_EQ(r.units[0].unit_id, "s 1");
    EXPECT_EQ(r.units[1].y2, Interval(5, 5));
}

TEST(Loader, IntervalPanelRoundTrip)
{
    std::ifstream in(kDataDir + "/intervals_example.csv");
    ASSERT_TRUE(in);
    std::stringstream original;
    original << in.rdbuf();
    std::istringstream src(original.str());
    const auto r = load_panel(src, Schema::recoded_panel());
    ASSERT_EQ(r.units.size(), 4u);
    EXPECT_EQ(r.units[2].y1, Interval(-4, -2));
    std::ostringstream out;
    write_panel_csv(out, r.units);
    EXPECT_EQ(out.str(), original.str());
}

TEST(Loader, DeterministicAcrossLoads)
{
    const auto schema = Schema::from_config(KeyValueConfig::load(kDataDir + "/ck94.schema"));
    const auto a = load_panel(kDataDir + "/ck94_synthetic.csv", schema);
    const auto b = load_panel(kDataDir + "/ck94_synthetic.csv", schema);
    ASSERT_EQ(a.units.size(), b.units.size());
    for (std::size_t i = 0; i < a.units.size(); ++i) {
        EXPECT_EQ(a.units[i].unit_id, b.units[i].unit_id);
        EXPECT_EQ(a.units[i].y1, b.units[i].y1);
        EXPECT_EQ(a.units[i].y2, b.units[i].y2);
        EXPECT_EQ(a.units[i].covariate_cell, b.units[i].covariate_cell);
    }
}

TEST(Loader, SurveyProfileLoadsSyntheticFile)
{
    const auto schema = Schema::from_config(KeyValueConfig::load(kDataDir + "/ck94.schema"));
    const auto r = load_panel(kDataDir + "/ck94_synthetic.csv", schema);
    EXPECT_EQ(r.report.rows_read, 410u);
    EXPECT_EQ(r.report.rows_kept + r.report.rows_dropped(), 410u);
    EXPECT_GT(r.report.treated, 300u);
    EXPECT_GT(r.report.control, 70u);
    for (const auto& u : r.units) {
        ASSERT_TRUE(u.covariate_cell.has_value());
        EXPECT_NE(u.covariate_cell->find("chain="), std::string::npos);
    }
}

// Every heaped full-time count in the first wave turns into a 10-wide bracket,
// so no mass is left on the heap points after recoding.
TEST(Loader, HeapsVanishIntoIntervals)
{
    std::ifstream in(kDataDir + "/ck94_synthetic.csv");
    std::string line;
    std::getline(in, line);
    std::size_t heaped = 0, scalar_heaps_after = 0;
    while (std::getline(in, line)) {
        const auto cols = detail::split_list(line);
        const auto ft = detail::parse_double(cols[4]);
        if (!ft) continue;
        const Interval r = recode_count(*ft);
        if (is_heaped(*ft, {})) {
            ++heaped;
            EXPECT_DOUBLE_EQ(r.width(), 10.0);
        }
        if (r.degenerate() && is_heaped(r.lower(), {})) ++scalar_heaps_after;
    }
    EXPECT_GT(heaped, 50u);
    EXPECT_EQ(scalar_heaps_after, 0u);
}
