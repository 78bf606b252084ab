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

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <ivdid/ivdid.hpp>
#include <ivdid/serialize.hpp>

namespace fs = std::filesystem;

namespace {

enum class FigureFormat { csv, svg };

struct PolicyOverrides {
    std::optional<int> heap_threshold;
    std::optional<int> heap_modulus;
    std::optional<double> heap_halfwidth;
    std::optional<std::string> decimal_rule;

    void apply(ivdid::RecodingPolicy& p) const
    {
        if (heap_threshold) p.heap_threshold = *heap_threshold;
        if (heap_modulus) p.heap_modulus = *heap_modulus;
        if (heap_halfwidth) p.heap_halfwidth = *heap_halfwidth;
        if (decimal_rule) p.decimal_rule = ivdid::parse_decimal_rule(*decimal_rule);
        p.validate();
    }
};

struct RunConfig {
    std::string input;
    std::string schema;
    std::string out = "out";
    std::vector<std::string> assumptions = {"SPT", "IPT", "PS", "CPS"};
    double alpha = 0.05;
    std::string variance = "delta";
    std::size_t boot_reps = 2000;
    std::uint64_t seed = 20240601;
    unsigned threads = 0;
    FigureFormat figure_format = FigureFormat::csv;
    PolicyOverrides policy;

    std::string spec;
    std::string simulate_mode = "both";
    std::size_t n = 500;
    std::size_t reps = 1000;
};

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ivdid::Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ivdid::Error("failed writing '" + path.string() + "'");
}

template <class F>
void write_with(const fs::path& path, F&& emit)
{
    std::ostringstream os;
    emit(os);
    write_file(path, os.str());
}

fs::path prepare_out(const std::string& dir)
{
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

ivdid::LoadResult load_input(const RunConfig& cfg)
{
    ivdid::Schema schema = cfg.schema.empty() ? ivdid::Schema::recoded_panel()
                                              : ivdid::Schema::from_config(ivdid::KeyValueConfig::load(cfg.schema));
    cfg.policy.apply(schema.policy);
    return ivdid::load_panel(cfg.input, schema);
}

int cmd_recode(const RunConfig& cfg)
{
    const auto loaded = load_input(cfg);
    const fs::path out = prepare_out(cfg.out);
    write_with(out / "panel.csv", [&](std::ostream& os) { ivdid::write_panel_csv(os, loaded.units); });
    write_file(out / "load_report.txt", loaded.report.to_text());
    std::cout << loaded.report.to_text();
    return 0;
}

int cmd_estimate(const RunConfig& cfg)
{
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ivdid::PreconditionError("--alpha must lie in (0, 1)");
    const auto loaded = load_input(cfg);
    const fs::path out = prepare_out(cfg.out);
    write_file(out / "load_report.txt", loaded.report.to_text());

    ivdid::VarianceOptions vopt;
    vopt.method = ivdid::parse_variance_method(cfg.variance);
    vopt.boot_reps = cfg.boot_reps;
    vopt.seed = cfg.seed;
    vopt.threads = cfg.threads;

    std::vector<ivdid::EstimateRow> rows;
    for (const auto& name : cfg.assumptions) {
        ivdid::EstimateRow row;
        row.assumption = ivdid::parse_assumption(name);
        try {
            row.report = ivdid::confidence_interval(loaded.units, row.assumption, cfg.alpha, vopt);
        } catch (const ivdid::Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }

    const auto moments = ivdid::compute_moments(loaded.units);
    write_with(out / "results.csv", [&](std::ostream& os) { ivdid::write_results_csv(os, rows); });
    nlohmann::ordered_json j = {{"load_report", loaded.report}, {"moments", moments}, {"results", rows}};
    write_file(out / "results.json", j.dump(2) + "\n");
    if (cfg.figure_format == FigureFormat::csv) {
        write_with(out / "figure_bounds.csv",
                   [&](std::ostream& os) { ivdid::write_bounds_figure_csv(os, moments, rows); });
        write_with(out / "figure_att.csv", [&](std::ostream& os) { ivdid::write_att_figure_csv(os, rows); });
    } else {
        write_file(out / "figure_bounds.svg", ivdid::svg_bounds_figure(moments, rows));
        write_file(out / "figure_att.svg", ivdid::svg_att_figure(rows));
    }

    std::cout << loaded.report.to_text() << "\nalpha = " << cfg.alpha << ", variance = " << cfg.variance << "\n\n"
              << ivdid::format_results_table(rows);
    int failures = 0;
    for (const auto& r : rows) {
        if (!r.ok()) {
            std::cerr << "error [" << ivdid::to_string(r.assumption) << "]: " << r.error << '\n';
            ++failures;
        }
    }
    return failures == 0 ? 0 : 2;
}

int cmd_simulate(const RunConfig& cfg)
{
    const auto spec = ivdid::DgpSpec::from_config(ivdid::KeyValueConfig::load(cfg.spec));
    const fs::path out = prepare_out(cfg.out);
    int status = 0;
    if (cfg.simulate_mode == "sharpness" || cfg.simulate_mode == "both") {
        const auto cases = ivdid::sharpness_suite(spec);
        write_with(out / "sharpness.csv", [&](std::ostream& os) { ivdid::write_sharpness_csv(os, cases); });
        std::size_t passed = 0;
        std::size_t skipped = 0;
        for (const auto& c : cases) {
            passed += c.passed ? 1 : 0;
            skipped += c.skipped.empty() ? 0 : 1;
        }
        std::cout << "sharpness = " << passed << '/' << cases.size() - skipped << " passed";
        if (skipped > 0) std::cout << " (" << skipped << " skipped: construction undefined on this support)";
        std::cout << '\n';
        if (passed + skipped != cases.size()) status = 3;
    }
    if (cfg.simulate_mode == "coverage" || cfg.simulate_mode == "both") {
        ivdid::CoverageOptions copt;
        copt.n = cfg.n;
        copt.reps = cfg.reps;
        copt.alpha = cfg.alpha;
        copt.seed = cfg.seed;
        copt.threads = cfg.threads;
        copt.variance.method = ivdid::parse_variance_method(cfg.variance);
        copt.variance.boot_reps = cfg.boot_reps;
        const auto report = ivdid::coverage_experiment(spec, copt);
        write_with(out / "coverage.csv", [&](std::ostream& os) { ivdid::write_coverage_csv(os, {report}); });
        write_file(out / "coverage.txt", report.to_text());
        std::cout << report.to_text();
    }
    return status;
}

int cmd_selftest(const RunConfig& cfg, const std::optional<std::string>& report_path)
{
    ivdid::SelftestOptions opt;
    opt.seed = cfg.seed;
    opt.coverage_reps = cfg.reps;
    opt.threads = cfg.threads;
    const auto report = ivdid::run_selftest(opt);
    const std::string text = report.to_text();
    if (report_path) write_file(*report_path, text);
    std::cout << text;
    return report.passed() ? 0 : 4;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Difference-in-differences bounds for interval-valued outcomes"};
    app.set_config("--config", "", "INI/TOML config file; command-line flags take precedence");
    app.require_subcommand(1);

    RunConfig cfg;
    std::optional<std::string> report_path;
    std::string figure_format = "csv";

    auto input_opts = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input, "Input table (CSV or tab-separated)")->required()->check(CLI::ExistingFile);
        sub->add_option("--schema", cfg.schema, "Schema file; omit for a recoded panel CSV")->check(CLI::ExistingFile);
        sub->add_option("--heap-threshold", cfg.policy.heap_threshold, "Smallest count treated as heaped");
        sub->add_option("--heap-modulus", cfg.policy.heap_modulus, "Heap rounding base");
        sub->add_option("--heap-halfwidth", cfg.policy.heap_halfwidth, "Half-width of a heaped count's interval");
        sub->add_option("--decimal-rule", cfg.policy.decimal_rule, "unit_bracket or keep_scalar");
        sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    };
    auto inference_opts = [&](CLI::App* sub) {
        sub->add_option("--alpha", cfg.alpha, "Significance level")->capture_default_str();
        sub->add_option("--variance", cfg.variance, "delta or bootstrap")
            ->check(CLI::IsMember({"delta", "bootstrap"}))
            ->capture_default_str();
        sub->add_option("--boot-reps", cfg.boot_reps, "Bootstrap replications")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
        sub->add_option("--threads", cfg.threads, "Worker threads (0: all cores)")->capture_default_str();
    };

    auto* recode = app.add_subcommand("recode", "Recode raw counts into an interval panel");
    input_opts(recode);

    auto* estimate = app.add_subcommand("estimate", "Bounds and confidence intervals per assumption");
    input_opts(estimate);
    inference_opts(estimate);
    estimate->add_option("--assumptions", cfg.assumptions, "Any of SPT, IPT, PS, CPS")
        ->delimiter(',')
        ->capture_default_str();
    estimate->add_option("--figure-format", figure_format, "csv or svg")
        ->check(CLI::IsMember({"csv", "svg"}))
        ->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Sharpness and coverage checks on a DGP spec");
    simulate->add_option("--spec", cfg.spec, "DGP spec file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--mode", cfg.simulate_mode, "sharpness, coverage or both")
        ->check(CLI::IsMember({"sharpness", "coverage", "both"}))
        ->capture_default_str();
    simulate->add_option("--n", cfg.n, "Sample size per replication")->capture_default_str();
    simulate->add_option("--reps", cfg.reps, "Replications")->capture_default_str();
    simulate->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    inference_opts(simulate);

    auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle and golden suites");
    selftest->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    selftest->add_option("--reps", cfg.reps, "Coverage replications")->capture_default_str();
    selftest->add_option("--threads", cfg.threads, "Worker threads (0: all cores)")->capture_default_str();
    selftest->add_option("--out", report_path, "Also write the report to this file");

    CLI11_PARSE(app, argc, argv);
    cfg.figure_format = figure_format == "svg" ? FigureFormat::svg : FigureFormat::csv;

    try {
        if (recode->parsed()) return cmd_recode(cfg);
        if (estimate->parsed()) return cmd_estimate(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (selftest->parsed()) return cmd_selftest(cfg, report_path);
    } catch (const ivdid::LoadError& e) {
        std::cerr << "load error: " << e.what() << '\n';
        return 1;
    } catch (const ivdid::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
