// SPDX-License-Identifier: Apache-2.0
//
// quantid - optimal output quantizers for least-squares FIR identification
// Copyright (C) 2026 The quantid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// quantid command-line tool: runs one experiment described by a JSON config
// and writes CSV/JSON artifacts into the output directory.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "quantid/quantid.hpp"

namespace
{

using namespace quantid;
using cli::ConfigError;
using cli::ConfigReader;
using cli::Node;
using ordered_json = nlohmann::ordered_json;

constexpr int exit_config = 2;
constexpr int exit_infeasible = 3;
constexpr int exit_numeric = 4;

struct Options
{
    std::string command;
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string out = ".";
};

/// Everything an experiment needs, resolved from the config.
struct Experiment
{
    const ConfigReader *reader = nullptr;
    Options opts;
    std::uint64_t seed = 1;
    SignalSource source = SignalSource::uniform(1.0);
    std::string source_kind;
    std::optional<FirParameters> params;
    TransformedBasis basis;
};

SignalSource read_source(const ConfigReader &r, const Node &node, std::string &kind)
{
    kind = r.choice(node, "kind", {"uniform", "normal", "power_law", "tabulated"});
    if (kind == "uniform")
    {
        r.expect_keys(node, {"kind", "kappa"});
        return SignalSource::uniform(r.positive(node, "kappa"));
    }
    if (kind == "normal")
    {
        r.expect_keys(node, {"kind", "sigma"});
        return SignalSource::normal(r.positive(node, "sigma", 1.0));
    }
    if (kind == "power_law")
    {
        r.expect_keys(node, {"kind", "core_width"});
        return SignalSource::power_law(r.positive(node, "core_width", 1.0));
    }
    r.expect_keys(node, {"kind", "path"});
    auto file = std::filesystem::path(r.string(node, "path"));
    if (file.is_relative())
        file = std::filesystem::path(r.path()).parent_path() / file;
    try
    {
        return SignalSource(read_tabulated_density(file.string()));
    }
    catch (const InvalidArgument &e)
    {
        r.fail(node, "path", e.what());
    }
}

Experiment read_common(const ConfigReader &r, const Options &opts, bool needs_model)
{
    const Node root = r.root();
    Experiment ex;
    ex.reader = &r;
    ex.opts = opts;
    if (r.has(root, "command") && r.string(root, "command") != opts.command)
        r.fail(root, "command", "config is for \"" + r.string(root, "command") + "\", not \"" + opts.command + "\"");
    ex.seed = opts.seed ? *opts.seed : r.seed(root, "seed", 1);
    if (r.has(root, "source"))
        ex.source = read_source(r, r.object(root, "source"), ex.source_kind);
    else
        r.fail(root, "source", "missing required key");
    if (needs_model || r.has(root, "model"))
    {
        const Node model = r.object(root, "model");
        r.expect_keys(model, {"theta"});
        const auto theta = r.numbers(model, "theta");
        Vector v(static_cast<Eigen::Index>(theta.size()));
        for (std::size_t i = 0; i < theta.size(); ++i)
            v(static_cast<Eigen::Index>(i)) = theta[i];
        try
        {
            ex.params.emplace(v);
        }
        catch (const InvalidArgument &e)
        {
            r.fail(model, "theta", e.what());
        }
        ex.basis = build_transform(v);
    }
    return ex;
}

ConditionalSpread read_spread(const ConfigReader &r, const Node &q, const MarginalDensity &f, int n)
{
    if (!r.has(q, "spread"))
        return conditional_spread(f, n);
    const Node s = r.object(q, "spread");
    r.expect_keys(s, {"quadratic", "offset"});
    ConditionalSpread spread;
    spread.quadratic = r.number(s, "quadratic", 1.0);
    spread.offset = r.number(s, "offset", 0.0);
    if (spread.quadratic < 0.0)
        r.fail(s, "quadratic", "must be non-negative");
    if (spread.offset < 0.0)
        r.fail(s, "offset", "must be non-negative");
    return spread;
}

RepsRule read_rule(const ConfigReader &r, const Node &node, const std::string &key, const char *fallback)
{
    return r.choice(node, key, {"midpoint", "bias_free"}, std::string(fallback)) == "midpoint"
               ? RepsRule::midpoint
               : RepsRule::bias_free;
}

/// Quantizer plus whatever the design step reports about it.
struct BuiltQuantizer
{
    Quantizer quantizer;
    std::string mode;
    ordered_json report;
    std::optional<Design> highres;
    std::vector<std::string> warnings;
};

ordered_json report_json(const DesignReport &r)
{
    ordered_json j{{"mode", to_string(r.mode)}, {"M", r.M},          {"D", r.D},
                   {"K", r.K},                   {"L", r.L},          {"theta_tilde_1", r.theta_tilde_1},
                   {"predicted_cost", r.predicted_cost}};
    if (r.mode == RateMode::variable)
        j["entropy_nats"] = r.entropy_H;
    return j;
}

BuiltQuantizer build_quantizer(const Experiment &ex, const Node &q)
{
    const ConfigReader &r = *ex.reader;
    r.expect_keys(q, {"mode", "M", "reps", "spread", "check_tail", "range"});
    const auto mode = r.choice(q, "mode",
                               {"fixed_rate", "variable_rate", "coarse_n1", "coarse_general", "coarse_ninf", "uniform"});
    const long long M = r.integer(q, "M", std::nullopt, 2);
    const int n = ex.params->order();
    const double theta1 = ex.basis.theta_tilde_1;
    const auto &f = ex.source.shape();

    if (mode == "fixed_rate" || mode == "variable_rate")
    {
        const auto spread = read_spread(r, q, f, n);
        DesignOptions opts;
        opts.theta_tilde_1 = theta1;
        opts.check_tail = r.boolean(q, "check_tail", true);
        auto design = mode == "fixed_rate" ? design_fixed_rate(f, spread, static_cast<int>(M), opts)
                                           : design_variable_rate(f, spread, static_cast<int>(M), opts);
        auto quantizer =
            companding_breakpoints(design.g, static_cast<int>(M), read_rule(r, q, "reps", "midpoint"), theta1);
        ordered_json report = report_json(design.report);
        report["spread"] = {{"quadratic", spread.quadratic}, {"offset", spread.offset}};
        report["exact_cost"] = exact_quantized_cost(f, spread, quantizer, theta1);
        return {std::move(quantizer), mode, std::move(report), std::move(design), {}};
    }

    if (mode == "uniform")
    {
        double range;
        if (r.has(q, "range"))
            range = r.positive(q, "range");
        else if (ex.source_kind == "uniform")
            range = f.hi() * theta1;
        else
            r.fail(q, "range", "required unless the source is uniform");
        auto quantizer = uniform_quantizer(range, static_cast<int>(2 * QuantizerBudget::from_total(int(M)).M_prime),
                                           read_rule(r, q, "reps", "midpoint"));
        return {std::move(quantizer), mode, ordered_json{{"range", range}}, std::nullopt, {}};
    }

    if (ex.source_kind != "uniform")
        r.fail(q, "mode", "coarse designs require a uniform source");
    const CoarseMode cm = mode == "coarse_n1" ? CoarseMode::n1
                          : mode == "coarse_ninf" ? CoarseMode::n_inf
                                                  : CoarseMode::general;
    GeneralSolverOptions gopts;
    gopts.threads = ex.opts.threads;
    auto design = design_coarse(static_cast<int>(M), f.hi(), theta1, n, cm, gopts);
    ordered_json report{{"mode", to_string(design.mode)},
                        {"M_prime", design.sequence.positive_cells()},
                        {"kappa_y", design.kappa_y},
                        {"theta_tilde_1", design.theta_tilde_1},
                        {"n", design.n},
                        {"optimal_cost", design.optimal_cost},
                        {"ratios", design.sequence.ratios}};
    return {design.quantizer, mode, std::move(report), std::nullopt, design.warnings};
}

std::filesystem::path output_dir(const Options &opts)
{
    std::filesystem::path dir(opts.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw ConfigError("--out: cannot create directory " + opts.out);
    return dir;
}

void write_json(const std::filesystem::path &file, const ordered_json &j)
{
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw Error("cannot open " + file.string() + " for writing");
    out << j.dump(2) << '\n';
}

void announce(const std::filesystem::path &file) { std::cout << "wrote " << file.string() << '\n'; }

ordered_json warnings_json(const std::vector<std::string> &warnings)
{
    for (const auto &w : warnings)
        std::cerr << "warning: " << w << '\n';
    return warnings;
}

// ---------------------------------------------------------------- commands

int cmd_design(const ConfigReader &r, const Options &opts)
{
    const Node root = r.root();
    r.expect_keys(root, {"command", "seed", "source", "model", "quantizer", "grid"});
    const auto ex = read_common(r, opts, true);
    const auto built = build_quantizer(ex, r.object(root, "quantizer"));
    const auto dir = output_dir(opts);

    ordered_json j{{"command", "design"},
                   {"mode", built.mode},
                   {"M", built.quantizer.total_cells()},
                   {"report", built.report},
                   {"quantizer", to_json(built.quantizer)},
                   {"warnings", warnings_json(built.warnings)}};
    write_json(dir / "quantizer.json", j);
    announce(dir / "quantizer.json");

    if (built.highres)
    {
        const auto &f = ex.source.shape();
        double lo = f.lo(), hi = f.hi();
        long long points = 401;
        if (auto grid = r.optional_object(root, "grid"))
        {
            r.expect_keys(*grid, {"lo", "hi", "points"});
            lo = r.number(*grid, "lo", lo);
            hi = r.number(*grid, "hi", hi);
            points = r.integer(*grid, "points", points, 2);
            if (!(hi > lo))
                r.fail(*grid, "hi", "must exceed lo");
        }
        CsvTable table({"phi1", "f", "g"});
        for (const auto &row : design_grid(f, built.highres->g, lo, hi, static_cast<int>(points)))
            table.row(std::vector<double>{row[0], row[1], row[2]});
        table.write((dir / "design.csv").string());
        announce(dir / "design.csv");
    }

    CsvTable cells({"cell", "lower", "upper", "rep"});
    const auto &d = built.quantizer.positive_breakpoints();
    const auto &reps = built.quantizer.positive_reps();
    for (std::size_t j = 0; j < reps.size(); ++j)
        cells.row(std::vector<std::string>{std::to_string(j + 1), format_number(d[j]), format_number(d[j + 1]),
                                           format_number(reps[j])});
    cells.write((dir / "cells.csv").string());
    announce(dir / "cells.csv");
    return 0;
}

int cmd_simulate(const ConfigReader &r, const Options &opts)
{
    const Node root = r.root();
    r.expect_keys(root, {"command", "seed", "source", "model", "quantizer", "N", "noise", "layout"});
    const auto ex = read_common(r, opts, true);
    const int n = ex.params->order();
    const auto N = static_cast<int>(r.integer(root, "N", std::nullopt, n));
    std::optional<BuiltQuantizer> built;
    if (r.has(root, "quantizer"))
        built = build_quantizer(ex, r.object(root, "quantizer"));
    double sigma_w = 0.0;
    NoiseKind noise = NoiseKind::normal;
    if (auto node = r.optional_object(root, "noise"))
    {
        r.expect_keys(*node, {"sigma_w", "kind"});
        sigma_w = r.number(*node, "sigma_w", 0.0);
        if (sigma_w < 0.0)
            r.fail(*node, "sigma_w", "must be non-negative");
        noise = r.choice(*node, "kind", {"normal", "uniform"}, std::string("normal")) == "normal" ? NoiseKind::normal
                                                                                                   : NoiseKind::uniform;
    }
    const auto layout_name = r.choice(root, "layout", {"shift", "independent_rows", "rotated_iid"}, "shift");
    const auto layout = layout_name == "shift"              ? RegressorLayout::shift
                        : layout_name == "independent_rows" ? RegressorLayout::independent_rows
                                                            : RegressorLayout::rotated_iid;
    const auto dir = output_dir(opts);

    const Matrix U = generate_regressors(ex.source, N, n, ex.seed, layout, &ex.basis);
    const auto data = simulate_output(U, *ex.params, built ? &built->quantizer : nullptr, sigma_w, ex.seed, noise);
    const auto result = estimate(U, *ex.params, data);
    auto vector_json = [](const Vector &v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    ordered_json j{{"command", "simulate"},
                   {"seed", ex.seed},
                   {"N", N},
                   {"layout", layout_name},
                   {"sigma_w", sigma_w},
                   {"quantizer", built ? ordered_json(built->mode) : ordered_json(nullptr)},
                   {"theta", vector_json(ex.params->theta)},
                   {"theta_hat", vector_json(result.theta_hat)},
                   {"delta_E", vector_json(result.delta_E)},
                   {"delta_W", vector_json(result.delta_W)},
                   {"delta_E_sq", result.delta_E_sq},
                   {"delta_W_sq", result.delta_W_sq},
                   {"error_sq", result.error_sq},
                   {"bias_stat", result.bias_stat}};
    if (built)
        j["warnings"] = warnings_json(built->warnings);
    write_json(dir / "estimate.json", j);
    announce(dir / "estimate.json");
    return 0;
}

int cmd_compare(const ConfigReader &r, const Options &opts)
{
    const Node root = r.root();
    r.expect_keys(root, {"command", "seed", "source", "model", "M", "N", "trials", "baseline_reps", "mode", "layout"});
    const auto ex = read_common(r, opts, true);
    if (ex.source_kind != "uniform")
        r.fail(root, "source", "compare requires a uniform source");
    const int n = ex.params->order();
    const auto M = static_cast<int>(r.integer(root, "M", std::nullopt, 2));
    const auto N = static_cast<int>(r.integer(root, "N", std::nullopt, n));
    const auto trials = static_cast<int>(r.integer(root, "trials"));
    ComparisonOptions copts;
    copts.threads = opts.threads;
    copts.baseline_rule = read_rule(r, root, "baseline_reps", "midpoint");
    if (r.has(root, "mode"))
    {
        const auto m = r.choice(root, "mode", {"coarse_n1", "coarse_general", "coarse_ninf"});
        copts.mode = m == "coarse_n1" ? CoarseMode::n1 : m == "coarse_ninf" ? CoarseMode::n_inf : CoarseMode::general;
    }
    const auto layout_name = r.choice(root, "layout", {"shift", "independent_rows", "rotated_iid"}, "rotated_iid");
    copts.layout = layout_name == "shift"              ? RegressorLayout::shift
                   : layout_name == "independent_rows" ? RegressorLayout::independent_rows
                                                       : RegressorLayout::rotated_iid;
    const auto dir = output_dir(opts);

    const auto table = run_comparison(*ex.params, ex.source.shape().hi(), M, N, trials, ex.seed, copts);
    ordered_json per_trial = ordered_json::array();
    CsvTable trials_csv({"trial", "bias_optimal", "bias_uniform", "error_optimal", "error_uniform"});
    for (std::size_t i = 0; i < table.per_trial.size(); ++i)
    {
        const auto &t = table.per_trial[i];
        per_trial.push_back({{"bias_optimal", t.bias_optimal},
                             {"bias_uniform", t.bias_uniform},
                             {"error_optimal", t.error_optimal},
                             {"error_uniform", t.error_uniform}});
        trials_csv.row(std::vector<std::string>{std::to_string(i), format_number(t.bias_optimal),
                                                format_number(t.bias_uniform), format_number(t.error_optimal),
                                                format_number(t.error_uniform)});
    }
    ordered_json j{{"config",
                    {{"seed", ex.seed},
                     {"theta", std::vector<double>(ex.params->theta.data(),
                                                   ex.params->theta.data() + ex.params->theta.size())},
                     {"kappa", ex.source.shape().hi()},
                     {"M", M},
                     {"N", N},
                     {"trials", trials},
                     {"mode", to_string(table.optimal->mode)},
                     {"baseline_reps", to_string(copts.baseline_rule)},
                     {"layout", layout_name}}},
                   {"optimal_quantizer", to_json(table.optimal->quantizer)},
                   {"baseline_quantizer", to_json(*table.baseline)},
                   {"warnings", warnings_json(table.optimal->warnings)},
                   {"per_trial", per_trial},
                   {"ratios", {{"bias_ratio", table.bias_ratio}, {"error_ratio", table.error_ratio}}}};
    write_json(dir / "comparison.json", j);
    announce(dir / "comparison.json");
    CsvTable summary({"n", "M", "N", "trials", "bias_ratio", "error_ratio"});
    summary.row(std::vector<double>{double(n), double(M), double(N), double(trials), table.bias_ratio,
                                    table.error_ratio});
    summary.write((dir / "comparison.csv").string());
    announce(dir / "comparison.csv");
    trials_csv.write((dir / "trials.csv").string());
    announce(dir / "trials.csv");
    std::cout << "bias_ratio " << format_number(table.bias_ratio) << ", error_ratio "
              << format_number(table.error_ratio) << '\n';
    return 0;
}

int cmd_bounds(const ConfigReader &r, const Options &opts)
{
    const Node root = r.root();
    r.expect_keys(root, {"command", "seed", "source", "model", "K_bits", "M_values", "beta1", "beta2", "sigma_w",
                         "coverage"});
    const auto ex = read_common(r, opts, true);
    const auto &f = ex.source.shape();
    const int n = ex.params->order();
    const auto spread = conditional_spread(f, n);

    BoundInputs in;
    in.sigma_phi1_sq = f.variance();
    in.eta = f.variance_of_square();
    in.n = n;
    in.beta1 = r.number(root, "beta1", 0.1);
    in.beta2 = r.number(root, "beta2", 0.1);
    if (!(in.beta1 > 0.0 && in.beta1 < 1.0))
        r.fail(root, "beta1", "must lie in (0, 1)");
    if (!(in.beta2 > 0.0 && in.beta2 < 1.0))
        r.fail(root, "beta2", "must lie in (0, 1)");
    if (in.beta1 + in.beta2 >= 1.0)
        r.fail(root, "beta2", "beta1 + beta2 must be below 1");
    in.sigma_w = r.number(root, "sigma_w", 0.0);
    if (in.sigma_w < 0.0)
        r.fail(root, "sigma_w", "must be non-negative");
    in.theta_tilde_1 = ex.basis.theta_tilde_1;
    const auto growth = tail_growth_test(f, spread);
    if (!growth.feasible)
        throw InfeasibleDesign("marginal case, companding support unbounded");
    in.D = growth.D;
    const double K = r.positive(root, "K_bits");
    const auto Ms = r.integers(root, "M_values", 2);
    const auto dir = output_dir(opts);

    const auto table = budget_tradeoff(K, Ms, in);
    CsvTable csv({"M", "N", "eps1", "eps2_quant", "eps2_noise", "product_quant", "product_noise", "feasible"});
    for (const auto &row : table.rows)
        csv.row(std::vector<std::string>{std::to_string(row.M), std::to_string(row.N), format_number(row.eps1),
                                         format_number(row.eps2_quant), format_number(row.eps2_noise),
                                         format_number(row.product_quant), format_number(row.product_noise),
                                         row.feasible ? "true" : "false"});
    csv.write((dir / "tradeoff.csv").string());
    announce(dir / "tradeoff.csv");

    ordered_json j{{"command", "bounds"},
                   {"K_bits", K},
                   {"sigma_phi1_sq", in.sigma_phi1_sq},
                   {"eta", in.eta},
                   {"D", in.D},
                   {"theta_tilde_1", in.theta_tilde_1},
                   {"quant_decreasing", table.quant_decreasing},
                   {"noise_increasing", table.noise_increasing}};
    if (auto cov = r.optional_object(root, "coverage"))
    {
        r.expect_keys(*cov, {"M", "N", "trials", "quantize", "layout"});
        CoverageConfig cfg;
        cfg.source = ex.source;
        cfg.theta = ex.params->theta;
        cfg.M = static_cast<int>(r.integer(*cov, "M", std::nullopt, 2));
        cfg.N = static_cast<int>(r.integer(*cov, "N", std::nullopt, n));
        cfg.beta1 = in.beta1;
        cfg.beta2 = in.beta2;
        cfg.sigma_w = in.sigma_w;
        cfg.quantize = r.boolean(*cov, "quantize", true);
        const auto layout = r.choice(*cov, "layout", {"shift", "independent_rows", "rotated_iid"}, "rotated_iid");
        cfg.layout = layout == "shift"              ? RegressorLayout::shift
                     : layout == "independent_rows" ? RegressorLayout::independent_rows
                                                    : RegressorLayout::rotated_iid;
        cfg.threads = opts.threads;
        const auto trials = static_cast<int>(r.integer(*cov, "trials"));
        const auto report = coverage_test(cfg, trials, ex.seed);
        j["coverage"] = {{"seed", ex.seed},
                         {"M", cfg.M},
                         {"N", cfg.N},
                         {"trials", report.trials},
                         {"target", report.target},
                         {"bound_quant", report.bound_quant},
                         {"bound_noise", report.bound_noise},
                         {"coverage_quant", report.coverage_quant},
                         {"coverage_noise", report.coverage_noise},
                         {"max_ratio_quant", report.max_ratio_quant},
                         {"max_ratio_noise", report.max_ratio_noise}};
    }
    write_json(dir / "bounds.json", j);
    announce(dir / "bounds.json");
    return 0;
}

int cmd_asymptotics(const ConfigReader &r, const Options &opts)
{
    const Node root = r.root();
    r.expect_keys(root, {"command", "M_prime", "first_checked", "every", "ratio_threshold"});
    const auto cells = static_cast<int>(r.integer(root, "M_prime", std::nullopt, 50));
    const auto first = static_cast<int>(r.integer(root, "first_checked", 100, 1));
    const auto every = static_cast<int>(r.integer(root, "every", 1, 1));
    const double threshold = r.positive(root, "ratio_threshold", 1e3);
    const auto dir = output_dir(opts);

    const auto seq = solve_n1(cells);
    const auto fit = asymptotic_fit(seq.psi_min, first);
    CsvTable csv({"M_prime", "psi_min", "ratio", "fit"});
    for (int j = 0; j < cells; j += every)
    {
        const auto i = static_cast<std::size_t>(j);
        const double ratio = j == 0 ? 0.0 : seq.ratios[i - 1];
        const double model = fit.C / ((j - fit.B) * (j - fit.B));
        csv.row(std::vector<double>{double(j + 1), seq.psi_min[i], ratio, model});
    }
    csv.write((dir / "asymptotics.csv").string());
    announce(dir / "asymptotics.csv");

    const double a = recurrence_coefficient();
    const int hi = cells - 1;
    const int lo = std::max(1, hi / 4);
    ordered_json j{{"command", "asymptotics"},
                   {"M_prime", cells},
                   {"C", fit.C},
                   {"B", fit.B},
                   {"C_theory", 4.0 / (a * a)},
                   {"recurrence_coefficient", a},
                   {"recurrence_deviation", fit.recurrence_deviation},
                   {"first_checked", fit.first_checked},
                   {"loglog_slope", loglog_slope(seq.psi_min, lo, hi)},
                   {"loglog_range", {lo, hi}},
                   {"ratio_threshold", threshold},
                   {"ratio_product_crossing", ratio_product_crossing(seq.ratios, threshold)}};
    write_json(dir / "fit.json", j);
    announce(dir / "fit.json");
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"quantid: optimal output quantizers for least-squares FIR identification"};
    Options opts;
    const std::map<std::string, int (*)(const ConfigReader &, const Options &)> commands = {
        {"design", cmd_design},     {"simulate", cmd_simulate},       {"compare", cmd_compare},
        {"bounds", cmd_bounds},     {"asymptotics", cmd_asymptotics},
    };
    app.add_option("command", opts.command, "design | simulate | compare | bounds | asymptotics")
        ->required()
        ->check(CLI::IsMember({"design", "simulate", "compare", "bounds", "asymptotics"}));
    app.add_option("--config", opts.config, "JSON experiment config")->required();
    app.add_option("--seed", opts.seed, "override the config seed");
    app.add_option("--threads", opts.threads, "worker threads (0 = hardware concurrency)");
    app.add_option("--out", opts.out, "output directory")->capture_default_str();
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config;
    }

    try
    {
        const ConfigReader reader(opts.config);
        return commands.at(opts.command)(reader, opts);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const InfeasibleDesign &e)
    {
        std::cerr << "infeasible design: " << e.what() << '\n';
        return exit_infeasible;
    }
    catch (const NumericFailure &e)
    {
        std::cerr << "numeric failure: " << e.what() << " (partial estimate " << format_number(e.partial())
                  << ")\n";
        return exit_numeric;
    }
    catch (const InvalidArgument &e)
    {
        std::cerr << "config error: " << opts.config << ": " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numeric;
    }
}
