#include "gmc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gmc/error.hpp"
#include "gmc/numeric.hpp"
#include "gmc/pipeline.hpp"
#include "gmc/rng.hpp"
#include "gmc/robustness.hpp"

namespace gmc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::vector<std::string> inputs;
    std::string metric = "srcc";
    int k = 100;
    int bins = 100;
    int grid = 50;
    std::uint64_t seed = 0;
    std::string sampler = "lhs";
    bool no_kernel_smoothing = false;
    double density_bandwidth = DensityModel::kDefaultBandwidth;
    double phi = 20.0;
    std::string qs_range, qd_range, mos_scale;
    std::string pd_convention = "printed";
    std::string density = "auto";
    std::string out_dir;
};

std::pair<double, double> parse_min_max(const std::string& text, const std::string& flag) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        fail(Errc::ConfigError, flag + " expects MIN:MAX, got '" + text + "'");
    try {
        const double lo = std::stod(text.substr(0, colon));
        const double hi = std::stod(text.substr(colon + 1));
        if (!(hi > lo)) fail(Errc::ConfigError, flag + ": MAX must exceed MIN");
        return {lo, hi};
    } catch (const std::invalid_argument&) {
        fail(Errc::ConfigError, flag + " expects numeric MIN:MAX, got '" + text + "'");
    } catch (const std::out_of_range&) {
        fail(Errc::ConfigError, flag + " values out of range: '" + text + "'");
    }
}

std::vector<ModelInput> parse_inputs(const std::vector<std::string>& raw) {
    std::vector<ModelInput> out;
    for (const auto& item : raw) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            out.push_back({fs::path(item).stem().string(), item});
        } else {
            ModelInput in{item.substr(0, eq), item.substr(eq + 1)};
            if (in.name.empty() || in.path.empty())
                fail(Errc::ConfigError, "--input expects NAME=PATH, got '" + item + "'");
            out.push_back(std::move(in));
        }
    }
    return out;
}

GmcOptions build_options(const CommonOpts& c) {
    GmcOptions opt;
    if (c.metric == "plcc") opt.mode = PairMode::PlccDiff;
    else if (c.metric == "srcc") opt.mode = PairMode::SrccRankDiff;
    else if (c.metric == "krcc") opt.mode = PairMode::KrccSign;
    else fail(Errc::ConfigError, "--metric must be plcc, srcc or krcc");

    opt.k = c.k;
    opt.bins = c.bins;
    opt.grid = c.grid;
    opt.seed = c.seed;
    opt.density_bandwidth = c.density_bandwidth;
    opt.dispersion_phi = c.phi;
    opt.kernel_smoothing = !c.no_kernel_smoothing;

    if (c.sampler == "lhs") opt.sampler = SamplingScheme::Lhs;
    else if (c.sampler == "random") opt.sampler = SamplingScheme::Random;
    else fail(Errc::ConfigError, "--sampler must be lhs or random");

    if (!c.qs_range.empty()) {
        const auto [lo, hi] = parse_min_max(c.qs_range, "--qs-range");
        opt.qs_range = Range{lo, hi};
    }
    if (!c.qd_range.empty()) {
        const auto [lo, hi] = parse_min_max(c.qd_range, "--qd-range");
        opt.qd_range = Range{lo, hi};
    }

    if (c.pd_convention == "printed") opt.pd_convention = PdConvention::Printed;
    else if (c.pd_convention == "doubled") opt.pd_convention = PdConvention::Doubled;
    else fail(Errc::ConfigError, "--pd-variance-convention must be printed or doubled");

    if (c.density == "kde") opt.density_mode = DensityMode::PerSampleKde;
    else if (c.density == "binned") opt.density_mode = DensityMode::BinnedKernelSmoothed;
    else if (c.density == "raw") opt.density_mode = DensityMode::RawBinned;
    else if (c.density != "auto")
        fail(Errc::ConfigError, "--density must be auto, kde, binned or raw");
    return opt;
}

std::optional<std::pair<double, double>> parse_scale(const CommonOpts& c) {
    if (c.mos_scale.empty()) return std::nullopt;
    return parse_min_max(c.mos_scale, "--mos-scale");
}

void write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(Errc::IoError, "cannot write '" + tmp + "'");
        out << content;
    }
    fs::rename(tmp, path);
}

std::vector<std::pair<std::string, Dataset>> load_models(
    const std::vector<ModelInput>& inputs, std::optional<std::pair<double, double>> scale) {
    if (inputs.empty()) fail(Errc::ConfigError, "at least one --input is required");
    std::vector<std::pair<std::string, Dataset>> models;
    for (const auto& in : inputs)
        models.emplace_back(in.name, load_scores(in.path, detect_format(in.path), scale));
    const auto& first = models.front();
    for (std::size_t m = 1; m < models.size(); ++m) {
        if (models[m].second.size() != first.second.size())
            fail(Errc::ConfigError, "input '" + models[m].first + "' row count differs from '" +
                                        first.first + "'");
        for (std::size_t i = 0; i < first.second.size(); ++i)
            if (models[m].second.mos()[i] != first.second.mos()[i])
                fail(Errc::ConfigError, "MOS mismatch at data row " + std::to_string(i + 1) +
                                            " between '" + first.first + "' and '" +
                                            models[m].first + "'");
    }
    return models;
}

std::vector<ResamplePlan> load_plans(const std::string& path, std::size_t n,
                                     std::uint64_t seed, std::size_t subset_override) {
    std::vector<ResamplePlan> plans = default_plans(n, seed);
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) fail(Errc::IoError, "cannot open plans file '" + path + "'");
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            fail(Errc::ConfigError, "invalid plans JSON: " + std::string(e.what()));
        }
        plans.clear();
        const std::size_t default_subset =
            doc.value("subset_size", std::min<std::size_t>(1000, n / 2));
        const bool replacement = doc.value("replacement", false);
        if (!doc.contains("plans") || !doc["plans"].is_array())
            fail(Errc::ConfigError, "plans file must contain a 'plans' array");
        std::size_t index = 0;
        for (const auto& p : doc["plans"]) {
            ResamplePlan plan;
            plan.name = p.value("name", "plan-" + std::to_string(index + 1));
            plan.subset_size = p.value("subset_size", default_subset);
            plan.replacement = p.value("replacement", replacement);
            plan.seed = p.contains("seed") ? p["seed"].get<std::uint64_t>()
                                           : Rng::derive(seed, index);
            if (!p.contains("modes") || !p["modes"].is_array())
                fail(Errc::ConfigError, "plan '" + plan.name + "' must contain a 'modes' array");
            for (const auto& m : p["modes"]) {
                GaussianMode mode;
                mode.center = m.value("center", 50.0);
                mode.width = m.value("width", 10.0);
                mode.weight = m.value("weight", 1.0);
                plan.modes.push_back(mode);
            }
            plans.push_back(std::move(plan));
            ++index;
        }
    }
    if (subset_override > 0)
        for (auto& p : plans) p.subset_size = subset_override;
    return plans;
}

int cmd_eval(const CommonOpts& c, bool render_svg) {
    RunConfig cfg;
    cfg.inputs = parse_inputs(c.inputs);
    cfg.options = build_options(c);
    cfg.scale_override = parse_scale(c);
    cfg.output_dir = c.out_dir;
    cfg.render_svg = render_svg;
    const auto reports = run_gmc(cfg);
    for (const auto& [name, rep] : reports) {
        std::cout << name << ": GMC_g=" << format_double(rep.gmc_g);
        if (rep.baselines[1]) std::cout << " SRCC=" << format_double(*rep.baselines[1]);
        std::cout << " (k_used=" << rep.k_used << ", excluded=" << rep.k_excluded << ")\n";
    }
    return 0;
}

int cmd_robustness(const CommonOpts& c, const std::string& plans_path,
                   std::size_t subset_size) {
    if (c.out_dir.empty()) fail(Errc::ConfigError, "--out is required");
    const auto models = load_models(parse_inputs(c.inputs), parse_scale(c));
    const auto plans =
        load_plans(plans_path, models.front().second.size(), c.seed, subset_size);
    const auto rep = run_protocol(models, plans, build_options(c));

    fs::create_directories(c.out_dir);
    std::string rows = "subset,plan,model,srcc,gmc_g\n";
    for (std::size_t p = 0; p < rep.plan_names.size(); ++p) {
        for (std::size_t m = 0; m < rep.model_names.size(); ++m) {
            const auto& cell = rep.cells[p][m];
            rows += std::to_string(p + 1) + ',' + rep.plan_names[p] + ',' + rep.model_names[m] +
                    ',';
            if (cell.srcc) rows += format_double(*cell.srcc);
            rows += ',';
            if (cell.gmc_g) rows += format_double(*cell.gmc_g);
            rows += '\n';
        }
    }
    write_file((fs::path(c.out_dir) / "robustness.csv").string(), rows);

    std::string summary = "model,mean_srcc,std_srcc,mean_gmc_g,std_gmc_g\n";
    for (std::size_t m = 0; m < rep.model_names.size(); ++m) {
        const auto& d = rep.dispersion[m];
        summary += rep.model_names[m] + ',' + format_double(d.mean_srcc) + ',' +
                   format_double(d.std_srcc) + ',' + format_double(d.mean_gmc_g) + ',' +
                   format_double(d.std_gmc_g) + '\n';
        std::cout << rep.model_names[m] << ": std(SRCC)=" << format_double(d.std_srcc)
                  << " std(GMC_g)=" << format_double(d.std_gmc_g) << "\n";
    }
    write_file((fs::path(c.out_dir) / "robustness_summary.csv").string(), summary);
    return 0;
}

int cmd_ablation(const CommonOpts& c, const std::vector<int>& k_values,
                 std::vector<std::uint64_t> seeds, int num_seeds) {
    if (c.out_dir.empty()) fail(Errc::ConfigError, "--out is required");
    const auto inputs = parse_inputs(c.inputs);
    if (inputs.size() != 1)
        fail(Errc::ConfigError, "ablation expects exactly one --input");
    const Dataset ds = load_scores(inputs[0].path, detect_format(inputs[0].path), parse_scale(c));

    if (seeds.empty()) {
        if (num_seeds < 1) fail(Errc::ConfigError, "--num-seeds must be positive");
        for (int i = 0; i < num_seeds; ++i) seeds.push_back(c.seed + static_cast<std::uint64_t>(i));
    }
    const auto res = run_ablation_sampling(ds, build_options(c), k_values, seeds);

    fs::create_directories(c.out_dir);
    std::string rows = "scheme,k,seed,gmc_g\n";
    for (const auto& r : res.rows) {
        rows += std::string(scheme_name(r.scheme)) + ',' + std::to_string(r.k) + ',' +
                std::to_string(r.seed) + ',';
        if (r.gmc_g) rows += format_double(*r.gmc_g);
        rows += '\n';
    }
    write_file((fs::path(c.out_dir) / "ablation.csv").string(), rows);

    std::string summary = "scheme,k,mean_gmc_g,std_gmc_g,runs\n";
    for (const auto& s : res.summary) {
        summary += std::string(scheme_name(s.scheme)) + ',' + std::to_string(s.k) + ',' +
                   format_double(s.mean_gmc_g) + ',' + format_double(s.std_gmc_g) + ',' +
                   std::to_string(s.runs) + '\n';
    }
    write_file((fs::path(c.out_dir) / "ablation_summary.csv").string(), summary);
    std::cout << "wrote " << res.rows.size() << " ablation rows to " << c.out_dir << "\n";
    return 0;
}

Polarity parse_polarity(const std::string& s, const char* flag) {
    if (s == "higher") return Polarity::HigherBetter;
    if (s == "lower") return Polarity::LowerBetter;
    fail(Errc::ConfigError, std::string(flag) + " must be higher or lower");
}

int cmd_combine(const std::string& path_a, const std::string& path_b, const std::string& pol_a,
                const std::string& pol_b, const std::string& out_path,
                const CommonOpts& c) {
    const Dataset a = load_scores(path_a, detect_format(path_a), parse_scale(c));
    const Dataset b = load_scores(path_b, detect_format(path_b), parse_scale(c));
    const auto combined = combine_scores(a.preds(), b.preds(), parse_polarity(pol_a, "--polarity-a"),
                                         parse_polarity(pol_b, "--polarity-b"));
    std::string out = "id,pred,mos\n";
    for (std::size_t i = 0; i < combined.size(); ++i) {
        out += a.samples()[i].id + ',' + format_double(combined[i]) + ',' +
               format_double(a.mos()[i]) + '\n';
    }
    write_file(out_path, out);
    std::cout << "wrote combined scores to " << out_path << "\n";
    return 0;
}

void add_common(CLI::App* cmd, CommonOpts& c, bool with_out_dir = true) {
    cmd->add_option("--input", c.inputs, "Score file as NAME=PATH (repeatable)");
    cmd->add_option("--metric", c.metric, "Correlation mode: plcc, srcc or krcc");
    cmd->add_option("--k", c.k, "Number of LHS query points");
    cmd->add_option("--bins", c.bins, "Density histogram bins");
    cmd->add_option("--grid", c.grid, "Surface grid resolution per axis");
    cmd->add_option("--seed", c.seed, "Random seed");
    cmd->add_option("--sampler", c.sampler, "Query sampling scheme: lhs or random");
    cmd->add_flag("--no-kernel-smoothing", c.no_kernel_smoothing,
                  "Use raw bin frequencies in the distribution regulator");
    cmd->add_option("--density-bandwidth", c.density_bandwidth,
                    "Gaussian bandwidth for binned density smoothing");
    cmd->add_option("--phi", c.phi, "Beta dispersion for estimated rating stddevs");
    cmd->add_option("--qs-range", c.qs_range, "Override MOS query range as MIN:MAX");
    cmd->add_option("--qd-range", c.qd_range, "Override |dMOS| query range as MIN:MAX");
    cmd->add_option("--mos-scale", c.mos_scale, "Raw MOS scale as MIN:MAX (default: empirical)");
    cmd->add_option("--pd-variance-convention", c.pd_convention,
                    "Pair-difference weight denominator: printed or doubled");
    cmd->add_option("--density", c.density, "Density estimator: auto, kde, binned or raw");
    if (with_out_dir) cmd->add_option("--out", c.out_dir, "Output directory");
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Granularity-modulated correlation evaluation for IQA score files"};
    app.require_subcommand(1);
    app.footer("Environment: GMC_THREADS caps worker threads.");

    CommonOpts ce, cr, ca, cc;

    auto* eval = app.add_subcommand("eval", "Evaluate models and emit GMC reports");
    bool render_svg = false;
    add_common(eval, ce);
    eval->add_flag("--render-svg", render_svg, "Also write a surface.svg heatmap");

    auto* rob = app.add_subcommand("robustness", "Gaussian-resampling robustness protocol");
    std::string plans_path;
    std::size_t subset_size = 0;
    add_common(rob, cr);
    rob->add_option("--plans", plans_path, "JSON file describing the nine resample plans");
    rob->add_option("--subset-size", subset_size, "Override the per-plan subset size");

    auto* abl = app.add_subcommand("ablation", "Sampling-size sweep (LHS vs random)");
    std::vector<int> k_values{10, 20, 50, 100, 200, 500, 1000};
    std::vector<std::uint64_t> seeds;
    int num_seeds = 20;
    add_common(abl, ca);
    abl->add_option("--k-values", k_values, "K values to sweep")->delimiter(',');
    abl->add_option("--seeds", seeds, "Explicit seed list")->delimiter(',');
    abl->add_option("--num-seeds", num_seeds, "Number of seeds (base --seed, consecutive)");

    auto* comb = app.add_subcommand("combine", "Linear score combination of two models");
    std::string path_a, path_b, pol_a = "higher", pol_b = "higher", out_file;
    add_common(comb, cc, false);
    comb->add_option("--a", path_a, "First score file")->required();
    comb->add_option("--b", path_b, "Second score file")->required();
    comb->add_option("--polarity-a", pol_a, "higher or lower (is better) for --a");
    comb->add_option("--polarity-b", pol_b, "higher or lower (is better) for --b");
    comb->add_option("--out", out_file, "Output CSV path")->required();

    try {
        app.parse(argc, const_cast<char**>(argv));
        if (eval->parsed()) {
            if (ce.out_dir.empty()) fail(Errc::ConfigError, "--out is required");
            return cmd_eval(ce, render_svg);
        }
        if (rob->parsed()) return cmd_robustness(cr, plans_path, subset_size);
        if (abl->parsed()) return cmd_ablation(ca, k_values, seeds, num_seeds);
        if (comb->parsed()) return cmd_combine(path_a, path_b, pol_a, pol_b, out_file, cc);
        fail(Errc::ConfigError, "no subcommand given");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "gmc: error: " << e.what() << "\n";
        return e.code() == Errc::ConfigError ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "gmc: error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace gmc
