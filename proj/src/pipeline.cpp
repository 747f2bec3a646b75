#include "gmc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gmc/error.hpp"
#include "gmc/numeric.hpp"
#include "gmc/svg.hpp"

namespace gmc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json to_json(const GmcReport& r, const std::string& model_name) {
    json j;
    j["model"] = model_name;
    j["gmc_g"] = r.gmc_g;
    j["gmc_s"] = {{"LQ", r.gmc_s[0]}, {"MQ", r.gmc_s[1]}, {"HQ", r.gmc_s[2]}};
    j["gmc_d"] = {{"LD", r.gmc_d[0]}, {"MD", r.gmc_d[1]}, {"HD", r.gmc_d[2]}};
    json bl;
    const char* names[3] = {"PLCC", "SRCC", "KRCC"};
    for (int i = 0; i < 3; ++i)
        bl[names[i]] = r.baselines[static_cast<std::size_t>(i)]
                           ? json(*r.baselines[static_cast<std::size_t>(i)])
                           : json(nullptr);
    j["baselines"] = bl;
    j["metric_mode"] = pair_mode_name(r.metric_mode);
    j["k_used"] = r.k_used;
    j["k_excluded"] = r.k_excluded;
    j["seed"] = r.seed;
    j["config_digest"] = r.config_digest;
    j["qs_range"] = {r.qs_range.lo, r.qs_range.hi};
    j["qd_range"] = {r.qd_range.lo, r.qd_range.hi};
    return j;
}

// Temp-file-then-rename so partial runs never leave corrupt artifacts.
void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(Errc::IoError, "cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) fail(Errc::IoError, "write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

std::string surface_csv(const CorrelationSurface& s) {
    std::string out = "qs,qd,value\n";
    for (int i = 0; i < s.grid_size; ++i) {
        for (int j = 0; j < s.grid_size; ++j) {
            out += format_double(s.qs_axis[static_cast<std::size_t>(i)]);
            out += ',';
            out += format_double(s.qd_axis[static_cast<std::size_t>(j)]);
            out += ',';
            out += format_double(s.value(i, j));
            out += '\n';
        }
    }
    return out;
}

std::string queries_csv(const std::vector<QueryPoint>& pts) {
    std::string out = "qs,qd,gamma\n";
    for (const auto& p : pts) {
        out += format_double(p.qs);
        out += ',';
        out += format_double(p.qd);
        out += ',';
        if (p.gamma) out += format_double(*p.gamma);
        out += '\n';
    }
    return out;
}

std::string sanitize_name(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (c == '/' || c == '\\' || c == ':') c = '_';
    return out;
}

} // namespace

const char* pair_mode_name(PairMode mode) {
    switch (mode) {
        case PairMode::PlccDiff: return "plcc";
        case PairMode::SrccRankDiff: return "srcc";
        case PairMode::KrccSign: return "krcc";
    }
    return "?";
}

const char* scheme_name(SamplingScheme scheme) {
    return scheme == SamplingScheme::Lhs ? "lhs" : "random";
}

const char* density_mode_name(DensityMode mode) {
    switch (mode) {
        case DensityMode::PerSampleKde: return "kde";
        case DensityMode::BinnedKernelSmoothed: return "binned";
        case DensityMode::RawBinned: return "raw";
    }
    return "?";
}

DensityMode resolve_density_mode(const GmcOptions& opt, const Dataset& ds) {
    if (opt.density_mode) return *opt.density_mode;
    if (!opt.kernel_smoothing) return DensityMode::RawBinned;
    return ds.sigma_column_present() ? DensityMode::PerSampleKde
                                     : DensityMode::BinnedKernelSmoothed;
}

Range resolve_qs_range(const GmcOptions& opt, const Dataset& ds) {
    if (opt.qs_range) return *opt.qs_range;
    return Range{ds.mos_min(), ds.mos_max()};
}

Range resolve_qd_range(const GmcOptions& opt, const Dataset& ds) {
    if (opt.qd_range) return *opt.qd_range;
    return Range{0.0, ds.mos_max() - ds.mos_min()};
}

std::string options_digest(const GmcOptions& opt) {
    std::ostringstream s;
    s << "mode=" << pair_mode_name(opt.mode) << ";k=" << opt.k << ";bins=" << opt.bins
      << ";grid=" << opt.grid << ";h=" << format_double(opt.density_bandwidth)
      << ";phi=" << format_double(opt.dispersion_phi)
      << ";smooth=" << (opt.kernel_smoothing ? 1 : 0) << ";sampler=" << scheme_name(opt.sampler)
      << ";seed=" << opt.seed;
    auto range = [&](const char* name, const std::optional<Range>& r) {
        s << ";" << name << "=";
        if (r) s << format_double(r->lo) << ":" << format_double(r->hi);
        else s << "auto";
    };
    range("qs", opt.qs_range);
    range("qd", opt.qd_range);
    s << ";pd=" << (opt.pd_convention == PdConvention::Doubled ? "doubled" : "printed");
    s << ";density=" << (opt.density_mode ? density_mode_name(*opt.density_mode) : "auto");
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(s.str())));
    return buf;
}

GmcResult compute_gmc(const Dataset& ds, const GmcOptions& opt) {
    if (opt.k < 1) fail(Errc::ConfigError, "K must be positive");
    if (opt.grid < 1) fail(Errc::ConfigError, "grid size must be positive");
    if (!(opt.dispersion_phi > 0.0)) fail(Errc::ConfigError, "phi must be positive");

    const Dataset eval_ds = ds.with_estimated_sigmas(opt.dispersion_phi);
    const Range qs_range = resolve_qs_range(opt, eval_ds);
    const Range qd_range = resolve_qd_range(opt, eval_ds);
    const DensityMode dmode = resolve_density_mode(opt, eval_ds);

    const DensityModel dm =
        DensityModel::fit(eval_ds, dmode, opt.bins, opt.density_bandwidth);

    SamplePlan plan;
    plan.k = opt.k;
    plan.qs_range = qs_range;
    plan.qd_range = qd_range;
    plan.scheme = opt.sampler;
    plan.seed = opt.seed;
    auto queries = evaluate_queries(eval_ds, dm, sample_points(plan), opt.mode,
                                    opt.pd_convention);

    GmcResult res;
    res.density_mode_used = dmode;
    res.queries = queries;
    res.surface = fit_surface(queries, qs_range, qd_range, opt.grid);

    if (res.surface.excluded_count * 10 > opt.k) {
        std::cerr << "gmc: warning: " << res.surface.excluded_count << " of " << opt.k
                  << " query points had degenerate weighted support and were excluded\n";
    }

    GmcReport& rep = res.report;
    rep.metric_mode = opt.mode;
    rep.seed = opt.seed;
    rep.config_digest = options_digest(opt);
    rep.qs_range = qs_range;
    rep.qd_range = qd_range;
    rep.k_used = static_cast<int>(res.surface.source_points.size());
    rep.k_excluded = res.surface.excluded_count;

    rep.gmc_g = integrate(res.surface, Rect{qs_range, qd_range});
    const auto regions = region_partition(qs_range, qd_range);
    for (int i = 0; i < 3; ++i) {
        rep.gmc_s[static_cast<std::size_t>(i)] = integrate(res.surface, regions.quality[static_cast<std::size_t>(i)]);
        rep.gmc_d[static_cast<std::size_t>(i)] = integrate(res.surface, regions.difference[static_cast<std::size_t>(i)]);
    }

    rep.baselines[0] = classical_correlation(eval_ds, PairMode::PlccDiff);
    rep.baselines[1] = classical_correlation(eval_ds, PairMode::SrccRankDiff);
    rep.baselines[2] = classical_correlation(eval_ds, PairMode::KrccSign);
    return res;
}

std::vector<std::pair<std::string, GmcReport>> run_gmc(const RunConfig& config) {
    if (config.inputs.empty()) fail(Errc::ConfigError, "at least one --input is required");
    if (config.output_dir.empty()) fail(Errc::ConfigError, "an output directory is required");

    std::vector<std::pair<std::string, Dataset>> models;
    models.reserve(config.inputs.size());
    for (const auto& in : config.inputs) {
        models.emplace_back(in.name,
                            load_scores(in.path, detect_format(in.path), config.scale_override));
    }

    // Surfaces are only comparable over one shared MOS column.
    const Dataset& first = models.front().second;
    for (std::size_t m = 1; m < models.size(); ++m) {
        const Dataset& other = models[m].second;
        if (other.size() != first.size())
            fail(Errc::ConfigError, "input '" + models[m].first + "' has " +
                                        std::to_string(other.size()) + " rows but '" +
                                        models.front().first + "' has " +
                                        std::to_string(first.size()));
        for (std::size_t i = 0; i < first.size(); ++i) {
            if (first.mos()[i] != other.mos()[i]) {
                fail(Errc::ConfigError,
                     "MOS mismatch at data row " + std::to_string(i + 1) + ": '" +
                         models.front().first + "' has " + format_double(first.mos()[i]) +
                         " but '" + models[m].first + "' has " + format_double(other.mos()[i]));
            }
        }
    }

    fs::create_directories(config.output_dir);

    std::vector<std::pair<std::string, GmcReport>> reports;
    for (const auto& [name, ds] : models) {
        GmcResult res = compute_gmc(ds, config.options);
        const fs::path dir = fs::path(config.output_dir) / sanitize_name(name);
        fs::create_directories(dir);
        write_atomic(dir / "report.json", to_json(res.report, name).dump(2) + "\n");
        write_atomic(dir / "surface.csv", surface_csv(res.surface));
        write_atomic(dir / "queries.csv", queries_csv(res.queries));
        if (config.render_svg)
            write_atomic(dir / "surface.svg", surface_to_svg(res.surface, name));
        reports.emplace_back(name, std::move(res.report));
    }
    return reports;
}

AblationResult run_ablation_sampling(const Dataset& ds, const GmcOptions& base,
                                     const std::vector<int>& k_values,
                                     const std::vector<std::uint64_t>& seeds) {
    if (k_values.empty()) fail(Errc::ConfigError, "ablation needs at least one K value");
    if (seeds.empty()) fail(Errc::ConfigError, "ablation needs at least one seed");

    AblationResult out;
    for (SamplingScheme scheme : {SamplingScheme::Lhs, SamplingScheme::Random}) {
        for (int k : k_values) {
            std::vector<double> defined;
            for (std::uint64_t seed : seeds) {
                GmcOptions opt = base;
                opt.sampler = scheme;
                opt.k = k;
                opt.seed = seed;
                AblationRow row{scheme, k, seed, std::nullopt};
                row.gmc_g = compute_gmc(ds, opt).report.gmc_g;
                defined.push_back(*row.gmc_g);
                out.rows.push_back(row);
            }
            AblationSummaryRow s;
            s.scheme = scheme;
            s.k = k;
            s.runs = static_cast<int>(defined.size());
            s.mean_gmc_g = mean(defined);
            s.std_gmc_g = sample_stddev(defined);
            out.summary.push_back(s);
        }
    }
    return out;
}

std::vector<double> combine_scores(std::span<const double> a, std::span<const double> b,
                                   Polarity polarity_a, Polarity polarity_b) {
    if (a.size() != b.size())
        fail(Errc::LengthMismatch, "score columns have lengths " + std::to_string(a.size()) +
                                       " and " + std::to_string(b.size()));

    auto normalized = [](std::span<const double> v, Polarity pol) {
        const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
        const double mn = *mn_it, mx = *mx_it;
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double u = mx > mn ? (v[i] - mn) / (mx - mn) : 0.5;
            out[i] = pol == Polarity::LowerBetter ? 1.0 - u : u;
        }
        return out;
    };

    auto na = normalized(a, polarity_a);
    const auto nb = normalized(b, polarity_b);
    for (std::size_t i = 0; i < na.size(); ++i) na[i] += nb[i];
    return na;
}

} // namespace gmc
