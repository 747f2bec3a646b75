#include "gmc/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmc/error.hpp"
#include "gmc/gcc.hpp"
#include "gmc/numeric.hpp"
#include "gmc/rng.hpp"

namespace gmc {

namespace {

void validate_plan(const ResamplePlan& plan, std::size_t n) {
    if (plan.modes.empty()) fail(Errc::ConfigError, "plan '" + plan.name + "' has no modes");
    double wsum = 0.0;
    for (const auto& m : plan.modes) {
        if (!(m.width > 0.0))
            fail(Errc::ConfigError, "plan '" + plan.name + "': mode width must be positive");
        if (m.weight < 0.0)
            fail(Errc::ConfigError, "plan '" + plan.name + "': mode weight must be nonnegative");
        wsum += m.weight;
    }
    if (std::fabs(wsum - 1.0) > 1e-9)
        fail(Errc::ConfigError, "plan '" + plan.name + "': mixture weights must sum to 1");
    if (plan.subset_size == 0)
        fail(Errc::ConfigError, "plan '" + plan.name + "': subset size must be positive");
    if (!plan.replacement && plan.subset_size > n)
        fail(Errc::SubsetTooLarge, "plan '" + plan.name + "': subset size " +
                                       std::to_string(plan.subset_size) + " exceeds dataset size " +
                                       std::to_string(n));
}

} // namespace

std::vector<double> selection_weights(std::span<const double> mos,
                                      std::span<const GaussianMode> modes) {
    std::vector<double> w(mos.size(), 0.0);
    for (const auto& m : modes) {
        if (m.weight == 0.0) continue;
        const double inv_two_w2 = 1.0 / (2.0 * m.width * m.width);
        for (std::size_t i = 0; i < mos.size(); ++i) {
            const double d = mos[i] - m.center;
            w[i] += m.weight * std::exp(-d * d * inv_two_w2);
        }
    }
    return w;
}

std::vector<std::size_t> draw_indices(std::span<const double> mos, const ResamplePlan& plan) {
    validate_plan(plan, mos.size());
    const auto w = selection_weights(mos, plan.modes);
    Rng rng(plan.seed);

    if (plan.replacement) {
        std::vector<double> cum(w.size());
        std::partial_sum(w.begin(), w.end(), cum.begin());
        const double total = cum.back();
        if (!(total > 0.0)) fail(Errc::ConfigError, "plan '" + plan.name + "': all weights are zero");
        std::vector<std::size_t> out(plan.subset_size);
        for (auto& idx : out) {
            const double x = rng.uniform01() * total;
            idx = static_cast<std::size_t>(
                std::lower_bound(cum.begin(), cum.end(), x) - cum.begin());
            if (idx >= w.size()) idx = w.size() - 1;
        }
        return out;
    }

    // Weighted sampling without replacement by exponential race: sample i
    // gets key Exp(1)/w_i; the subset is the smallest subset_size keys.
    struct Key {
        double key;
        std::size_t idx;
    };
    std::vector<Key> keys(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        double u;
        do {
            u = rng.uniform01();
        } while (u <= 0.0);
        const double e = -std::log(u);
        keys[i] = {w[i] > 0.0 ? e / w[i] : std::numeric_limits<double>::infinity(), i};
    }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.key != b.key) return a.key < b.key;
        return a.idx < b.idx;
    });
    std::vector<std::size_t> out(plan.subset_size);
    for (std::size_t i = 0; i < plan.subset_size; ++i) out[i] = keys[i].idx;
    std::sort(out.begin(), out.end());
    return out;
}

Dataset draw_subset(const Dataset& ds, const ResamplePlan& plan) {
    const auto idx = draw_indices(ds.mos(), plan);
    return ds.subset(idx);
}

std::vector<ResamplePlan> default_plans(std::size_t dataset_size, std::uint64_t seed) {
    const std::size_t subset = std::min<std::size_t>(1000, dataset_size / 2);
    std::vector<ResamplePlan> plans;
    auto add = [&](std::string name, std::vector<GaussianMode> modes) {
        ResamplePlan p;
        p.name = std::move(name);
        p.modes = std::move(modes);
        p.subset_size = subset;
        p.seed = Rng::derive(seed, plans.size());
        plans.push_back(std::move(p));
    };

    for (double c : {30.0, 50.0, 70.0})
        add("unimodal-" + std::to_string(static_cast<int>(c)), {{c, 10.0, 1.0}});

    const std::pair<double, double> pairs[3] = {{25, 75}, {20, 60}, {40, 80}};
    for (const auto& [c1, c2] : pairs)
        add("bimodal-" + std::to_string(static_cast<int>(c1)) + "-" +
                std::to_string(static_cast<int>(c2)),
            {{c1, 8.0, 0.5}, {c2, 8.0, 0.5}});

    const double third = 1.0 / 3.0;
    add("trimodal-equal", {{20, 7.0, third}, {50, 7.0, third}, {80, 7.0, third}});
    add("trimodal-low", {{20, 7.0, 0.5}, {50, 7.0, 0.25}, {80, 7.0, 0.25}});
    add("trimodal-high", {{20, 7.0, 0.25}, {50, 7.0, 0.25}, {80, 7.0, 0.5}});
    return plans;
}

RobustnessReport run_protocol(const std::vector<std::pair<std::string, Dataset>>& models,
                              const std::vector<ResamplePlan>& plans, const GmcOptions& opt) {
    if (models.empty()) fail(Errc::ConfigError, "robustness protocol needs at least one model");
    if (plans.size() != 9)
        fail(Errc::ConfigError,
             "robustness protocol needs exactly 9 plans, got " + std::to_string(plans.size()));

    const Dataset& parent = models.front().second;

    // All nine subsets integrate over the parent's ranges so GMC_g values
    // are comparable across subsets.
    GmcOptions sub_opt = opt;
    if (!sub_opt.qs_range) sub_opt.qs_range = resolve_qs_range(opt, parent);
    if (!sub_opt.qd_range) sub_opt.qd_range = resolve_qd_range(opt, parent);

    RobustnessReport rep;
    for (const auto& [name, unused] : models) rep.model_names.push_back(name);
    rep.cells.resize(plans.size());

    for (std::size_t p = 0; p < plans.size(); ++p) {
        rep.plan_names.push_back(plans[p].name);
        const auto idx = draw_indices(parent.mos(), plans[p]);
        rep.cells[p].resize(models.size());
        for (std::size_t m = 0; m < models.size(); ++m) {
            const Dataset sub = models[m].second.subset(idx);
            RobustnessCell cell;
            cell.srcc = classical_correlation(sub, PairMode::SrccRankDiff);
            cell.gmc_g = compute_gmc(sub, sub_opt).report.gmc_g;
            rep.cells[p][m] = cell;
        }
    }

    for (std::size_t m = 0; m < models.size(); ++m) {
        std::vector<double> srccs, gmcs;
        for (std::size_t p = 0; p < plans.size(); ++p) {
            if (rep.cells[p][m].srcc) srccs.push_back(*rep.cells[p][m].srcc);
            if (rep.cells[p][m].gmc_g) gmcs.push_back(*rep.cells[p][m].gmc_g);
        }
        ModelDispersion d;
        d.mean_srcc = mean(srccs);
        d.std_srcc = sample_stddev(srccs);
        d.mean_gmc_g = mean(gmcs);
        d.std_gmc_g = sample_stddev(gmcs);
        rep.dispersion.push_back(d);
    }
    return rep;
}

} // namespace gmc
