#include <doctest.h>

#include <cmath>

#include "gmc/error.hpp"
#include "gmc/pipeline.hpp"
#include "gmc/surface.hpp"
#include "oracle.hpp"

using namespace gmc;

namespace {

Dataset sigma5_dataset(std::vector<double> pred, std::vector<double> mos) {
    std::vector<Sample> samples(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        samples[i].id = "s" + std::to_string(i);
        samples[i].pred = pred[i];
        samples[i].mos = mos[i];
        samples[i].sigma = 5.0;
    }
    return Dataset(std::move(samples), {0.0, 100.0}, true);
}

std::vector<QueryPoint> constant_field(double value, int k = 30) {
    std::vector<QueryPoint> pts;
    Rng rng(555);
    for (int i = 0; i < k; ++i)
        pts.push_back({rng.uniform(0.0, 100.0), rng.uniform(0.0, 80.0), value});
    return pts;
}

} // namespace

TEST_CASE("perfect predictor evaluates to gamma 1 at any query") {
    Rng rng(21);
    std::vector<double> mos;
    for (int i = 0; i < 40; ++i) mos.push_back(rng.uniform(0.0, 100.0));
    const Dataset ds = sigma5_dataset(mos, mos);
    const auto dm = DensityModel::fit(ds, DensityMode::PerSampleKde);
    for (double qs : {10.0, 50.0, 90.0}) {
        for (double qd : {0.0, 20.0, 60.0}) {
            const auto pt = evaluate_query(ds, dm, {qs, qd, {}}, PairMode::SrccRankDiff);
            REQUIRE(pt.gamma.has_value());
            CHECK(*pt.gamma == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("hand-built four-sample query matches the longhand oracle") {
    const Dataset ds = sigma5_dataset({0.9, 0.4, 0.6, 0.2}, {80.0, 35.0, 55.0, 20.0});
    const auto dm = DensityModel::fit(ds, DensityMode::PerSampleKde);
    const std::vector<double> mos(ds.mos().begin(), ds.mos().end());
    const auto sigma = ds.sigmas_or_throw();
    std::vector<double> dens(mos.size());
    for (std::size_t i = 0; i < mos.size(); ++i) dens[i] = dm.density(mos[i]);

    for (PairMode mode : {PairMode::PlccDiff, PairMode::SrccRankDiff, PairMode::KrccSign}) {
        const std::vector<double> av(pair_basis_a(ds, mode).begin(), pair_basis_a(ds, mode).end());
        const std::vector<double> bv(pair_basis_b(ds, mode).begin(), pair_basis_b(ds, mode).end());
        const auto expected = oracle::gamma_brute(mos, sigma, dens, av, bv, mode, 50.0, 10.0);
        const auto got = evaluate_query(ds, dm, {50.0, 10.0, {}}, mode);
        REQUIRE(expected.has_value());
        REQUIRE(got.gamma.has_value());
        CHECK(std::fabs(*got.gamma - *expected) < 1e-12);
    }
}

TEST_CASE("random datasets match the longhand oracle at random queries") {
    Rng rng(123);
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset ds = oracle::random_dataset(rng, 25);
        const auto dm = DensityModel::fit(ds, DensityMode::PerSampleKde);
        const std::vector<double> mos(ds.mos().begin(), ds.mos().end());
        const auto sigma = ds.sigmas_or_throw();
        std::vector<double> dens(mos.size());
        for (std::size_t i = 0; i < mos.size(); ++i) dens[i] = dm.density(mos[i]);
        const std::vector<double> av(ds.pred_ranks().begin(), ds.pred_ranks().end());
        const std::vector<double> bv(ds.mos_ranks().begin(), ds.mos_ranks().end());

        for (int q = 0; q < 5; ++q) {
            const double qs = rng.uniform(0.0, 100.0);
            const double qd = rng.uniform(0.0, 80.0);
            const auto expected = oracle::gamma_brute(mos, sigma, dens, av, bv,
                                                      PairMode::SrccRankDiff, qs, qd);
            const auto got = evaluate_query(ds, dm, {qs, qd, {}}, PairMode::SrccRankDiff);
            REQUIRE(expected.has_value() == got.gamma.has_value());
            if (expected) CHECK(std::fabs(*got.gamma - *expected) < 1e-10);
        }
    }
}

TEST_CASE("doubled pd convention matches the oracle with a doubled denominator") {
    Rng rng(404);
    const Dataset ds = oracle::random_dataset(rng, 20);
    const auto dm = DensityModel::fit(ds, DensityMode::PerSampleKde);
    const std::vector<double> mos(ds.mos().begin(), ds.mos().end());
    const auto sigma = ds.sigmas_or_throw();
    std::vector<double> dens(mos.size());
    for (std::size_t i = 0; i < mos.size(); ++i) dens[i] = dm.density(mos[i]);
    const std::vector<double> av(ds.pred_ranks().begin(), ds.pred_ranks().end());
    const std::vector<double> bv(ds.mos_ranks().begin(), ds.mos_ranks().end());

    const auto expected = oracle::gamma_brute(mos, sigma, dens, av, bv, PairMode::SrccRankDiff,
                                              45.0, 15.0, 2.0);
    const auto got = evaluate_query(ds, dm, {45.0, 15.0, {}}, PairMode::SrccRankDiff,
                                    PdConvention::Doubled);
    REQUIRE(expected.has_value());
    REQUIRE(got.gamma.has_value());
    CHECK(std::fabs(*got.gamma - *expected) < 1e-12);
    // and it differs from the printed convention
    const auto printed = evaluate_query(ds, dm, {45.0, 15.0, {}}, PairMode::SrccRankDiff);
    CHECK(*got.gamma != *printed.gamma);
}

TEST_CASE("queries far outside the data support are Undefined") {
    std::vector<double> mos = {5.0, 10.0, 15.0, 20.0};
    std::vector<Sample> samples(4);
    for (std::size_t i = 0; i < 4; ++i) {
        samples[i] = {"s" + std::to_string(i), static_cast<double>(i), mos[i], 0.5,
                      SigmaSource::Provided};
    }
    const Dataset ds(std::move(samples), {0.0, 100.0}, true);
    const auto dm = DensityModel::fit(ds, DensityMode::PerSampleKde);
    const auto pt = evaluate_query(ds, dm, {100.0, 70.0, {}}, PairMode::SrccRankDiff);
    CHECK_FALSE(pt.gamma.has_value());
}

TEST_CASE("constant gamma field fits a constant surface") {
    const auto surf = fit_surface(constant_field(0.37), {0.0, 100.0}, {0.0, 80.0}, 20);
    for (double v : surf.grid) CHECK(v == doctest::Approx(0.37).epsilon(1e-9));
}

TEST_CASE("local linear regression reproduces an affine field") {
    SamplePlan plan;
    plan.k = 100;
    plan.qs_range = {0.0, 100.0};
    plan.qd_range = {0.0, 80.0};
    plan.seed = 7;
    auto pts = sample_points(plan);
    for (auto& p : pts) p.gamma = 0.3 + 0.002 * p.qs - 0.004 * p.qd;

    const auto surf = fit_surface(pts, plan.qs_range, plan.qd_range, 50);
    for (int i = 1; i < 49; ++i) {
        for (int j = 1; j < 49; ++j) {
            const double expected = 0.3 + 0.002 * surf.qs_axis[static_cast<std::size_t>(i)] -
                                    0.004 * surf.qd_axis[static_cast<std::size_t>(j)];
            CHECK(std::fabs(surf.value(i, j) - expected) < 1e-8);
        }
    }
}

TEST_CASE("five defined points are too few to fit") {
    auto pts = constant_field(0.5, 5);
    pts.push_back({50.0, 40.0, std::nullopt}); // sixth point undefined
    CHECK_THROWS_AS(fit_surface(pts, {0.0, 100.0}, {0.0, 80.0}, 10), Error);
}

TEST_CASE("undefined gammas are excluded and counted") {
    auto pts = constant_field(0.25, 12);
    pts.push_back({1.0, 1.0, std::nullopt});
    pts.push_back({2.0, 2.0, std::nullopt});
    const auto surf = fit_surface(pts, {0.0, 100.0}, {0.0, 80.0}, 8);
    CHECK(surf.excluded_count == 2);
    CHECK(surf.source_points.size() == 12);
}

TEST_CASE("integration of constant and affine surfaces is exact") {
    const auto surf = fit_surface(constant_field(0.42), {0.0, 100.0}, {0.0, 80.0}, 25);
    CHECK(integrate(surf, {{0.0, 100.0}, {0.0, 80.0}}) == doctest::Approx(0.42).epsilon(1e-9));
    CHECK(integrate(surf, {{13.0, 51.0}, {7.0, 33.0}}) == doctest::Approx(0.42).epsilon(1e-9));

    SamplePlan plan;
    plan.k = 120;
    plan.qs_range = {0.0, 100.0};
    plan.qd_range = {0.0, 80.0};
    plan.seed = 13;
    auto pts = sample_points(plan);
    for (auto& p : pts) p.gamma = 0.1 + 0.003 * p.qs - 0.002 * p.qd;
    const auto affine = fit_surface(pts, plan.qs_range, plan.qd_range, 50);
    // midpoint quadrature of an affine function equals the centroid value
    const double centroid = 0.1 + 0.003 * 50.0 - 0.002 * 40.0;
    CHECK(integrate(affine, {{0.0, 100.0}, {0.0, 80.0}}) ==
          doctest::Approx(centroid).epsilon(1e-6));
}

TEST_CASE("thirds tile the domain: regional means recover the global integral") {
    Rng rng(424);
    std::vector<QueryPoint> pts;
    for (int i = 0; i < 60; ++i) {
        QueryPoint p{rng.uniform(0.0, 99.0), rng.uniform(0.0, 60.0), {}};
        p.gamma = std::sin(p.qs / 17.0) * 0.4 + 0.2 * std::cos(p.qd / 9.0);
        pts.push_back(p);
    }
    const Range qs{0.0, 99.0}, qd{0.0, 60.0};
    const auto surf = fit_surface(pts, qs, qd, 50);
    const double global = integrate(surf, {qs, qd});
    const auto part = region_partition(qs, qd);
    double mean_s = 0, mean_d = 0;
    for (int i = 0; i < 3; ++i) {
        mean_s += integrate(surf, part.quality[static_cast<std::size_t>(i)]) / 3.0;
        mean_d += integrate(surf, part.difference[static_cast<std::size_t>(i)]) / 3.0;
    }
    CHECK(std::fabs(mean_s - global) < 1e-6);
    CHECK(std::fabs(mean_d - global) < 1e-6);
}

TEST_CASE("region partition splits both axes into exact thirds") {
    const auto part = region_partition({0.0, 99.0}, {0.0, 60.0});
    CHECK(part.quality[0].qs.lo == 0.0);
    CHECK(part.quality[0].qs.hi == doctest::Approx(33.0));
    CHECK(part.quality[1].qs.hi == doctest::Approx(66.0));
    CHECK(part.quality[2].qs.hi == 99.0);
    CHECK(part.difference[0].qd.hi == doctest::Approx(20.0));
    CHECK(part.difference[1].qd.hi == doctest::Approx(40.0));
    CHECK(part.difference[2].qd.hi == 60.0);
    // shared boundaries tile with zero gap/overlap
    CHECK(part.quality[0].qs.hi == part.quality[1].qs.lo);
    CHECK(part.quality[1].qs.hi == part.quality[2].qs.lo);
    for (int i = 0; i < 3; ++i) {
        CHECK(part.quality[static_cast<std::size_t>(i)].qd.lo == 0.0);
        CHECK(part.quality[static_cast<std::size_t>(i)].qd.hi == 60.0);
        CHECK(part.difference[static_cast<std::size_t>(i)].qs.hi == 99.0);
    }
}

TEST_CASE("grid values never leave [-1, 1]") {
    Rng rng(31337);
    std::vector<QueryPoint> pts;
    for (int i = 0; i < 40; ++i)
        pts.push_back({rng.uniform(0.0, 100.0), rng.uniform(0.0, 80.0),
                       rng.uniform(-1.0, 1.0)});
    const auto surf = fit_surface(pts, {0.0, 100.0}, {0.0, 80.0}, 30);
    for (double v : surf.grid) {
        CHECK(v <= 1.0);
        CHECK(v >= -1.0);
    }
}

TEST_CASE("empty integration region is an error") {
    const auto surf = fit_surface(constant_field(0.0), {0.0, 100.0}, {0.0, 80.0}, 10);
    CHECK_THROWS_AS(integrate(surf, {{50.0, 50.0}, {0.0, 80.0}}), Error);
}

TEST_CASE("full pipeline matches a straight-line brute-force run") {
    Rng rng(2025);
    for (int trial = 0; trial < 3; ++trial) {
        const Dataset ds = oracle::random_dataset(rng, 30);
        GmcOptions opt;
        opt.k = 10;
        opt.seed = 40 + static_cast<std::uint64_t>(trial);
        const auto res = compute_gmc(ds, opt);

        // Longhand recomputation of every query gamma.
        const std::vector<double> mos(ds.mos().begin(), ds.mos().end());
        const auto sigma = ds.sigmas_or_throw();
        std::vector<double> dens(mos.size());
        const auto dm = DensityModel::fit(ds, DensityMode::PerSampleKde);
        for (std::size_t i = 0; i < mos.size(); ++i) dens[i] = dm.density(mos[i]);
        const std::vector<double> av(ds.pred_ranks().begin(), ds.pred_ranks().end());
        const std::vector<double> bv(ds.mos_ranks().begin(), ds.mos_ranks().end());
        for (const auto& q : res.queries) {
            const auto expected = oracle::gamma_brute(mos, sigma, dens, av, bv,
                                                      PairMode::SrccRankDiff, q.qs, q.qd);
            REQUIRE(expected.has_value() == q.gamma.has_value());
            if (expected) CHECK(std::fabs(*q.gamma - *expected) < 1e-10);
        }
    }
}

TEST_CASE("monotone pred transform leaves rank/sign pipelines bit-identical") {
    Rng rng(55);
    const Dataset ds = oracle::random_dataset(rng, 60);
    std::vector<double> transformed(ds.preds().begin(), ds.preds().end());
    const double mx = *std::max_element(transformed.begin(), transformed.end());
    for (double& v : transformed) v = std::exp(v / mx);
    const Dataset ds2 = ds.with_preds(transformed);

    for (PairMode mode : {PairMode::SrccRankDiff, PairMode::KrccSign}) {
        GmcOptions opt;
        opt.mode = mode;
        opt.k = 25;
        opt.seed = 5;
        const auto a = compute_gmc(ds, opt);
        const auto b = compute_gmc(ds2, opt);
        REQUIRE(a.queries.size() == b.queries.size());
        for (std::size_t i = 0; i < a.queries.size(); ++i) {
            CHECK(a.queries[i].gamma.has_value() == b.queries[i].gamma.has_value());
            if (a.queries[i].gamma) CHECK(*a.queries[i].gamma == *b.queries[i].gamma);
        }
        CHECK(a.report.gmc_g == b.report.gmc_g);
        for (int r = 0; r < 3; ++r) {
            CHECK(a.report.gmc_s[static_cast<std::size_t>(r)] == b.report.gmc_s[static_cast<std::size_t>(r)]);
            CHECK(a.report.gmc_d[static_cast<std::size_t>(r)] == b.report.gmc_d[static_cast<std::size_t>(r)]);
        }
        CHECK(a.surface.grid == b.surface.grid);
    }
}
