#include <gtest/gtest.h>

#include <cmath>

#include "netcom/sim.hpp"

using namespace netcom;
using namespace netcom::sim;

namespace {

const pnc::MappingCatalog& catalog() {
    static const auto cat = pnc::offline_search();
    return cat;
}

SimConfig small(std::vector<double> ebno, std::uint64_t trials) {
    SimConfig cfg;
    cfg.ebno = std::move(ebno);
    cfg.trials = trials;
    return cfg;
}

void expect_same(const SerReport& a, const SerReport& b) {
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        const auto& x = a.points[i];
        const auto& y = b.points[i];
        EXPECT_EQ(x.trials, y.trials);
        EXPECT_EQ(x.symbols, y.symbols);
        EXPECT_EQ(x.errors, y.errors);
        EXPECT_EQ(std::bit_cast<std::uint64_t>(x.ser), std::bit_cast<std::uint64_t>(y.ser));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(x.baseline_ser), std::bit_cast<std::uint64_t>(y.baseline_ser));
        EXPECT_EQ(x.stall_rate, y.stall_rate);
        EXPECT_EQ(x.fallback_rate, y.fallback_rate);
    }
}

}  // namespace

// Reference values from statsmodels proportion_confint(method="wilson").
TEST(Wilson, MatchesReference) {
    EXPECT_NEAR(wilson_halfwidth(10, 100), 0.059568262222119195, 1e-12);
    EXPECT_NEAR(wilson_halfwidth(0, 1000), 0.0019133792427775626, 1e-12);
    EXPECT_NEAR(wilson_halfwidth(200, 100000), 0.00027755813677166584, 1e-12);
    EXPECT_TRUE(std::isnan(wilson_halfwidth(0, 0)));
}

TEST(SimConfigTest, Validation) {
    SimConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.target_errors(), 200U);
    cfg.trials = 10;
    cfg.error_events = 10;
    EXPECT_THROW(cfg.validate(), argument_error);
    cfg = {};
    cfg.ebno.clear();
    EXPECT_THROW(cfg.validate(), argument_error);
    cfg = {};
    cfg.impairments.delay_max = 15;
    EXPECT_THROW(cfg.validate(), argument_error);
    cfg = {};
    cfg.impairments.cfo_max = 31250.0;
    EXPECT_THROW(cfg.validate(), argument_error);
    cfg = {};
    cfg.replication = 0;
    EXPECT_THROW(cfg.validate(), argument_error);
}

TEST(Sweep, NoiseFreeLimitIsErrorFree) {
    auto cfg = small({40.0}, 521);  // 100,032 symbols
    cfg.channel = FadingModel::fixed;
    const auto rep = run_ser_sweep(catalog(), cfg);
    ASSERT_EQ(rep.points.size(), 1U);
    EXPECT_GE(rep.points[0].symbols, 100000U);
    EXPECT_EQ(rep.points[0].errors, 0U);
    EXPECT_EQ(rep.points[0].baseline_ser, 0.0);
    EXPECT_EQ(rep.points[0].stall_rate, 0.0);
}

TEST(Sweep, GenieCsiAbsorbsImpairments) {
    auto cfg = small({40.0}, 100);
    cfg.channel = FadingModel::fixed;
    cfg.impairments.cfo = true;
    cfg.impairments.sco = true;
    cfg.impairments.cfo_max = 20000.0;
    const auto rep = run_ser_sweep(catalog(), cfg);
    EXPECT_EQ(rep.points[0].errors, 0U);
}

TEST(Sweep, EstimatedCsiRecoversImpairedLinks) {
    auto cfg = small({40.0}, 100);
    cfg.channel = FadingModel::fixed;
    cfg.csi = CsiMode::estimated;
    cfg.impairments.cfo = true;
    cfg.impairments.sco = true;
    const auto rep = run_ser_sweep(catalog(), cfg);
    EXPECT_EQ(rep.points[0].stall_rate, 0.0);
    EXPECT_LT(rep.points[0].ser, 1e-3);
    EXPECT_EQ(rep.points[0].baseline_ser, 0.0);
}

TEST(Sweep, DeterministicAndThreadIndependent) {
    auto cfg = small({5.0, 15.0}, 60);
    cfg.csi = CsiMode::estimated;
    cfg.impairments.cfo = true;
    cfg.loss = protocol::LossModel::uniform(0.3);
    cfg.replication = 1;
    cfg.threads = 1;
    const auto a = run_ser_sweep(catalog(), cfg);
    const auto b = run_ser_sweep(catalog(), cfg);
    cfg.threads = 3;
    const auto c = run_ser_sweep(catalog(), cfg);
    expect_same(a, b);
    expect_same(a, c);
    cfg.seed = 2;
    const auto d = run_ser_sweep(catalog(), cfg);
    EXPECT_NE(a.points[0].errors, d.points[0].errors);
}

TEST(Sweep, ConservationAndBounds) {
    auto cfg = small({10.0}, 37);
    cfg.burst = 5;
    const auto rep = run_ser_sweep(catalog(), cfg);
    const auto& p = rep.points[0];
    EXPECT_EQ(p.trials, 37U);
    EXPECT_EQ(p.symbols, 37U * 192U);
    EXPECT_LE(p.errors, p.symbols);
    EXPECT_GE(p.ser, 0.0);
    EXPECT_LE(p.ser, 1.0);
    EXPECT_GE(p.ser, std::max(p.ser_ue1, p.ser_ue2));
    EXPECT_LE(p.ser, p.ser_ue1 + p.ser_ue2 + 1e-15);
}

TEST(Sweep, EarlyStopping) {
    SimConfig cfg;
    cfg.ebno = {10.0};
    cfg.error_events = 500;
    cfg.min_trials = 20;
    const auto rep = run_ser_sweep(catalog(), cfg);
    const auto& p = rep.points[0];
    EXPECT_GE(p.errors, 500U);
    EXPECT_GE(p.trials, 20U);
    EXPECT_EQ(p.trials % cfg.burst, 0U);
    EXPECT_LT(p.errors, 500U + 10U * 192U);
    // bursts fold in index order, so the stopping point does not depend on the wave width
    cfg.threads = 1;
    const auto one = run_ser_sweep(catalog(), cfg);
    cfg.threads = 4;
    const auto four = run_ser_sweep(catalog(), cfg);
    expect_same(one, four);
    expect_same(one, rep);
}

TEST(Sweep, MonotoneAndOrdered) {
    auto cfg = small({0.0, 10.0, 20.0}, 150);
    const auto perfect = run_ser_sweep(catalog(), cfg);
    cfg.csi = CsiMode::estimated;
    const auto estimated = run_ser_sweep(catalog(), cfg);
    for (std::size_t i = 0; i < perfect.points.size(); ++i) {
        const auto& p = perfect.points[i];
        const auto& e = estimated.points[i];
        EXPECT_LE(p.baseline_ser, p.ser) << p.ebno_db;
        EXPECT_LE(p.ser, e.ser + e.ci_halfwidth) << p.ebno_db;
        if (i > 0) {
            const auto& q = perfect.points[i - 1];
            EXPECT_LE(p.ser - p.ci_halfwidth, q.ser + q.ci_halfwidth);
        }
    }
}

TEST(Sweep, HighStallPointIsAbortedAndSweepContinues) {
    auto cfg = small({10.0, 20.0}, 40);
    cfg.loss.ncs_data = 1.0;
    const auto rep = run_ser_sweep(catalog(), cfg);
    ASSERT_EQ(rep.points.size(), 2U);
    for (const auto& p : rep.points) {
        EXPECT_TRUE(p.aborted);
        EXPECT_TRUE(std::isnan(p.ser));
        EXPECT_EQ(p.stall_rate, 1.0);
        EXPECT_FALSE(p.diagnostic.empty());
        EXPECT_EQ(p.symbols, 40U * 192U);
    }
}

TEST(Sweep, LostRepliesUseFallback) {
    auto cfg = small({30.0}, 50);
    cfg.channel = FadingModel::fixed;
    cfg.loss.mapping_index = 0.5;
    cfg.replication = 1;
    cfg.burst = 50;
    const auto rep = run_ser_sweep(catalog(), cfg);
    EXPECT_GT(rep.points[0].fallback_rate, 0.0);
    EXPECT_FALSE(rep.points[0].aborted);
}

TEST(Comp, BaselineRunMatchesSweepColumn) {
    auto cfg = small({10.0}, 30);
    const auto pnc_run = run_ser_sweep(catalog(), cfg);
    const auto comp_run = run_comp_baseline(catalog(), cfg);
    EXPECT_EQ(comp_run.points[0].ser, pnc_run.points[0].baseline_ser);
    EXPECT_EQ(comp_run.points[0].baseline_ser, comp_run.points[0].ser);
}

TEST(Runner, TrialsSeeIdenticalChannelsInBothCsiModes) {
    SimConfig cfg;
    cfg.impairments = {true, 3700.0, true, 4, true};
    const TrialRunner perfect(catalog(), cfg);
    cfg.csi = CsiMode::estimated;
    const TrialRunner estimated(catalog(), cfg);
    Rng a(11), b(11);
    for (int i = 0; i < 20; ++i) {
        const auto x = perfect.draw_channels(a);
        const auto y = estimated.draw_channels(b);
        EXPECT_EQ(x.ap1_ue1, y.ap1_ue1);
        EXPECT_EQ(x.ap2_ue2, y.ap2_ue2);
        EXPECT_EQ(x.ap1_ue1.cfo, x.ap1_ue2.cfo);
        EXPECT_LE(std::abs(x.ap1_ue2.delay - x.ap1_ue1.delay), 5.0);
    }
}
