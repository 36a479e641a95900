#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "netcom/report_io.hpp"

using namespace netcom;
using namespace netcom::report;
using netcom::sim::cplx;

namespace {

const pnc::MappingCatalog& catalog() {
    static const auto cat = pnc::offline_search();
    return cat;
}

struct Row {
    unsigned word, ue1, ue2;
    cplx point;
    unsigned ncv;
};

std::vector<Row> parse_constellation(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "word,ue1,ue2,re,im,ncv");
    std::vector<Row> rows;
    while (std::getline(is, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        Row r{};
        double re = 0.0, im = 0.0;
        ls >> r.word >> r.ue1 >> r.ue2 >> re >> im >> r.ncv;
        r.point = {re, im};
        rows.push_back(r);
    }
    return rows;
}

/// Greedy clustering of points closer than @p radius.
std::size_t clusters(const std::vector<Row>& rows, double radius) {
    std::vector<cplx> centres;
    for (const auto& r : rows) {
        bool found = false;
        for (const auto& c : centres) {
            found = found || std::abs(c - r.point) < radius;
        }
        if (!found) {
            centres.push_back(r.point);
        }
    }
    return centres.size();
}

}  // namespace

TEST(SerCsv, RoundTripIsExact) {
    sim::SerReport rep;
    const auto point = [](double ebno, std::uint64_t symbols, std::uint64_t errors, double ser, double ci, double base,
                          double fallback, double stall) {
        sim::SerPoint p;
        p.ebno_db = ebno;
        p.symbols = symbols;
        p.errors = errors;
        p.ser = ser;
        p.ci_halfwidth = ci;
        p.baseline_ser = base;
        p.fallback_rate = fallback;
        p.stall_rate = stall;
        return p;
    };
    rep.points.push_back(point(0.0, 1920, 1500, 1500.0 / 1920.0, 0.0183, 0.3, 0.1, 0.2));
    rep.points.push_back(point(12.5, 192000, 17, 17.0 / 192000.0, 4.2e-5, 1.0 / 3.0, 0.0, 0.0));
    rep.points.push_back(point(20.0, 1920, 1920, std::nan(""), std::nan(""), 0.01, 0.0, 0.75));
    std::ostringstream os;
    write_ser_csv(os, rep);
    std::istringstream is(os.str());
    const auto back = read_ser_csv(is);
    ASSERT_EQ(back.points.size(), 3U);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& a = rep.points[i];
        const auto& b = back.points[i];
        EXPECT_EQ(a.ebno_db, b.ebno_db);
        EXPECT_EQ(a.symbols, b.symbols);
        EXPECT_EQ(a.errors, b.errors);
        EXPECT_EQ(std::bit_cast<std::uint64_t>(a.ser), std::bit_cast<std::uint64_t>(b.ser));
        EXPECT_EQ(a.baseline_ser, b.baseline_ser);
        EXPECT_EQ(a.fallback_rate, b.fallback_rate);
        EXPECT_EQ(a.stall_rate, b.stall_rate);
    }
    EXPECT_TRUE(back.points[2].aborted);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "ebno_db,symbols,errors,ser,ci_halfwidth,baseline_ser,fallback_rate,stall_rate");
}

TEST(SerCsv, SimulatedReportRoundTripsThroughFile) {
    sim::SimConfig cfg;
    cfg.ebno = {5.0, 15.0};
    cfg.trials = 20;
    const auto rep = sim::run_ser_sweep(catalog(), cfg);
    const std::string path = ::testing::TempDir() + "ser.csv";
    export_report(rep, path);
    std::ifstream is(path);
    const auto back = read_ser_csv(is);
    ASSERT_EQ(back.points.size(), 2U);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back.points[i].ser, rep.points[i].ser);
        EXPECT_EQ(back.points[i].ci_halfwidth, rep.points[i].ci_halfwidth);
        EXPECT_EQ(back.points[i].errors, rep.points[i].errors);
    }
    EXPECT_THROW(export_report(rep, "/nonexistent-dir/x.csv"), std::system_error);
}

TEST(SerCsv, MalformedInput) {
    std::istringstream bad_header("ebno,ser\n1,2\n");
    EXPECT_THROW((void)read_ser_csv(bad_header), parse_error);
    std::istringstream short_row(std::string(ser_header) + "\n1,2,3\n");
    EXPECT_THROW((void)read_ser_csv(short_row), parse_error);
    std::istringstream bad_number(std::string(ser_header) + "\n1,2,3,x,0,0,0,0\n");
    EXPECT_THROW((void)read_ser_csv(bad_number), parse_error);
}

// AP1 at SFS 3 and AP2 at SFS 1 (mapping 11): 16 labelled points, AP2 sees 4 coded-vector classes.
TEST(ConstellationDump, LoggedCaseHasFourClassesAtAp2) {
    const auto& cat = catalog();
    const auto sel = pnc::online_select(pnc::SfsIndex{3}, pnc::SfsIndex{1}, cat);
    EXPECT_EQ(sel.index.value, 11);
    std::ostringstream os;
    write_constellation_csv(os, 1.0, cat.sfs.value(pnc::SfsIndex{1}) + cplx(0.3, -0.2), sel.ap2);
    const auto rows = parse_constellation(os.str());
    ASSERT_EQ(rows.size(), 16U);
    std::set<unsigned> ncvs;
    for (const auto& r : rows) {
        ncvs.insert(r.ncv);
        EXPECT_EQ(r.word, (r.ue1 << 2) | r.ue2);
    }
    EXPECT_EQ(ncvs.size(), 4U);
}

// Cluster counts of the superimposed points at each SFS (radius 0.05 on unit-power 4-QAM).
TEST(ConstellationDump, ClusterCountsPerSfs) {
    const auto& cat = catalog();
    const std::size_t expected[] = {4, 12, 9, 9, 12};
    for (int l = 1; l <= 5; ++l) {
        std::ostringstream os;
        write_constellation_csv(os, 1.0, cat.sfs.value(pnc::SfsIndex{l}), cat.entry(pnc::SfsIndex{l}, pnc::SfsIndex{l}).ap2());
        EXPECT_EQ(clusters(parse_constellation(os.str()), 0.05), expected[l - 1]) << "SFS " << l;
    }
}

TEST(ChannelDump, PerfectCsiRows) {
    sim::SimConfig cfg;
    cfg.channel = sim::FadingModel::fixed;
    const sim::TrialRunner runner(catalog(), cfg);
    sim::Rng rng(3);
    const auto fe = runner.front_end(30.0, rng);
    ASSERT_TRUE(fe.ap1.has_value());
    std::ostringstream os;
    write_channel_csv(os, 1, *fe.ap1);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "ap,carrier,freq_index,h1_re,h1_im,h2_re,h2_im,ratio_re,ratio_im");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        EXPECT_EQ(line.substr(0, 2), "1,");
    }
    EXPECT_EQ(rows, 32);
    EXPECT_NEAR(std::abs(fe.ap1->rcsi - cplx(0.6, 0.4)), 0.0, 1e-12);
}
