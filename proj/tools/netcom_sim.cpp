// Command-line driver: catalog build/check, SER and CoMP sweeps, dumps, protocol traces.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "netcom/netcom.hpp"

namespace {

using namespace netcom;

/// stdout unless --out names a file.
class Output {
  public:
    explicit Output(const std::string& path) : path_{path} {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw std::system_error(errno, std::generic_category(), "cannot open " + path);
            }
        }
    }
    std::ostream& stream() { return path_.empty() ? std::cout : file_; }
    void close() {
        stream().flush();
        if (!stream()) {
            throw std::system_error(errno, std::generic_category(), "write failed: " + (path_.empty() ? "stdout" : path_));
        }
    }

  private:
    std::string path_;
    std::ofstream file_;
};

int catalog_check(const pnc::MappingCatalog& cat) {
    const auto fresh = pnc::offline_search();
    int bad = 0;
    if (cat.sfs.size() != fresh.sfs.size()) {
        std::cerr << "sfs count " << cat.sfs.size() << ", search gives " << fresh.sfs.size() << '\n';
        return 1;
    }
    for (int i = 1; i <= static_cast<int>(cat.sfs.size()); ++i) {
        for (int j = 1; j <= static_cast<int>(cat.sfs.size()); ++j) {
            const pnc::SfsIndex si{i}, sj{j};
            const auto& e = cat.entry(si, sj);
            const auto& f = fresh.entry(si, sj);
            std::vector<std::string> issues, notes;
            if (gf2::rank(e.combined) != 4) {
                issues.emplace_back("rank " + std::to_string(gf2::rank(e.combined)));
            }
            if (!pnc::approx_equal(e.dmin_ap1, f.dmin_ap1, 1e-9) || !pnc::approx_equal(e.dmin_ap2, f.dmin_ap2, 1e-9)) {
                issues.emplace_back("dmin differs from search");
            }
            // no rank-4 completion resolves every pair, so these are reported but not fatal
            if (!pnc::resolves_sfs(cat.sfs.value(si), e.ap1(), cat.tolerance)) {
                notes.emplace_back("top half leaves sfs " + std::to_string(i) + " unresolved");
            }
            if (!pnc::resolves_sfs(cat.sfs.value(sj), e.ap2(), cat.tolerance)) {
                notes.emplace_back("bottom half leaves sfs " + std::to_string(j) + " unresolved");
            }
            std::cout << "M " << i << ' ' << j << ' ' << (issues.empty() ? "ok" : "FAIL");
            for (const auto& s : issues) {
                std::cout << "; " << s;
            }
            for (const auto& s : notes) {
                std::cout << "; note: " << s;
            }
            std::cout << '\n';
            bad += !issues.empty();
        }
    }
    std::cout << bad << " of " << cat.table.size() << " entries failed\n";
    return bad == 0 ? 0 : 1;
}

void print_diagnostics(const sim::SerReport& rep) {
    for (const auto& p : rep.points) {
        std::cerr << "ebno " << p.ebno_db << " dB: trials " << p.trials;
        if (!std::isnan(p.ser_ue1)) {
            std::cerr << ", ser_ue1 " << p.ser_ue1 << ", ser_ue2 " << p.ser_ue2;
        }
        if (!p.diagnostic.empty()) {
            std::cerr << " [" << p.diagnostic << ']';
        }
        std::cerr << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-AP physical-layer network coding simulator"};
    app.require_subcommand(1);

    auto* catalog = app.add_subcommand("catalog", "build or check the mapping catalog");
    catalog->require_subcommand(1);
    std::string catalog_out, catalog_in;
    auto* build = catalog->add_subcommand("build", "run the offline search and write the catalog");
    build->add_option("--out", catalog_out, "output path (default stdout)");
    auto* check = catalog->add_subcommand("check", "validate a catalog file against the search");
    check->add_option("--in", catalog_in, "catalog file")->required();

    sim::SimConfig cfg;
    config::SimFlags ser_flags, comp_flags, cons_flags, chan_flags, trace_flags;
    auto* ser = app.add_subcommand("ser", "PNC symbol error rate sweep");
    ser->require_subcommand(1);
    auto* ser_run = ser->add_subcommand("run", "run the sweep, CSV to --out or stdout");
    config::add_sim_flags(*ser_run, ser_flags);
    auto* comp = app.add_subcommand("comp", "joint-reception baseline sweep");
    comp->require_subcommand(1);
    auto* comp_run = comp->add_subcommand("run", "run the sweep, CSV to --out or stdout");
    config::add_sim_flags(*comp_run, comp_flags);

    auto* dump = app.add_subcommand("dump", "constellation and channel dumps");
    dump->require_subcommand(1);
    auto* cons = dump->add_subcommand("constellation", "superimposed points of one AP with their coded vectors");
    config::add_sim_flags(*cons, cons_flags);
    int cons_ap = 2;
    std::optional<int> cons_mapping;
    cons->add_option("--ap", cons_ap, "AP whose gains (--h1 or --h2) are used")->check(CLI::IsMember({1, 2}));
    cons->add_option("--mapping", cons_mapping, "mapping index 1..25 (default: nearest SFS at both APs)")->check(CLI::Range(1, 25));
    auto* chan = dump->add_subcommand("channels", "per-carrier channel knowledge of both APs for one frame");
    config::add_sim_flags(*chan, chan_flags);

    auto* trace = app.add_subcommand("trace", "backhaul protocol traces");
    trace->require_subcommand(1);
    auto* trace_round = trace->add_subcommand("round", "run frames through the protocol and print its event trace");
    config::add_sim_flags(*trace_round, trace_flags);
    int rounds = 1;
    trace_round->add_option("--rounds", rounds, "frames to run")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (build->parsed()) {
            const auto cat = pnc::offline_search();
            Output out(catalog_out);
            pnc::write_catalog(out.stream(), cat);
            out.close();
            return 0;
        }
        if (check->parsed()) {
            return catalog_check(pnc::import_catalog(catalog_in));
        }
        const auto cat = pnc::offline_search();
        if (ser_run->parsed() || comp_run->parsed()) {
            cfg = config::resolve(ser_run->parsed() ? ser_flags : comp_flags);
            const auto rep = ser_run->parsed() ? sim::run_ser_sweep(cat, cfg) : sim::run_comp_baseline(cat, cfg);
            Output out(cfg.out);
            report::write_ser_csv(out.stream(), rep);
            out.close();
            print_diagnostics(rep);
            return 0;
        }
        if (cons->parsed()) {
            cfg = config::resolve(cons_flags);
            const auto ratio = [&](const sim::GainPair& g) { return pnc::nearest_sfs(g.from_ue2 / g.from_ue1, cat.sfs); };
            const auto mapping = cons_mapping ? pnc::MappingIndex{*cons_mapping}
                                              : pnc::mapping_index(ratio(cfg.h_ap1), ratio(cfg.h_ap2));
            const auto [i, j] = pnc::sfs_pair(mapping);
            const auto sel = pnc::online_select(i, j, cat);
            const auto& g = cons_ap == 1 ? cfg.h_ap1 : cfg.h_ap2;
            std::cerr << "mapping " << mapping.value << " (sfs " << i.value << ", " << j.value << "), ap " << cons_ap << '\n';
            Output out(cfg.out);
            report::write_constellation_csv(out.stream(), g.from_ue1, g.from_ue2, cons_ap == 1 ? sel.ap1 : sel.ap2);
            out.close();
            return 0;
        }
        if (chan->parsed()) {
            cfg = config::resolve(chan_flags);
            const sim::TrialRunner runner(cat, cfg);
            sim::Rng rng(cfg.seed);
            const auto fe = runner.front_end(cfg.ebno.front(), rng);
            Output out(cfg.out);
            bool header = true;
            for (const auto& [ap, view] : {std::pair{1, &fe.ap1}, std::pair{2, &fe.ap2}}) {
                if (*view) {
                    report::write_channel_csv(out.stream(), ap, **view, 0, header);
                    header = false;
                    std::cerr << "ap " << ap << ": rcsi " << (*view)->rcsi << ", sfs " << (*view)->sfs.value << '\n';
                } else {
                    std::cerr << "ap " << ap << ": frame not detected\n";
                }
            }
            out.close();
            return 0;
        }
        if (trace_round->parsed()) {
            cfg = config::resolve(trace_flags);
            const sim::TrialRunner runner(cat, cfg);
            auto pcfg = cfg.protocol_config();
            pcfg.trace = true;
            protocol::Session session(cat, pcfg);
            sim::Rng rng(cfg.seed), net(cfg.seed + 1);
            Output out(cfg.out);
            for (int r = 0; r < rounds; ++r) {
                const auto res = runner.run_trial(cfg.ebno.front(), rng, net, session);
                std::cerr << "round " << r + 1 << ": " << protocol::to_string(res.outcome) << ", " << res.errors << " symbol errors\n";
            }
            for (const auto& line : session.trace()) {
                out.stream() << line << '\n';
            }
            out.close();
            return 0;
        }
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
