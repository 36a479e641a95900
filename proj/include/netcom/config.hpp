/**
 * @file config.hpp
 * @brief SimConfig from a JSON file and command-line flags. Precedence: flags > file > defaults.
 *
 * File keys mirror the flags:
 *
 *     {"ebno": [0, 5, 10] | "0:5:25", "trials": 1000 | "error_events": 200, "min_trials": 100,
 *      "max_trials": 50000, "csi": "perfect" | "estimated", "channel": "fixed" | "rayleigh",
 *      "h1": [[1, 0], [0.6, 0.4]], "h2": [[0.8, -0.3], [1, 0]],
 *      "impairments": {"cfo": true, "cfo_max": 3700, "delay": false, "delay_max": 4, "sco": false},
 *      "loss": 0.1 | {"sfs_index": 0.1, "mapping_index": 0.1, "ncs_data": 0.1},
 *      "replication": 4, "timeout": 1.0, "seed": 1, "out": "ser.csv", "burst": 10, "threads": 0}
 *
 * trials and error_events are alternatives: giving one at a higher precedence level drops the other
 * from lower levels; giving both at the same level is a usage error.
 */
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "netcom/error.hpp"
#include "netcom/sim.hpp"

namespace netcom::config {

using sim::SimConfig;
using sim::cplx;
using json = nlohmann::json;

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

inline std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string_view::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(" \t");
    return std::string(s.substr(a, b - a + 1));
}

inline double number(std::string_view key, const std::string& tok) {
    const auto t = trim(tok);
    double x = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || r.ec != std::errc{} || r.ptr != t.data() + t.size() || !std::isfinite(x)) {
        throw usage_error("malformed value for '" + std::string(key) + "': '" + tok + "' is not a number");
    }
    return x;
}

}  // namespace detail

/// "a:step:b" (inclusive range), "a,b,c" (list) or a single value.
[[nodiscard]] inline std::vector<double> parse_ebno(std::string_view text) {
    const std::string key = "ebno";
    if (text.find(':') != std::string_view::npos) {
        const auto parts = detail::split(text, ':');
        if (parts.size() != 3) {
            throw usage_error("malformed value for 'ebno': range must be start:step:stop");
        }
        const double a = detail::number(key, parts[0]);
        const double step = detail::number(key, parts[1]);
        const double b = detail::number(key, parts[2]);
        if (!(step > 0.0) || b < a) {
            throw usage_error("malformed value for 'ebno': need step > 0 and stop >= start");
        }
        const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
        if (n > 10000) {
            throw usage_error("malformed value for 'ebno': range has too many points");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i <= n; ++i) {
            out.push_back(a + static_cast<double>(i) * step);
        }
        return out;
    }
    std::vector<double> out;
    for (const auto& tok : detail::split(text, ',')) {
        out.push_back(detail::number(key, tok));
    }
    return out;
}

/// "re,im,re,im": gains from UE1 then UE2.
[[nodiscard]] inline sim::GainPair parse_gain_pair(std::string_view key, std::string_view text) {
    const auto parts = detail::split(text, ',');
    if (parts.size() != 4) {
        throw usage_error("malformed value for '" + std::string(key) + "': expected re,im,re,im");
    }
    return {{detail::number(key, parts[0]), detail::number(key, parts[1])}, {detail::number(key, parts[2]), detail::number(key, parts[3])}};
}

[[nodiscard]] inline sim::CsiMode parse_csi(std::string_view s) {
    if (s == "perfect") {
        return sim::CsiMode::perfect;
    }
    if (s == "estimated") {
        return sim::CsiMode::estimated;
    }
    throw usage_error("malformed value for 'csi': '" + std::string(s) + "' (perfect|estimated)");
}

[[nodiscard]] inline sim::FadingModel parse_channel(std::string_view s) {
    if (s == "fixed") {
        return sim::FadingModel::fixed;
    }
    if (s == "rayleigh" || s == "rayleigh_block") {
        return sim::FadingModel::rayleigh_block;
    }
    throw usage_error("malformed value for 'channel': '" + std::string(s) + "' (fixed|rayleigh)");
}

namespace detail {

template <typename T>
T get(const json& j, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!j.is_boolean()) {
                throw usage_error("");
            }
        } else if constexpr (std::is_arithmetic_v<T>) {
            if (!j.is_number()) {
                throw usage_error("");
            }
            if constexpr (std::is_unsigned_v<T>) {
                if (!j.is_number_unsigned()) {
                    throw usage_error("");
                }
            } else if constexpr (std::is_integral_v<T>) {
                if (!j.is_number_integer()) {
                    throw usage_error("");
                }
            }
        }
        return j.get<T>();
    } catch (const std::exception&) {
        throw usage_error("malformed value for '" + key + "': " + j.dump());
    }
}

inline cplx get_complex(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw usage_error("malformed value for '" + key + "': expected [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline sim::GainPair get_gain_pair(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2) {
        throw usage_error("malformed value for '" + key + "': expected [[re, im], [re, im]]");
    }
    return {get_complex(j[0], key), get_complex(j[1], key)};
}

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& prefix) {
    for (const auto& [k, v] : obj.items()) {
        if (std::find(known.begin(), known.end(), k) == known.end()) {
            throw usage_error("unknown config key '" + prefix + k + "'");
        }
    }
}

}  // namespace detail

/// Layers a parsed JSON object over @p base.
[[nodiscard]] inline SimConfig apply_json(SimConfig base, const json& j) {
    using detail::get;
    if (!j.is_object()) {
        throw usage_error("config must be a JSON object");
    }
    detail::reject_unknown(j,
                           {"ebno", "trials", "error_events", "min_trials", "max_trials", "csi", "channel", "h1", "h2", "impairments",
                            "loss", "replication", "timeout", "seed", "out", "burst", "threads"},
                           "");
    if (j.contains("trials") && j.contains("error_events")) {
        throw usage_error("conflicting keys 'trials' and 'error_events': give only one");
    }
    if (j.contains("ebno")) {
        const auto& e = j["ebno"];
        if (e.is_string()) {
            base.ebno = parse_ebno(e.get<std::string>());
        } else if (e.is_array()) {
            base.ebno.clear();
            for (const auto& x : e) {
                base.ebno.push_back(get<double>(x, "ebno"));
            }
        } else {
            throw usage_error("malformed value for 'ebno': " + e.dump());
        }
    }
    if (j.contains("trials")) {
        base.trials = get<std::uint64_t>(j["trials"], "trials");
        base.error_events.reset();
    }
    if (j.contains("error_events")) {
        base.error_events = get<std::uint64_t>(j["error_events"], "error_events");
        base.trials.reset();
    }
    if (j.contains("min_trials")) {
        base.min_trials = get<std::uint64_t>(j["min_trials"], "min_trials");
    }
    if (j.contains("max_trials")) {
        base.max_trials = get<std::uint64_t>(j["max_trials"], "max_trials");
    }
    if (j.contains("csi")) {
        base.csi = parse_csi(get<std::string>(j["csi"], "csi"));
    }
    if (j.contains("channel")) {
        base.channel = parse_channel(get<std::string>(j["channel"], "channel"));
    }
    if (j.contains("h1")) {
        base.h_ap1 = detail::get_gain_pair(j["h1"], "h1");
    }
    if (j.contains("h2")) {
        base.h_ap2 = detail::get_gain_pair(j["h2"], "h2");
    }
    if (j.contains("impairments")) {
        const auto& im = j["impairments"];
        if (!im.is_object()) {
            throw usage_error("malformed value for 'impairments': " + im.dump());
        }
        detail::reject_unknown(im, {"cfo", "cfo_max", "delay", "delay_max", "sco"}, "impairments.");
        if (im.contains("cfo")) {
            base.impairments.cfo = get<bool>(im["cfo"], "impairments.cfo");
        }
        if (im.contains("cfo_max")) {
            base.impairments.cfo_max = get<double>(im["cfo_max"], "impairments.cfo_max");
        }
        if (im.contains("delay")) {
            base.impairments.delay = get<bool>(im["delay"], "impairments.delay");
        }
        if (im.contains("delay_max")) {
            base.impairments.delay_max = get<int>(im["delay_max"], "impairments.delay_max");
        }
        if (im.contains("sco")) {
            base.impairments.sco = get<bool>(im["sco"], "impairments.sco");
        }
    }
    if (j.contains("loss")) {
        const auto& l = j["loss"];
        if (l.is_number()) {
            base.loss = protocol::LossModel::uniform(l.get<double>());
        } else if (l.is_object()) {
            detail::reject_unknown(l, {"sfs_index", "mapping_index", "ncs_data"}, "loss.");
            if (l.contains("sfs_index")) {
                base.loss.sfs_index = get<double>(l["sfs_index"], "loss.sfs_index");
            }
            if (l.contains("mapping_index")) {
                base.loss.mapping_index = get<double>(l["mapping_index"], "loss.mapping_index");
            }
            if (l.contains("ncs_data")) {
                base.loss.ncs_data = get<double>(l["ncs_data"], "loss.ncs_data");
            }
        } else {
            throw usage_error("malformed value for 'loss': " + l.dump());
        }
    }
    if (j.contains("replication")) {
        base.replication = get<int>(j["replication"], "replication");
    }
    if (j.contains("timeout")) {
        base.timeout = get<double>(j["timeout"], "timeout");
    }
    if (j.contains("seed")) {
        base.seed = get<std::uint64_t>(j["seed"], "seed");
    }
    if (j.contains("out")) {
        base.out = get<std::string>(j["out"], "out");
    }
    if (j.contains("burst")) {
        base.burst = get<std::uint64_t>(j["burst"], "burst");
    }
    if (j.contains("threads")) {
        base.threads = get<unsigned>(j["threads"], "threads");
    }
    return base;
}

[[nodiscard]] inline json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw usage_error(origin + ": invalid JSON: " + e.what());
    }
}

[[nodiscard]] inline json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw usage_error("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_json_text(ss.str(), path);
}

/// Raw flag values; an option counts as given when its CLI11 count is nonzero.
struct SimFlags {
    std::string config;
    std::string ebno;
    std::uint64_t trials = 0;
    std::uint64_t error_events = 0;
    std::string csi;
    std::string channel;
    std::string h1;
    std::string h2;
    double cfo_max = 0.0;
    int delay_max = 0;
    bool sco = false;
    double loss = 0.0;
    int replication = 0;
    double timeout = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    unsigned threads = 0;

    std::map<std::string, CLI::Option*> options;

    [[nodiscard]] bool given(const std::string& name) const {
        const auto it = options.find(name);
        return it != options.end() && it->second->count() > 0;
    }
};

/// Registers the simulation flags on @p app.
inline void add_sim_flags(CLI::App& app, SimFlags& f) {
    auto& o = f.options;
    o["config"] = app.add_option("--config", f.config, "JSON config file");
    o["ebno"] = app.add_option("--ebno", f.ebno, "Eb/N0 list a,b,c or range start:step:stop (dB)");
    o["trials"] = app.add_option("--trials", f.trials, "fixed trials (frames) per point");
    o["error-events"] = app.add_option("--error-events", f.error_events, "stop a point after this many symbol errors");
    o["csi"] = app.add_option("--csi", f.csi, "perfect|estimated");
    o["channel"] = app.add_option("--channel", f.channel, "fixed|rayleigh");
    o["h1"] = app.add_option("--h1", f.h1, "AP1 gains from UE1, UE2 as re,im,re,im (fixed channel)");
    o["h2"] = app.add_option("--h2", f.h2, "AP2 gains from UE1, UE2 as re,im,re,im (fixed channel)");
    o["cfo-max"] = app.add_option("--cfo-max", f.cfo_max, "carrier offset bound in Hz; > 0 enables the impairment");
    o["delay-max"] = app.add_option("--delay-max", f.delay_max, "UE2 delay bound in samples; > 0 enables the impairment");
    o["sco"] = app.add_flag("--sco", f.sco, "enable sub-sample timing offsets");
    o["loss"] = app.add_option("--loss", f.loss, "backhaul erasure probability per packet copy");
    o["replication"] = app.add_option("--replication", f.replication, "copies per backhaul packet");
    o["timeout"] = app.add_option("--timeout", f.timeout, "mapping reply timeout in seconds");
    o["seed"] = app.add_option("--seed", f.seed, "random seed");
    o["out"] = app.add_option("--out", f.out, "output path");
    o["threads"] = app.add_option("--threads", f.threads, "worker threads, 0 = all cores");
}

/// Defaults, then the config file, then flags; the result is validated.
[[nodiscard]] inline SimConfig resolve(const SimFlags& f) {
    SimConfig cfg;
    if (f.given("config")) {
        cfg = apply_json(cfg, load_json_file(f.config));
    }
    if (f.given("trials") && f.given("error-events")) {
        throw usage_error("conflicting flags --trials and --error-events: give only one");
    }
    if (f.given("ebno")) {
        cfg.ebno = parse_ebno(f.ebno);
    }
    if (f.given("trials")) {
        cfg.trials = f.trials;
        cfg.error_events.reset();
    }
    if (f.given("error-events")) {
        cfg.error_events = f.error_events;
        cfg.trials.reset();
    }
    if (f.given("csi")) {
        cfg.csi = parse_csi(f.csi);
    }
    if (f.given("channel")) {
        cfg.channel = parse_channel(f.channel);
    }
    if (f.given("h1")) {
        cfg.h_ap1 = parse_gain_pair("h1", f.h1);
    }
    if (f.given("h2")) {
        cfg.h_ap2 = parse_gain_pair("h2", f.h2);
    }
    if (f.given("cfo-max")) {
        cfg.impairments.cfo_max = f.cfo_max;
        cfg.impairments.cfo = f.cfo_max > 0.0;
    }
    if (f.given("delay-max")) {
        cfg.impairments.delay_max = f.delay_max;
        cfg.impairments.delay = f.delay_max > 0;
    }
    if (f.given("sco")) {
        cfg.impairments.sco = f.sco;
    }
    if (f.given("loss")) {
        cfg.loss = protocol::LossModel::uniform(f.loss);
    }
    if (f.given("replication")) {
        cfg.replication = f.replication;
    }
    if (f.given("timeout")) {
        cfg.timeout = f.timeout;
    }
    if (f.given("seed")) {
        cfg.seed = f.seed;
    }
    if (f.given("out")) {
        cfg.out = f.out;
    }
    if (f.given("threads")) {
        cfg.threads = f.threads;
    }
    try {
        cfg.validate();
    } catch (const argument_error& e) {
        throw usage_error(std::string("invalid configuration: ") + e.what());
    }
    return cfg;
}

}  // namespace netcom::config
