/**
 * @file sim.hpp
 * @brief Monte Carlo SER sweeps of the full uplink: UE frames, access links, AP processing, backhaul
 * protocol, hub decode. A CoMP joint-ML receiver runs on the same draws as the baseline.
 *
 * Every trial sends one frame per UE: 6 data symbols x 32 data carriers = 192 joint words. A symbol error
 * is a recovered 4-bit word that differs from the transmitted one. Rounds that never reach the hub
 * (missed detection, lost packets) count all 192 words as errors.
 */
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "netcom/channel.hpp"
#include "netcom/error.hpp"
#include "netcom/ofdm.hpp"
#include "netcom/pnc.hpp"
#include "netcom/protocol.hpp"

namespace netcom::sim {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using Rng = std::mt19937_64;
using channel::FadingModel;
using channel::LinkChannel;
using pnc::SourceWord;

enum class CsiMode { perfect, estimated };

/// Gains seen by one AP from (UE1, UE2), used in fixed-channel mode.
struct GainPair {
    cplx from_ue1{1.0, 0.0};
    cplx from_ue2{1.0, 0.0};

    friend bool operator==(const GainPair&, const GainPair&) = default;
};

struct Impairments {
    bool cfo = false;
    double cfo_max = 3700.0;  ///< Hz; each AP draws its offset uniformly in [-max, max]
    bool delay = false;
    int delay_max = 4;  ///< samples; UE2's integer delay per AP, uniform in [-max, max]
    bool sco = false;   ///< fractional timing offset per link, uniform in [-0.5, 0.5] samples

    friend bool operator==(const Impairments&, const Impairments&) = default;
};

struct SimConfig {
    std::vector<double> ebno{0.0, 5.0, 10.0, 15.0, 20.0, 25.0};
    std::optional<std::uint64_t> trials;        ///< fixed trial count per point
    std::optional<std::uint64_t> error_events;  ///< stop a point at this many symbol errors
    std::uint64_t min_trials = 100;             ///< floor for early stopping
    std::uint64_t max_trials = 50000;           ///< ceiling for early stopping
    CsiMode csi = CsiMode::perfect;
    FadingModel channel = FadingModel::rayleigh_block;
    GainPair h_ap1{{1.0, 0.0}, {0.6, 0.4}};
    GainPair h_ap2{{0.8, -0.3}, {1.0, 0.0}};
    Impairments impairments;
    protocol::LossModel loss;
    int replication = 4;
    double timeout = 1.0;
    std::uint64_t seed = 1;
    std::string out;
    std::uint64_t burst = 10;  ///< trials per independently seeded batch
    unsigned threads = 0;      ///< 0 = hardware concurrency

    friend bool operator==(const SimConfig&, const SimConfig&) = default;

    static constexpr std::uint64_t default_error_events = 200;

    [[nodiscard]] std::uint64_t target_errors() const {
        return error_events.value_or(trials ? 0 : default_error_events);
    }

    [[nodiscard]] protocol::ProtocolConfig protocol_config() const {
        protocol::ProtocolConfig p;
        p.loss = loss;
        p.replication = replication;
        p.timeout = timeout;
        return p;
    }

    void validate() const {
        if (ebno.empty()) {
            throw argument_error("ebno sweep must not be empty");
        }
        for (double e : ebno) {
            if (!std::isfinite(e)) {
                throw argument_error("ebno values must be finite");
            }
        }
        if (trials && error_events) {
            throw argument_error("trials and error_events are mutually exclusive");
        }
        if ((trials && *trials < 1) || (error_events && *error_events < 1)) {
            throw argument_error("trials and error_events must be >= 1");
        }
        if (max_trials < 1 || min_trials > max_trials || burst < 1) {
            throw argument_error("need 1 <= min_trials <= max_trials and burst >= 1");
        }
        if (!(impairments.cfo_max >= 0.0) || impairments.cfo_max >= ofdm::FrameSpec{}.coarse_cfo_range()) {
            throw argument_error("cfo_max must be in [0, 31250) Hz");
        }
        // UE2's integer delay plus two fractional offsets must stay inside the 16-sample CP
        if (impairments.delay_max < 0 || impairments.delay_max > 14) {
            throw argument_error("delay_max must be in [0, 14] samples");
        }
        for (const auto& g : {h_ap1, h_ap2}) {
            if (!std::isfinite(std::abs(g.from_ue1)) || !std::isfinite(std::abs(g.from_ue2))) {
                throw argument_error("fixed channel gains must be finite");
            }
        }
        protocol_config().validate();
    }
};

/// Counts over a set of trials; sums commute, so any grouping aggregates to the same totals.
struct Tally {
    std::uint64_t trials = 0;
    std::uint64_t symbols = 0;
    std::uint64_t errors = 0;
    std::uint64_t errors_ue1 = 0;
    std::uint64_t errors_ue2 = 0;
    std::uint64_t baseline_errors = 0;
    std::uint64_t fallback = 0;
    std::uint64_t stalled = 0;
    std::uint64_t missed_frames = 0;  ///< per AP
    std::uint64_t baseline_stalled = 0;
    std::uint64_t integrity_errors = 0;

    Tally& operator+=(const Tally& o) {
        trials += o.trials;
        symbols += o.symbols;
        errors += o.errors;
        errors_ue1 += o.errors_ue1;
        errors_ue2 += o.errors_ue2;
        baseline_errors += o.baseline_errors;
        fallback += o.fallback;
        stalled += o.stalled;
        missed_frames += o.missed_frames;
        baseline_stalled += o.baseline_stalled;
        integrity_errors += o.integrity_errors;
        return *this;
    }

    friend bool operator==(const Tally&, const Tally&) = default;
};

struct SerPoint {
    double ebno_db = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t symbols = 0;
    std::uint64_t errors = 0;
    double ser = 0.0;
    double ci_halfwidth = 0.0;
    double baseline_ser = 0.0;
    double ser_ue1 = 0.0;
    double ser_ue2 = 0.0;
    double fallback_rate = 0.0;
    double stall_rate = 0.0;
    bool aborted = false;
    std::string diagnostic;
};

struct SerReport {
    std::vector<SerPoint> points;
};

/// 95% Wilson score interval half-width for @p k successes out of @p n.
[[nodiscard]] inline double wilson_halfwidth(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054) {
    if (n == 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    return z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
}

/// Channel knowledge of one AP plus its received data cells.
struct ApView {
    cvec h1;  ///< UE1 channel per data cell, symbol-major then carrier-ascending
    cvec h2;
    ofdm::SubcarrierGrid grid{6};
    pnc::SfsIndex sfs;
    cplx rcsi;
};

/// Channel draws of one trial, both APs.
struct TrialChannels {
    LinkChannel ap1_ue1, ap1_ue2, ap2_ue1, ap2_ue2;
};

struct TrialResult {
    std::uint64_t errors = 0;
    std::uint64_t errors_ue1 = 0;
    std::uint64_t errors_ue2 = 0;
    std::uint64_t baseline_errors = 0;
    bool baseline_stalled = false;
    int missed_frames = 0;
    protocol::Outcome outcome = protocol::Outcome::stalled;
};

/// Runs individual trials; shares the mapping catalog read-only across threads.
class TrialRunner {
  public:
    TrialRunner(const pnc::MappingCatalog& cat, SimConfig cfg) : cat_{&cat}, cfg_{std::move(cfg)} {
        cfg_.validate();
        carriers_ = pilots_.data_carriers();
    }

    [[nodiscard]] const SimConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] std::size_t words_per_trial() const noexcept { return spec_.data_symbols * carriers_.size(); }

    /// Draw order is fixed and independent of the CSI mode, so both modes see identical channels.
    [[nodiscard]] TrialChannels draw_channels(Rng& rng) const {
        const auto& imp = cfg_.impairments;
        TrialChannels t;
        t.ap1_ue1 = channel::sample_fading(rng, cfg_.channel, {cfg_.h_ap1.from_ue1, 0.0, 0.0});
        t.ap1_ue2 = channel::sample_fading(rng, cfg_.channel, {cfg_.h_ap1.from_ue2, 0.0, 0.0});
        t.ap2_ue1 = channel::sample_fading(rng, cfg_.channel, {cfg_.h_ap2.from_ue1, 0.0, 0.0});
        t.ap2_ue2 = channel::sample_fading(rng, cfg_.channel, {cfg_.h_ap2.from_ue2, 0.0, 0.0});
        std::uniform_real_distribution<double> cfo(-imp.cfo_max, imp.cfo_max);
        std::uniform_int_distribution<int> delay(-imp.delay_max, imp.delay_max);
        std::uniform_real_distribution<double> frac(-0.5, 0.5);
        const double cfo1 = cfo(rng), cfo2 = cfo(rng);
        const int d1 = delay(rng), d2 = delay(rng);
        double sco[4];
        for (double& s : sco) {
            s = frac(rng);
        }
        if (imp.cfo) {
            t.ap1_ue1.cfo = t.ap1_ue2.cfo = cfo1;
            t.ap2_ue1.cfo = t.ap2_ue2.cfo = cfo2;
        }
        if (imp.delay) {
            t.ap1_ue2.delay += d1;
            t.ap2_ue2.delay += d2;
        }
        if (imp.sco) {
            t.ap1_ue1.delay += sco[0];
            t.ap1_ue2.delay += sco[1];
            t.ap2_ue1.delay += sco[2];
            t.ap2_ue2.delay += sco[3];
        }
        return t;
    }

    /// AP front end: returns std::nullopt when the frame is not detected or cannot be processed.
    [[nodiscard]] std::optional<ApView> observe(const cvec& rx, const LinkChannel& ue1, const LinkChannel& ue2) const {
        try {
            ApView v;
            if (cfg_.csi == CsiMode::perfect) {
                const std::size_t offset = layout_.lead;
                const auto corrected = ofdm::correct_cfo(rx, ue1.cfo, spec_.sample_rate);
                v.grid = ofdm::demodulate_ofdm(corrected, offset, spec_);
                const auto g1 = genie(ue1), g2 = genie(ue2);
                for (std::size_t s = 0; s < spec_.data_symbols; ++s) {
                    v.h1.insert(v.h1.end(), g1.begin(), g1.end());
                    v.h2.insert(v.h2.end(), g2.begin(), g2.end());
                }
            } else {
                const auto offset = ofdm::detect_frame(rx);
                if (!offset) {
                    return std::nullopt;
                }
                const double cfo = ofdm::estimate_cfo(rx, *offset, spec_);
                const auto corrected = ofdm::correct_cfo(rx, cfo, spec_.sample_rate);
                v.grid = ofdm::demodulate_ofdm(corrected, *offset, spec_);
                const std::size_t pilot_symbol[] = {0};
                const double max_delay = (cfg_.impairments.delay ? cfg_.impairments.delay_max : 0) + 1.0;
                const auto est = ofdm::estimate_channels_and_sco(v.grid, pilots_, pilot_symbol, max_delay);
                for (std::size_t s = 0; s < spec_.data_symbols; ++s) {
                    const auto rot = ofdm::pilot_phase(v.grid, pilots_, est, s);
                    for (std::size_t c = 0; c < carriers_.size(); ++c) {
                        v.h1.push_back(est.h1[c] * rot[0]);
                        v.h2.push_back(est.h2[c] * rot[1]);
                    }
                }
            }
            const std::span<const cplx> h1(v.h1.data(), carriers_.size()), h2(v.h2.data(), carriers_.size());
            v.rcsi = ofdm::mean_ratio(ofdm::equalize_and_ratio(h1, h2));
            v.sfs = pnc::nearest_sfs(v.rcsi, cat_->sfs);
            return v;
        } catch (const argument_error&) {
            return std::nullopt;
        } catch (const estimation_error&) {
            return std::nullopt;
        }
    }

    /// ML joint word on every data cell, symbol-major then carrier-ascending.
    [[nodiscard]] std::vector<SourceWord> detect_words(const ApView& v) const {
        std::vector<SourceWord> out;
        out.reserve(words_per_trial());
        for (std::size_t s = 0; s < spec_.data_symbols; ++s) {
            for (std::size_t c = 0; c < carriers_.size(); ++c) {
                const std::size_t i = s * carriers_.size() + c;
                out.push_back(pnc::detect_word(v.grid.at(s, carriers_[c]), v.h1[i], v.h2[i]));
            }
        }
        return out;
    }

    /// CoMP: joint ML over whichever AP observations exist.
    [[nodiscard]] std::vector<SourceWord> joint_detect(const std::optional<ApView>& a, const std::optional<ApView>& b) const {
        const auto& qam = pnc::QamConstellation::gray();
        std::vector<SourceWord> out;
        out.reserve(words_per_trial());
        for (std::size_t s = 0; s < spec_.data_symbols; ++s) {
            for (std::size_t c = 0; c < carriers_.size(); ++c) {
                unsigned best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (unsigned w = 0; w < pnc::joint_words; ++w) {
                    const SourceWord word(w);
                    const cplx s1 = qam(word.ue1()), s2 = qam(word.ue2());
                    double d = 0.0;
                    for (const auto* v : {&a, &b}) {
                        if (*v) {
                            const std::size_t i = s * carriers_.size() + c;
                            d += std::norm((*v)->grid.at(s, carriers_[c]) - ((*v)->h1[i] * s1 + (*v)->h2[i] * s2));
                        }
                    }
                    if (d < best_d) {
                        best_d = d;
                        best = w;
                    }
                }
                out.push_back(SourceWord(best));
            }
        }
        return out;
    }

    /// Transmit side, channels and both AP front ends for one frame.
    struct FrontEnd {
        TrialChannels channels;
        std::vector<std::uint8_t> labels_ue1;
        std::vector<std::uint8_t> labels_ue2;
        std::optional<ApView> ap1;
        std::optional<ApView> ap2;
    };

    [[nodiscard]] FrontEnd front_end(double ebno_db, Rng& rng) const {
        FrontEnd fe;
        fe.channels = draw_channels(rng);
        std::uniform_int_distribution<int> label(0, 3);
        fe.labels_ue1.resize(words_per_trial());
        fe.labels_ue2.resize(words_per_trial());
        for (auto& x : fe.labels_ue1) {
            x = static_cast<std::uint8_t>(label(rng));
        }
        for (auto& x : fe.labels_ue2) {
            x = static_cast<std::uint8_t>(label(rng));
        }
        const auto f1 = ofdm::build_ue_frame_from_symbols(fe.labels_ue1, ofdm::UeId::ue1, spec_, pilots_);
        const auto f2 = ofdm::build_ue_frame_from_symbols(fe.labels_ue2, ofdm::UeId::ue2, spec_, pilots_);
        const channel::NoiseSpec noise{ebno_db};
        const auto& ch = fe.channels;
        const auto rx1 = channel::apply_access_link(f1, f2, ch.ap1_ue1, ch.ap1_ue2, noise, rng, layout_, spec_);
        const auto rx2 = channel::apply_access_link(f1, f2, ch.ap2_ue1, ch.ap2_ue2, noise, rng, layout_, spec_);
        fe.ap1 = observe(rx1, ch.ap1_ue1, ch.ap1_ue2);
        fe.ap2 = observe(rx2, ch.ap2_ue1, ch.ap2_ue2);
        return fe;
    }

    /// One frame through the whole chain. @p rng drives channels and noise; @p net drives packet loss.
    TrialResult run_trial(double ebno_db, Rng& rng, Rng& net, protocol::Session& session) const {
        const auto fe = front_end(ebno_db, rng);
        const auto& l1 = fe.labels_ue1;
        const auto& l2 = fe.labels_ue2;
        const auto& v1 = fe.ap1;
        const auto& v2 = fe.ap2;
        TrialResult r;
        r.missed_frames = !v1 + !v2;

        std::optional<protocol::ApObservation> o1, o2;
        if (v1) {
            o1 = protocol::ApObservation{v1->sfs, detect_words(*v1)};
        }
        if (v2) {
            o2 = protocol::ApObservation{v2->sfs, detect_words(*v2)};
        }
        const auto round = session.run_round(o1, o2, net);
        r.outcome = round.outcome;

        const std::size_t n = words_per_trial();
        if (round.words && round.words->size() == n) {
            for (std::size_t i = 0; i < n; ++i) {
                const SourceWord& got = (*round.words)[i];
                r.errors += got.ue1() != l1[i] || got.ue2() != l2[i];
                r.errors_ue1 += got.ue1() != l1[i];
                r.errors_ue2 += got.ue2() != l2[i];
            }
        } else {
            r.errors = r.errors_ue1 = r.errors_ue2 = n;
        }

        if (v1 || v2) {
            const auto joint = joint_detect(v1, v2);
            for (std::size_t i = 0; i < n; ++i) {
                r.baseline_errors += joint[i].ue1() != l1[i] || joint[i].ue2() != l2[i];
            }
        } else {
            r.baseline_errors = n;
            r.baseline_stalled = true;
        }
        return r;
    }

    /// @p count trials from one deterministic seed; a fresh protocol session per burst.
    [[nodiscard]] Tally run_burst(double ebno_db, std::uint64_t burst_index, std::uint64_t count) const {
        const auto ebno_bits = std::bit_cast<std::uint64_t>(ebno_db);
        auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x); };
        auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
        std::seed_seq phys{lo(cfg_.seed), hi(cfg_.seed), lo(ebno_bits), hi(ebno_bits), lo(burst_index), hi(burst_index), 0U};
        std::seed_seq link{lo(cfg_.seed), hi(cfg_.seed), lo(ebno_bits), hi(ebno_bits), lo(burst_index), hi(burst_index), 1U};
        Rng rng(phys), net(link);
        protocol::Session session(*cat_, cfg_.protocol_config());
        Tally t;
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto r = run_trial(ebno_db, rng, net, session);
            ++t.trials;
            t.symbols += words_per_trial();
            t.errors += r.errors;
            t.errors_ue1 += r.errors_ue1;
            t.errors_ue2 += r.errors_ue2;
            t.baseline_errors += r.baseline_errors;
            t.baseline_stalled += r.baseline_stalled;
            t.missed_frames += static_cast<std::uint64_t>(r.missed_frames);
            t.fallback += r.outcome == protocol::Outcome::fallback_used;
            t.stalled += r.outcome == protocol::Outcome::stalled;
        }
        t.integrity_errors = session.hub().integrity_errors;
        return t;
    }

  private:
    /// Oracle per-carrier channel after ideal CFO removal: gain, CFO phase accrued over the delay, and
    /// the linear phase of the timing offset.
    [[nodiscard]] cvec genie(const LinkChannel& link) const {
        const double two_pi = 2.0 * std::numbers::pi;
        const cplx base = link.h * std::polar(1.0, -two_pi * link.cfo * link.delay / spec_.sample_rate);
        const double phi = -two_pi * link.delay / static_cast<double>(spec_.fft_len);
        cvec out;
        out.reserve(carriers_.size());
        for (int k : carriers_) {
            out.push_back(base * std::polar(1.0, phi * ofdm::frequency_index(k)));
        }
        return out;
    }

    const pnc::MappingCatalog* cat_;
    SimConfig cfg_;
    ofdm::FrameSpec spec_;
    ofdm::PilotMap pilots_;
    channel::BufferLayout layout_;
    std::vector<int> carriers_;
};

enum class Receiver { pnc, comp };

namespace detail {

inline std::uint64_t primary_errors(const Tally& t, Receiver rx) { return rx == Receiver::pnc ? t.errors : t.baseline_errors; }

inline SerPoint summarize(double ebno, const Tally& t, Receiver rx) {
    SerPoint p;
    p.ebno_db = ebno;
    p.trials = t.trials;
    p.symbols = t.symbols;
    p.errors = primary_errors(t, rx);
    const double n = static_cast<double>(t.symbols);
    const double trials = static_cast<double>(t.trials);
    p.ser = static_cast<double>(p.errors) / n;
    p.ci_halfwidth = wilson_halfwidth(p.errors, t.symbols);
    p.baseline_ser = static_cast<double>(t.baseline_errors) / n;
    if (rx == Receiver::pnc) {
        p.ser_ue1 = static_cast<double>(t.errors_ue1) / n;
        p.ser_ue2 = static_cast<double>(t.errors_ue2) / n;
        p.fallback_rate = static_cast<double>(t.fallback) / trials;
        p.stall_rate = static_cast<double>(t.stalled) / trials;
    } else {
        p.ser_ue1 = p.ser_ue2 = std::numeric_limits<double>::quiet_NaN();
        p.stall_rate = static_cast<double>(t.baseline_stalled) / trials;
    }
    if (p.stall_rate > 0.5) {
        p.aborted = true;
        p.diagnostic = "stalled-round rate " + std::to_string(p.stall_rate) + " exceeds 50% (" +
                       std::to_string(t.missed_frames) + " missed frame detections); SER not reported";
        p.ser = p.ci_halfwidth = std::numeric_limits<double>::quiet_NaN();
        p.ser_ue1 = p.ser_ue2 = std::numeric_limits<double>::quiet_NaN();
        if (rx == Receiver::comp) {
            p.baseline_ser = std::numeric_limits<double>::quiet_NaN();
        }
    } else if (t.integrity_errors > 0) {
        p.diagnostic = std::to_string(t.integrity_errors) + " rounds discarded on inconsistent mappings";
    }
    return p;
}

}  // namespace detail

/// One sweep point. Bursts run in parallel waves but are folded in index order, so the result does not
/// depend on the thread count.
[[nodiscard]] inline Tally run_point(const TrialRunner& runner, double ebno_db, Receiver rx) {
    const auto& cfg = runner.config();
    const std::uint64_t target = cfg.target_errors();
    const std::uint64_t limit = cfg.trials.value_or(cfg.max_trials);
    const unsigned width = cfg.threads ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
    Tally total;
    std::uint64_t next = 0;
    auto done = [&] {
        if (total.trials >= limit) {
            return true;
        }
        return !cfg.trials && total.trials >= cfg.min_trials && detail::primary_errors(total, rx) >= target;
    };
    while (!done()) {
        std::vector<std::future<Tally>> wave;
        std::uint64_t planned = total.trials;
        for (unsigned w = 0; w < width && planned < limit; ++w) {
            const std::uint64_t count = std::min(cfg.burst, limit - planned);
            planned += count;
            wave.push_back(std::async(std::launch::async, [&runner, ebno_db, idx = next++, count] {
                return runner.run_burst(ebno_db, idx, count);
            }));
        }
        for (auto& f : wave) {
            const Tally t = f.get();
            if (!done()) {
                total += t;
            }
        }
    }
    return total;
}

[[nodiscard]] inline SerReport run_sweep(const pnc::MappingCatalog& cat, const SimConfig& cfg, Receiver rx) {
    const TrialRunner runner(cat, cfg);
    SerReport report;
    for (double e : cfg.ebno) {
        report.points.push_back(detail::summarize(e, run_point(runner, e, rx), rx));
    }
    return report;
}

/// PNC end-to-end SER; baseline_ser carries the CoMP receiver on the same trials.
[[nodiscard]] inline SerReport run_ser_sweep(const pnc::MappingCatalog& cat, const SimConfig& cfg) {
    return run_sweep(cat, cfg, Receiver::pnc);
}

/// CoMP joint reception as the primary receiver (early stopping on its own error count).
[[nodiscard]] inline SerReport run_comp_baseline(const pnc::MappingCatalog& cat, const SimConfig& cfg) {
    return run_sweep(cat, cfg, Receiver::comp);
}

}  // namespace netcom::sim
