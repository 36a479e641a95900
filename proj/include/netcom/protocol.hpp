/**
 * @file protocol.hpp
 * @brief Backhaul exchange between the two APs and the hub, as a discrete-event simulation.
 *
 * Per round: each AP that received the UE frame reports its nearest SFS index and arms a timeout; the hub,
 * once it holds both indices, replies with the combined mapping index; each AP then encodes its detected
 * words with its half of that mapping and sends the coded vectors. An AP whose timeout fires reuses its
 * previous mapping, or stalls when it has none. Every message is sent as R copies, each erased
 * independently.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "netcom/error.hpp"
#include "netcom/pnc.hpp"

namespace netcom::protocol {

using pnc::MappingIndex;
using pnc::Ncv;
using pnc::SfsIndex;
using pnc::SourceWord;
using Rng = std::mt19937_64;

enum class Node { ap1, ap2, hub };

[[nodiscard]] inline const char* to_string(Node n) noexcept {
    switch (n) {
        case Node::ap1: return "AP1";
        case Node::ap2: return "AP2";
        case Node::hub: return "HUB";
    }
    return "?";
}

[[nodiscard]] inline Node ap_node(int ap) {
    if (ap != 1 && ap != 2) {
        throw argument_error("AP id must be 1 or 2");
    }
    return ap == 1 ? Node::ap1 : Node::ap2;
}

struct SfsReport {
    int ap = 1;
    SfsIndex sfs;
    std::uint64_t round = 0;
};

struct MappingReply {
    MappingIndex mapping;
    std::uint64_t round = 0;
};

struct NcsData {
    int ap = 1;
    MappingIndex mapping;  ///< mapping the AP actually encoded with
    std::uint64_t round = 0;
    std::vector<Ncv> ncvs;
};

using Message = std::variant<SfsReport, MappingReply, NcsData>;

enum class MessageKind { sfs_index, mapping_index, ncs_data };

[[nodiscard]] inline MessageKind kind_of(const Message& m) noexcept { return static_cast<MessageKind>(m.index()); }

/// Erasure probability per copy, by message kind.
struct LossModel {
    double sfs_index = 0.0;
    double mapping_index = 0.0;
    double ncs_data = 0.0;

    static LossModel uniform(double p) { return {p, p, p}; }

    friend bool operator==(const LossModel&, const LossModel&) = default;

    [[nodiscard]] double of(MessageKind k) const noexcept {
        switch (k) {
            case MessageKind::sfs_index: return sfs_index;
            case MessageKind::mapping_index: return mapping_index;
            case MessageKind::ncs_data: return ncs_data;
        }
        return 0.0;
    }

    void validate() const {
        for (double p : {sfs_index, mapping_index, ncs_data}) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw argument_error("loss probability must be in [0, 1]");
            }
        }
    }
};

struct ProtocolConfig {
    LossModel loss;
    int replication = 4;
    double timeout = 1.0;        ///< seconds
    double latency = 1e-3;       ///< one-way backhaul delay, seconds
    double frame_interval = 2.0;  ///< start-to-start spacing of rounds, seconds
    bool trace = false;

    void validate() const {
        loss.validate();
        if (replication < 1) {
            throw argument_error("replication must be >= 1");
        }
        if (!(timeout > 0.0) || !(latency >= 0.0) || !(frame_interval > 0.0)) {
            throw argument_error("protocol timing values must be positive");
        }
    }
};

/// Output of an AP's frame processing: its SFS decision and the ML joint word per data carrier.
struct ApObservation {
    SfsIndex sfs;
    std::vector<SourceWord> words;
};

struct FrameReceived {
    int ap = 1;
    std::uint64_t round = 0;
    ApObservation obs;
};

struct Delivery {
    Node src = Node::hub;
    Node dst = Node::hub;
    Message msg;
};

struct Timeout {
    int ap = 1;
    std::uint64_t round = 0;
};

using Event = std::variant<FrameReceived, Delivery, Timeout>;

/// Message handed to the network, addressed to @p dst.
struct Outgoing {
    Node dst = Node::hub;
    Message msg;
};

struct ApState {
    int ap = 1;
    std::optional<MappingIndex> last_mapping;
    std::optional<double> deadline;  ///< set iff awaiting a mapping reply
    std::uint64_t round = 0;
    std::vector<SourceWord> words;
    bool used_fallback = false;
    bool stalled = false;
    std::uint64_t stalls = 0;
};

struct HubState {
    std::uint64_t round = 0;
    std::optional<SfsIndex> sfs[2];
    bool replied = false;
    std::optional<NcsData> data[2];
    bool decoded = false;
    std::uint64_t integrity_errors = 0;
};

/// Recovered words for a round, delivered by the hub.
struct Decoded {
    std::uint64_t round = 0;
    std::vector<SourceWord> words;
};

namespace detail {

inline NcsData encode_round(const ApState& s, MappingIndex m, const pnc::MappingCatalog& cat) {
    const auto& e = cat.entry(m);
    const gf2::Matrix half = s.ap == 1 ? e.ap1() : e.ap2();
    NcsData d{s.ap, m, s.round, {}};
    d.ncvs.reserve(s.words.size());
    for (const auto& w : s.words) {
        d.ncvs.push_back(pnc::pnc_encode(half, w));
    }
    return d;
}

}  // namespace detail

/// AP state machine. Returns the messages to send (one logical copy each).
inline std::vector<Outgoing> ap_step(ApState& s, const Event& ev, double now, const pnc::MappingCatalog& cat, const ProtocolConfig& cfg) {
    std::vector<Outgoing> out;
    if (const auto* fr = std::get_if<FrameReceived>(&ev)) {
        s.round = fr->round;
        s.words = fr->obs.words;
        s.used_fallback = false;
        s.stalled = false;
        s.deadline = now + cfg.timeout;
        out.push_back({Node::hub, SfsReport{s.ap, fr->obs.sfs, s.round}});
    } else if (const auto* dv = std::get_if<Delivery>(&ev)) {
        const auto* reply = std::get_if<MappingReply>(&dv->msg);
        if (reply && reply->round == s.round && s.deadline) {
            s.deadline.reset();
            s.last_mapping = reply->mapping;
            out.push_back({Node::hub, detail::encode_round(s, reply->mapping, cat)});
        }
    } else if (const auto* to = std::get_if<Timeout>(&ev)) {
        if (to->round == s.round && s.deadline) {
            s.deadline.reset();
            if (s.last_mapping) {
                s.used_fallback = true;
                out.push_back({Node::hub, detail::encode_round(s, *s.last_mapping, cat)});
            } else {
                s.stalled = true;
                ++s.stalls;
            }
        }
    }
    return out;
}

/// Hub state machine. @p decoded receives the recovered words when both coded streams are in.
inline std::vector<Outgoing> hub_step(HubState& s, const Event& ev, const pnc::MappingCatalog& cat, std::optional<Decoded>& decoded) {
    std::vector<Outgoing> out;
    const auto* dv = std::get_if<Delivery>(&ev);
    if (!dv) {
        return out;
    }
    auto enter_round = [&](std::uint64_t r) {
        if (r > s.round) {
            s = HubState{r, {}, false, {}, false, s.integrity_errors};
        }
        return r == s.round;
    };
    if (const auto* rep = std::get_if<SfsReport>(&dv->msg)) {
        if (!enter_round(rep->round)) {
            return out;
        }
        auto& slot = s.sfs[rep->ap - 1];
        if (!slot) {
            slot = rep->sfs;
        }
        if (s.sfs[0] && s.sfs[1] && !s.replied) {
            const auto sel = pnc::online_select(*s.sfs[0], *s.sfs[1], cat);
            s.replied = true;
            out.push_back({Node::ap1, MappingReply{sel.index, s.round}});
            out.push_back({Node::ap2, MappingReply{sel.index, s.round}});
        }
    } else if (const auto* data = std::get_if<NcsData>(&dv->msg)) {
        if (!enter_round(data->round)) {
            return out;
        }
        auto& slot = s.data[data->ap - 1];
        if (!slot) {
            slot = *data;
        }
        if (s.data[0] && s.data[1] && !s.decoded) {
            s.decoded = true;
            const auto combined = stack(cat.entry(s.data[0]->mapping).ap1(), cat.entry(s.data[1]->mapping).ap2());
            if (gf2::rank(combined) != 4 || s.data[0]->ncvs.size() != s.data[1]->ncvs.size()) {
                ++s.integrity_errors;  // inconsistent mappings: discard the round
                return out;
            }
            const pnc::HubDecoder dec(combined);
            Decoded d{s.round, {}};
            d.words.reserve(s.data[0]->ncvs.size());
            for (std::size_t i = 0; i < s.data[0]->ncvs.size(); ++i) {
                d.words.push_back(dec(s.data[0]->ncvs[i], s.data[1]->ncvs[i]));
            }
            decoded = std::move(d);
        }
    }
    return out;
}

enum class Outcome { completed, fallback_used, stalled };

[[nodiscard]] inline const char* to_string(Outcome o) noexcept {
    switch (o) {
        case Outcome::completed: return "completed";
        case Outcome::fallback_used: return "fallback_used";
        case Outcome::stalled: return "stalled";
    }
    return "?";
}

struct RoundOutcome {
    Outcome outcome = Outcome::stalled;
    std::optional<std::vector<SourceWord>> words;
    std::optional<MappingIndex> mapping;  ///< mapping selected by the hub this round, if any
    std::size_t messages_sent = 0;        ///< logical messages, before replication
    std::size_t copies_delivered = 0;
};

/**
 * Time-ordered event queue with FIFO order among equal timestamps, plus the lossy replicated network.
 * Protocol state persists across rounds, so a later round can fall back on an earlier mapping.
 */
class Session {
  public:
    Session(const pnc::MappingCatalog& cat, ProtocolConfig cfg) : cat_{&cat}, cfg_{std::move(cfg)} {
        cfg_.validate();
        ap_[0].ap = 1;
        ap_[1].ap = 2;
    }

    /// One exchange. A missing observation means that AP failed to detect the UE frame.
    RoundOutcome run_round(const std::optional<ApObservation>& ap1, const std::optional<ApObservation>& ap2, Rng& rng) {
        ++round_;
        const double start = round_ == 1 ? 0.0 : std::max(now_, last_start_ + cfg_.frame_interval);
        last_start_ = start;
        now_ = start;
        RoundOutcome result;
        std::optional<Decoded> decoded;
        if (ap1) {
            push(start, FrameReceived{1, round_, *ap1});
        }
        if (ap2) {
            push(start, FrameReceived{2, round_, *ap2});
        }
        while (!queue_.empty()) {
            const Entry e = queue_.top();
            queue_.pop();
            now_ = e.time;
            std::vector<Outgoing> out;
            Node from = Node::hub;
            if (const auto* fr = std::get_if<FrameReceived>(&e.event)) {
                from = ap_node(fr->ap);
                log(e.time, "frame", from, from, "round=" + std::to_string(fr->round) + " sfs=" + std::to_string(fr->obs.sfs.value));
                out = ap_step(ap_[fr->ap - 1], e.event, now_, *cat_, cfg_);
                push(now_ + cfg_.timeout, Timeout{fr->ap, fr->round});
            } else if (const auto* to = std::get_if<Timeout>(&e.event)) {
                from = ap_node(to->ap);
                auto& st = ap_[to->ap - 1];
                const bool live = st.deadline && st.round == to->round;
                out = ap_step(st, e.event, now_, *cat_, cfg_);
                if (live) {
                    log(e.time, "timeout", from, from, st.stalled ? "stall" : "fallback mapping=" + std::to_string(st.last_mapping->value));
                }
            } else {
                const auto& dv = std::get<Delivery>(e.event);
                from = dv.dst;
                ++result.copies_delivered;
                log(e.time, "recv", dv.src, dv.dst, describe(dv.msg));
                if (dv.dst == Node::hub) {
                    out = hub_step(hub_, e.event, *cat_, decoded);
                } else {
                    out = ap_step(ap_[dv.dst == Node::ap1 ? 0 : 1], e.event, now_, *cat_, cfg_);
                }
            }
            for (auto& o : out) {
                if (const auto* r = std::get_if<MappingReply>(&o.msg); r && o.dst == Node::ap1) {
                    result.mapping = r->mapping;
                }
                send(from, std::move(o), rng);
                ++result.messages_sent;
            }
        }
        if (decoded && decoded->round == round_) {
            result.words = std::move(decoded->words);
            result.outcome = (ap_[0].used_fallback || ap_[1].used_fallback) ? Outcome::fallback_used : Outcome::completed;
        } else {
            result.outcome = Outcome::stalled;
        }
        log(now_, "outcome", Node::hub, Node::hub, to_string(result.outcome));
        return result;
    }

    /// Changes backhaul loss between rounds; protocol state is kept.
    void set_loss(const LossModel& loss) {
        loss.validate();
        cfg_.loss = loss;
    }

    [[nodiscard]] const std::vector<std::string>& trace() const noexcept { return trace_; }
    [[nodiscard]] const ApState& ap(int id) const { return ap_[ap_node(id) == Node::ap1 ? 0 : 1]; }
    [[nodiscard]] const HubState& hub() const noexcept { return hub_; }
    [[nodiscard]] double now() const noexcept { return now_; }

  private:
    struct Entry {
        double time;
        std::uint64_t seq;
        Event event;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const noexcept {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    void push(double t, Event ev) { queue_.push(Entry{t, seq_++, std::move(ev)}); }

    void send(Node src, Outgoing o, Rng& rng) {
        const double p = cfg_.loss.of(kind_of(o.msg));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int c = 0; c < cfg_.replication; ++c) {
            const bool lost = u(rng) < p;
            log(now_, lost ? "lost" : "send", src, o.dst, describe(o.msg) + " copy=" + std::to_string(c + 1));
            if (!lost) {
                push(now_ + cfg_.latency, Delivery{src, o.dst, o.msg});
            }
        }
    }

    static std::string describe(const Message& m) {
        if (const auto* r = std::get_if<SfsReport>(&m)) {
            return "SFS_INDEX round=" + std::to_string(r->round) + " sfs=" + std::to_string(r->sfs.value);
        }
        if (const auto* r = std::get_if<MappingReply>(&m)) {
            return "MAPPING_INDEX round=" + std::to_string(r->round) + " mapping=" + std::to_string(r->mapping.value);
        }
        const auto& d = std::get<NcsData>(m);
        return "NCS_DATA round=" + std::to_string(d.round) + " mapping=" + std::to_string(d.mapping.value) +
               " ncvs=" + std::to_string(d.ncvs.size());
    }

    void log(double t, const char* kind, Node src, Node dst, const std::string& payload) {
        if (!cfg_.trace) {
            return;
        }
        std::ostringstream os;
        os.precision(9);
        os << std::fixed << t << ' ' << kind << ' ' << to_string(src) << ' ' << to_string(dst) << ' ' << payload;
        trace_.push_back(os.str());
    }

    const pnc::MappingCatalog* cat_;
    ProtocolConfig cfg_;
    ApState ap_[2];
    HubState hub_;
    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    std::uint64_t seq_ = 0;
    std::uint64_t round_ = 0;
    double now_ = 0.0;
    double last_start_ = 0.0;
    std::vector<std::string> trace_;
};

}  // namespace netcom::protocol
