/**
 * @file ofdm.hpp
 * @brief OFDM framing and recovery for the two-UE uplink.
 *
 * Frame layout (UE1, 880 samples at 1 MS/s):
 *
 *     [0, 64)      PN detection sequence, BPSK
 *     [64, 144)    coarse CFO preamble, 16-sample period on every 4th used carrier
 *     [144, 224)   fine CFO preamble: 16 CP + 64-sample known symbol
 *     [224, 304)   repeat of the fine preamble
 *     [304, 880)   6 data symbols, each 16 head CP + 64 + 16 tail CP
 *
 * UE2 is silent until sample 304 and then sends its data symbols aligned with UE1's. Subcarriers are
 * numbered 1..64 with DC at 33; carrier k sits at signed frequency index k - 33. Both UEs put data on the
 * same 32 carriers; each UE has 8 pilots that the other UE leaves empty.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "netcom/error.hpp"
#include "netcom/fft.hpp"
#include "netcom/pnc.hpp"

namespace netcom::ofdm {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

enum class UeId { ue1 = 1, ue2 = 2 };

struct FrameSpec {
    std::size_t fft_len = 64;
    std::size_t cp_len = 16;
    std::size_t used_subcarriers = 48;
    double sample_rate = 1e6;
    std::size_t data_symbols = 6;
    std::size_t pn_len = 64;
    std::size_t preamble_count = 3;

    [[nodiscard]] double subcarrier_spacing() const noexcept { return sample_rate / static_cast<double>(fft_len); }
    [[nodiscard]] std::size_t preamble_len() const noexcept { return cp_len + fft_len; }
    [[nodiscard]] std::size_t coarse_preamble_start() const noexcept { return pn_len; }
    [[nodiscard]] std::size_t fine_preamble_start() const noexcept { return pn_len + preamble_len(); }
    [[nodiscard]] std::size_t data_start() const noexcept { return pn_len + preamble_count * preamble_len(); }
    [[nodiscard]] std::size_t data_symbol_len() const noexcept { return fft_len + 2 * cp_len; }
    [[nodiscard]] std::size_t frame_len() const noexcept { return data_start() + data_symbols * data_symbol_len(); }

    /// Coarse CFO uses the 16-sample preamble period; fine CFO the spacing of the two identical symbols.
    [[nodiscard]] std::size_t coarse_lag() const noexcept { return fft_len / 4; }
    [[nodiscard]] std::size_t fine_lag() const noexcept { return preamble_len(); }
    [[nodiscard]] double coarse_cfo_range() const noexcept { return sample_rate / (2.0 * static_cast<double>(coarse_lag())); }
    [[nodiscard]] double fine_cfo_range() const noexcept { return sample_rate / (2.0 * static_cast<double>(fine_lag())); }

    void validate() const {
        if (fft_len != 64 || cp_len != 16 || used_subcarriers != 48 || pn_len != 64 || preamble_count != 3) {
            throw argument_error("FrameSpec: only the 64-point, 16-CP, 48-carrier layout is supported");
        }
        if (!(sample_rate > 0.0)) {
            throw argument_error("FrameSpec: sample_rate must be positive");
        }
        if (data_symbols < 1 || data_symbols > 64) {
            throw argument_error("FrameSpec: data_symbols must be in [1, 64]");
        }
    }

    friend bool operator==(const FrameSpec&, const FrameSpec&) = default;
};

inline constexpr int dc_carrier = 33;

[[nodiscard]] constexpr bool is_null_carrier(int k) noexcept { return k <= 8 || k >= 58; }
[[nodiscard]] constexpr bool is_used_carrier(int k) noexcept { return k >= 1 && k <= 64 && !is_null_carrier(k) && k != dc_carrier; }
[[nodiscard]] constexpr int frequency_index(int k) noexcept { return k - dc_carrier; }
[[nodiscard]] constexpr std::size_t fft_bin(int k) noexcept { return static_cast<std::size_t>((k - dc_carrier + 64) % 64); }

[[nodiscard]] inline std::vector<int> used_carriers() {
    std::vector<int> out;
    for (int k = 1; k <= 64; ++k) {
        if (is_used_carrier(k)) {
            out.push_back(k);
        }
    }
    return out;
}

struct PilotMap {
    std::array<int, 8> ue1{11, 17, 23, 29, 36, 42, 48, 54};
    std::array<int, 8> ue2{12, 18, 24, 30, 37, 43, 49, 55};

    [[nodiscard]] const std::array<int, 8>& own(UeId u) const noexcept { return u == UeId::ue1 ? ue1 : ue2; }

    [[nodiscard]] bool is_pilot(int k) const noexcept {
        return std::find(ue1.begin(), ue1.end(), k) != ue1.end() || std::find(ue2.begin(), ue2.end(), k) != ue2.end();
    }

    /// Used carriers that are nobody's pilot, ascending.
    [[nodiscard]] std::vector<int> data_carriers() const {
        std::vector<int> out;
        for (int k : used_carriers()) {
            if (!is_pilot(k)) {
                out.push_back(k);
            }
        }
        return out;
    }

    void validate() const {
        for (int k : ue1) {
            if (!is_used_carrier(k) || std::find(ue2.begin(), ue2.end(), k) != ue2.end()) {
                throw argument_error("PilotMap: pilots must be used carriers and disjoint between UEs");
            }
        }
        for (int k : ue2) {
            if (!is_used_carrier(k)) {
                throw argument_error("PilotMap: pilots must be used carriers");
            }
        }
    }
};

inline constexpr cplx pilot_symbol{1.0, 0.0};

[[nodiscard]] inline std::size_t payload_capacity_symbols(const FrameSpec& spec, const PilotMap& pilots) {
    return spec.data_symbols * pilots.data_carriers().size();
}

[[nodiscard]] inline std::size_t payload_capacity_bits(const FrameSpec& spec, const PilotMap& pilots) {
    return 2 * payload_capacity_symbols(spec, pilots);
}

/// 63-chip maximal-length sequence (x^6 + x^5 + 1) with its first chip appended, as BPSK +-1.
[[nodiscard]] inline const cvec& pn_sequence() {
    static const cvec seq = [] {
        cvec out;
        unsigned state = 0x3F;
        for (int n = 0; n < 63; ++n) {
            const unsigned bit = state & 1U;
            out.emplace_back(bit ? -1.0 : 1.0, 0.0);
            const unsigned fb = ((state >> 0) ^ (state >> 1)) & 1U;
            state = (state >> 1) | (fb << 5);
        }
        out.push_back(out.front());
        return out;
    }();
    return seq;
}

namespace detail {

inline cvec unit_power(cvec x) {
    double p = 0.0;
    for (const auto& v : x) {
        p += std::norm(v);
    }
    const double s = std::sqrt(static_cast<double>(x.size()) / p);
    for (auto& v : x) {
        v *= s;
    }
    return x;
}

/// Time-domain body of one OFDM symbol from values on subcarriers 1..64.
inline cvec synthesize(const std::array<cplx, 64>& by_carrier) {
    cvec bins(64);
    for (int k = 1; k <= 64; ++k) {
        bins[fft_bin(k)] = by_carrier[static_cast<std::size_t>(k - 1)];
    }
    dsp::dft_inplace(bins, dsp::Direction::inverse);
    return bins;
}

inline void append_with_cp(cvec& out, const cvec& body, std::size_t head, std::size_t tail) {
    out.insert(out.end(), body.end() - static_cast<std::ptrdiff_t>(head), body.end());
    out.insert(out.end(), body.begin(), body.end());
    out.insert(out.end(), body.begin(), body.begin() + static_cast<std::ptrdiff_t>(tail));
}

}  // namespace detail

/// 64-sample body of the coarse preamble: BPSK on carriers at multiples of 4 from DC, so period 16.
[[nodiscard]] inline const cvec& coarse_preamble_body() {
    static const cvec body = [] {
        std::array<cplx, 64> grid{};
        std::size_t chip = 0;
        for (int k : used_carriers()) {
            if (frequency_index(k) % 4 == 0) {
                grid[static_cast<std::size_t>(k - 1)] = pn_sequence()[chip++];
            }
        }
        return detail::unit_power(detail::synthesize(grid));
    }();
    return body;
}

/// 64-sample body of the fine preamble: BPSK on all 48 used carriers.
[[nodiscard]] inline const cvec& fine_preamble_body() {
    static const cvec body = [] {
        std::array<cplx, 64> grid{};
        std::size_t chip = 7;
        for (int k : used_carriers()) {
            grid[static_cast<std::size_t>(k - 1)] = pn_sequence()[chip++ % 64];
        }
        return detail::unit_power(detail::synthesize(grid));
    }();
    return body;
}

struct UeFrame {
    UeId ue = UeId::ue1;
    cvec samples;
};

/**
 * Frame from 4-QAM labels (0..3), one per data-carrier use in symbol-major, carrier-ascending order.
 * Fewer labels than the capacity are padded with label 0.
 */
[[nodiscard]] inline UeFrame build_ue_frame_from_symbols(std::span<const std::uint8_t> labels, UeId ue, const FrameSpec& spec = {},
                                                         const PilotMap& pilots = {},
                                                         const pnc::QamConstellation& qam = pnc::QamConstellation::gray()) {
    spec.validate();
    pilots.validate();
    const auto data = pilots.data_carriers();
    if (labels.size() > spec.data_symbols * data.size()) {
        throw argument_error("build_ue_frame: payload of " + std::to_string(labels.size()) + " symbols exceeds capacity " +
                             std::to_string(spec.data_symbols * data.size()));
    }
    UeFrame f{ue, {}};
    f.samples.reserve(spec.frame_len());
    if (ue == UeId::ue1) {
        f.samples = pn_sequence();
        detail::append_with_cp(f.samples, coarse_preamble_body(), spec.cp_len, 0);
        detail::append_with_cp(f.samples, fine_preamble_body(), spec.cp_len, 0);
        detail::append_with_cp(f.samples, fine_preamble_body(), spec.cp_len, 0);
    } else {
        f.samples.assign(spec.data_start(), cplx{});
    }
    std::size_t next = 0;
    for (std::size_t s = 0; s < spec.data_symbols; ++s) {
        std::array<cplx, 64> grid{};
        for (int k : data) {
            const unsigned label = next < labels.size() ? labels[next] : 0U;
            if (label > 3) {
                throw argument_error("build_ue_frame: 4-QAM label out of range");
            }
            grid[static_cast<std::size_t>(k - 1)] = qam(label);
            ++next;
        }
        for (int k : pilots.own(ue)) {
            grid[static_cast<std::size_t>(k - 1)] = pilot_symbol;
        }
        detail::append_with_cp(f.samples, detail::synthesize(grid), spec.cp_len, spec.cp_len);
    }
    return f;
}

/// Frame from payload bits (each 0 or 1), two bits per 4-QAM symbol with the first bit most significant.
[[nodiscard]] inline UeFrame build_ue_frame(std::span<const std::uint8_t> payload_bits, UeId ue, const FrameSpec& spec = {},
                                            const PilotMap& pilots = {}) {
    if (payload_bits.size() > payload_capacity_bits(spec, pilots)) {
        throw argument_error("build_ue_frame: payload of " + std::to_string(payload_bits.size()) + " bits exceeds capacity " +
                             std::to_string(payload_capacity_bits(spec, pilots)));
    }
    std::vector<std::uint8_t> labels((payload_bits.size() + 1) / 2);
    for (std::size_t i = 0; i < payload_bits.size(); ++i) {
        if (payload_bits[i] > 1) {
            throw argument_error("build_ue_frame: payload bits must be 0 or 1");
        }
        labels[i / 2] = static_cast<std::uint8_t>(labels[i / 2] | (payload_bits[i] << (1 - i % 2)));
    }
    return build_ue_frame_from_symbols(labels, ue, spec, pilots);
}

/**
 * Frame start by correlation with @p pn. The reference is split into 8-chip segments; each segment is
 * correlated coherently and adjacent segment results are combined as c[s+1] c*[s], which cancels any
 * carrier offset (at 31 kHz a segment loses only 10%). The metric is normalised by Cauchy-Schwarz, so it
 * is 1 for a noiseless match and about 0.05 for noise. A half-sample timing offset splits the peak over
 * the two neighbouring samples at about 0.4 each. Returns the first offset with the largest metric, or
 * std::nullopt when that metric is below @p threshold.
 */
[[nodiscard]] inline std::optional<std::size_t> detect_frame(std::span<const cplx> rx, std::span<const cplx> pn = pn_sequence(),
                                                             double threshold = 0.25,
                                                             std::size_t max_offset = static_cast<std::size_t>(-1)) {
    constexpr std::size_t seg = 8;
    const std::size_t segments = pn.size() / seg;
    if (segments < 2 || rx.size() < pn.size()) {
        return std::nullopt;
    }
    const std::size_t span_len = segments * seg;
    const std::size_t last = std::min(rx.size() - span_len, max_offset);
    std::vector<double> energy(rx.size() + 1);
    for (std::size_t n = 0; n < rx.size(); ++n) {
        energy[n + 1] = energy[n] + std::norm(rx[n]);
    }
    std::vector<double> pn_energy(segments);
    for (std::size_t s = 0; s < segments; ++s) {
        for (std::size_t m = s * seg; m < (s + 1) * seg; ++m) {
            pn_energy[s] += std::norm(pn[m]);
        }
    }
    double best = -1.0;
    std::size_t best_d = 0;
    cvec c(segments);
    for (std::size_t d = 0; d <= last; ++d) {
        for (std::size_t s = 0; s < segments; ++s) {
            cplx acc{};
            for (std::size_t m = s * seg; m < (s + 1) * seg; ++m) {
                acc += rx[d + m] * std::conj(pn[m]);
            }
            c[s] = acc;
        }
        cplx num{};
        double den = 0.0;
        for (std::size_t s = 0; s + 1 < segments; ++s) {
            num += c[s + 1] * std::conj(c[s]);
            const double e0 = energy[d + (s + 1) * seg] - energy[d + s * seg];
            const double e1 = energy[d + (s + 2) * seg] - energy[d + (s + 1) * seg];
            den += std::sqrt(std::max(0.0, e0 * pn_energy[s]) * std::max(0.0, e1 * pn_energy[s + 1]));
        }
        const double metric = den > 0.0 ? std::abs(num) / den : 0.0;
        if (metric > best) {
            best = metric;
            best_d = d;
        }
    }
    if (best < threshold) {
        return std::nullopt;
    }
    return best_d;
}

/// Multiplies sample n by exp(-j 2 pi cfo n / fs); n counts from the start of @p rx.
[[nodiscard]] inline cvec correct_cfo(std::span<const cplx> rx, double cfo_hz, double sample_rate = FrameSpec{}.sample_rate) {
    cvec out(rx.begin(), rx.end());
    if (cfo_hz == 0.0) {
        return out;
    }
    const double step = -2.0 * std::numbers::pi * cfo_hz / sample_rate;
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] *= std::polar(1.0, std::remainder(step * static_cast<double>(n), 2.0 * std::numbers::pi));
    }
    return out;
}

/**
 * CFO in Hz: lag-16 autocorrelation over the coarse preamble, then, after removing that estimate, the
 * lag-80 correlation between the two fine preamble copies. The result lies in the coarse range.
 */
[[nodiscard]] inline double estimate_cfo(std::span<const cplx> rx, std::size_t frame_offset, const FrameSpec& spec = {}) {
    if (frame_offset + spec.data_start() > rx.size()) {
        throw argument_error("estimate_cfo: preambles extend past the received buffer");
    }
    const double two_pi = 2.0 * std::numbers::pi;
    const std::size_t coarse = frame_offset + spec.coarse_preamble_start();
    const std::size_t lag_c = spec.coarse_lag();
    cplx acc{};
    for (std::size_t n = coarse; n + lag_c < coarse + spec.preamble_len(); ++n) {
        acc += rx[n + lag_c] * std::conj(rx[n]);
    }
    const double f_coarse = std::arg(acc) * spec.sample_rate / (two_pi * static_cast<double>(lag_c));

    const std::size_t fine = frame_offset + spec.fine_preamble_start();
    const std::size_t lag_f = spec.fine_lag();
    const double step = -two_pi * f_coarse / spec.sample_rate;
    cplx acc_f{};
    for (std::size_t n = fine; n < fine + spec.preamble_len(); ++n) {
        // The common phase of the coarse correction cancels in the product; only the lag term remains.
        acc_f += rx[n + lag_f] * std::conj(rx[n]);
    }
    acc_f *= std::polar(1.0, step * static_cast<double>(lag_f));
    const double f_fine = std::arg(acc_f) * spec.sample_rate / (two_pi * static_cast<double>(lag_f));

    const double range = spec.coarse_cfo_range();
    double f = f_coarse + f_fine;
    f = std::remainder(f, 2.0 * range);
    return f;
}

/// Demodulated values, symbols x 64 subcarriers.
class SubcarrierGrid {
  public:
    SubcarrierGrid() = default;
    explicit SubcarrierGrid(std::size_t symbols) : symbols_{symbols}, cells_(symbols * 64) {}

    [[nodiscard]] std::size_t symbols() const noexcept { return symbols_; }

    /// Value of subcarrier @p k (1..64) in symbol @p s.
    [[nodiscard]] cplx at(std::size_t s, int k) const { return cells_.at(s * 64 + static_cast<std::size_t>(k - 1)); }
    cplx& at(std::size_t s, int k) { return cells_.at(s * 64 + static_cast<std::size_t>(k - 1)); }

  private:
    std::size_t symbols_ = 0;
    cvec cells_;
};

/// FFT of every data symbol's central 64 samples (head CP stripped) relative to @p frame_offset.
[[nodiscard]] inline SubcarrierGrid demodulate_ofdm(std::span<const cplx> rx, std::size_t frame_offset, const FrameSpec& spec = {}) {
    spec.validate();
    if (frame_offset + spec.data_start() + (spec.data_symbols - 1) * spec.data_symbol_len() + spec.cp_len + spec.fft_len > rx.size()) {
        throw argument_error("demodulate_ofdm: frame offset " + std::to_string(frame_offset) + " runs past the buffer");
    }
    SubcarrierGrid grid(spec.data_symbols);
    cvec body(spec.fft_len);
    for (std::size_t s = 0; s < spec.data_symbols; ++s) {
        const std::size_t start = frame_offset + spec.data_start() + s * spec.data_symbol_len() + spec.cp_len;
        std::copy_n(rx.begin() + static_cast<std::ptrdiff_t>(start), spec.fft_len, body.begin());
        dsp::dft_inplace(body, dsp::Direction::forward);
        for (int k = 1; k <= 64; ++k) {
            grid.at(s, k) = body[fft_bin(k)];
        }
    }
    return grid;
}

/// Per data carrier channel estimates plus each UE's per-subcarrier phase increment (radians).
struct ChannelEstimate {
    std::vector<int> carriers;  ///< data carriers, ascending
    cvec h1;
    cvec h2;
    double phi1 = 0.0;
    double phi2 = 0.0;
    cplx gain1{};  ///< fitted value at the DC carrier
    cplx gain2{};

    /// Fitted channel of @p ue at any carrier.
    [[nodiscard]] cplx model(UeId ue, int k) const {
        return ue == UeId::ue1 ? gain1 * std::polar(1.0, phi1 * frequency_index(k)) : gain2 * std::polar(1.0, phi2 * frequency_index(k));
    }
};

namespace detail {

struct PilotFit {
    double phi = 0.0;
    cplx intercept{};
};

/// Slope and intercept of pilot LS values H_m ~ c exp(j phi f_m).
inline PilotFit fit_linear_phase(const std::array<int, 8>& carriers, const std::array<cplx, 8>& h, double max_delay) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto coherence = [&](double phi) {
        cplx acc{};
        for (std::size_t m = 0; m < 8; ++m) {
            acc += h[m] * std::polar(1.0, -phi * frequency_index(carriers[m]));
        }
        return acc;
    };
    // Coarse search over delays, then refine with the mean neighbour correlation.
    double best_phi = 0.0;
    double best = std::abs(coherence(0.0));
    const int steps = static_cast<int>(std::ceil(std::max(0.0, max_delay) * 4.0));
    for (int i = -steps; i <= steps; ++i) {
        const double phi = -two_pi * (0.25 * i) / 64.0;
        const double c = std::abs(coherence(phi));
        if (c > best * (1.0 + 1e-12)) {
            best = c;
            best_phi = phi;
        }
    }
    const double mean_spacing = static_cast<double>(frequency_index(carriers[7]) - frequency_index(carriers[0])) / 7.0;
    for (int iter = 0; iter < 3; ++iter) {
        cplx acc{};
        for (std::size_t m = 0; m + 1 < 8; ++m) {
            const cplx a = h[m] * std::polar(1.0, -best_phi * frequency_index(carriers[m]));
            const cplx b = h[m + 1] * std::polar(1.0, -best_phi * frequency_index(carriers[m + 1]));
            acc += b * std::conj(a);
        }
        best_phi += std::arg(acc) / mean_spacing;
    }
    return PilotFit{best_phi, coherence(best_phi) / 8.0};
}

}  // namespace detail

/**
 * Least-squares pilot estimates averaged over @p symbols, a per-UE linear phase fit, and extrapolation
 * to the data carriers along the fitted model c exp(j phi f), which averages all 8 pilots of a flat link. @p max_delay bounds the
 * delay search in samples; pilots repeat every 6 carriers, so the fit is unambiguous for |delay| < 5.
 */
[[nodiscard]] inline ChannelEstimate estimate_channels_and_sco(const SubcarrierGrid& grid, const PilotMap& pilots,
                                                               std::span<const std::size_t> symbols, double max_delay = 1.0,
                                                               cplx known_pilot = pilot_symbol) {
    if (symbols.empty()) {
        throw argument_error("estimate_channels_and_sco: no pilot symbols selected");
    }
    ChannelEstimate est;
    est.carriers = pilots.data_carriers();
    for (UeId ue : {UeId::ue1, UeId::ue2}) {
        const auto& pc = pilots.own(ue);
        std::array<cplx, 8> h{};
        double energy = 0.0;
        for (std::size_t m = 0; m < 8; ++m) {
            for (std::size_t s : symbols) {
                if (s >= grid.symbols()) {
                    throw argument_error("estimate_channels_and_sco: symbol index out of range");
                }
                h[m] += grid.at(s, pc[m]) / known_pilot;
            }
            h[m] /= static_cast<double>(symbols.size());
            energy += std::norm(h[m]);
        }
        if (!(energy > 0.0)) {
            throw estimation_error("estimate_channels_and_sco: all pilots are zero");
        }
        const auto fit = detail::fit_linear_phase(pc, h, max_delay);
        cvec& out = ue == UeId::ue1 ? est.h1 : est.h2;
        for (int k : est.carriers) {
            out.push_back(fit.intercept * std::polar(1.0, fit.phi * frequency_index(k)));
        }
        (ue == UeId::ue1 ? est.phi1 : est.phi2) = fit.phi;
        (ue == UeId::ue1 ? est.gain1 : est.gain2) = fit.intercept;
    }
    return est;
}

/**
 * Phase drift of each UE's channel in data symbol @p s relative to @p est, as unit rotations measured on
 * that symbol's pilots. Tracks the residual carrier offset left after correction.
 */
[[nodiscard]] inline std::array<cplx, 2> pilot_phase(const SubcarrierGrid& grid, const PilotMap& pilots, const ChannelEstimate& est,
                                                     std::size_t s, cplx known_pilot = pilot_symbol) {
    std::array<cplx, 2> out{};
    for (UeId ue : {UeId::ue1, UeId::ue2}) {
        cplx acc{};
        for (int k : pilots.own(ue)) {
            acc += grid.at(s, k) * std::conj(known_pilot * est.model(ue, k));
        }
        out[ue == UeId::ue1 ? 0 : 1] = std::abs(acc) > 0.0 ? acc / std::abs(acc) : cplx{1.0, 0.0};
    }
    return out;
}

/// Per-carrier relative channel h2 / h1.
[[nodiscard]] inline cvec equalize_and_ratio(std::span<const cplx> h1, std::span<const cplx> h2, double min_gain = 1e-9) {
    if (h1.size() != h2.size()) {
        throw argument_error("equalize_and_ratio: length mismatch");
    }
    cvec out(h1.size());
    for (std::size_t i = 0; i < h1.size(); ++i) {
        if (std::abs(h1[i]) < min_gain) {
            throw estimation_error("equalize_and_ratio: degenerate channel, |h1| below threshold");
        }
        out[i] = h2[i] / h1[i];
    }
    return out;
}

[[nodiscard]] inline cplx mean_ratio(std::span<const cplx> ratios) {
    if (ratios.empty()) {
        throw argument_error("mean_ratio: empty input");
    }
    cplx acc{};
    for (cplx r : ratios) {
        acc += r;
    }
    return acc / static_cast<double>(ratios.size());
}

/// "re,im" per line, full precision.
inline void write_samples_csv(std::ostream& os, std::span<const cplx> samples) {
    const auto old = os.precision(17);
    for (const auto& s : samples) {
        os << s.real() << ',' << s.imag() << '\n';
    }
    os.precision(old);
}

}  // namespace netcom::ofdm
