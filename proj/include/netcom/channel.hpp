/**
 * @file channel.hpp
 * @brief Flat access links y_j = h_j1 s_1 + h_j2 s_2 + z_j with carrier offset, sample delay and AWGN.
 *
 * Noise convention: each UE sends unit energy per 4-QAM symbol (Eb = 1/2), and with the unitary FFT a
 * time-domain noise variance N0 per complex sample is also N0 per subcarrier. Es/N0 on a data carrier is
 * therefore Eb/N0 + 3.01 dB.
 */
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "netcom/error.hpp"
#include "netcom/fft.hpp"
#include "netcom/ofdm.hpp"

namespace netcom::channel {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using Rng = std::mt19937_64;

struct LinkChannel {
    cplx h{1.0, 0.0};
    double delay = 0.0;  ///< samples, may be fractional and negative
    double cfo = 0.0;    ///< Hz

    friend bool operator==(const LinkChannel&, const LinkChannel&) = default;
};

struct NoiseSpec {
    double ebno_db = 10.0;
    double bits_per_symbol = 2.0;
    double symbol_energy = 1.0;

    [[nodiscard]] double eb() const noexcept { return symbol_energy / bits_per_symbol; }
    [[nodiscard]] double n0() const noexcept { return eb() / std::pow(10.0, ebno_db / 10.0); }
    /// Variance per real dimension.
    [[nodiscard]] double sigma2() const noexcept { return n0() / 2.0; }
    [[nodiscard]] double esn0_db() const noexcept { return ebno_db + 10.0 * std::log10(bits_per_symbol); }
};

enum class FadingModel { fixed, rayleigh_block };

/// Fixed mode returns @p fixed; Rayleigh mode replaces the gain by a unit mean-square CN(0, 1) draw.
[[nodiscard]] inline LinkChannel sample_fading(Rng& rng, FadingModel model, const LinkChannel& fixed = {}) {
    LinkChannel out = fixed;
    if (model == FadingModel::rayleigh_block) {
        std::normal_distribution<double> g(0.0, std::sqrt(0.5));
        const double re = g(rng);
        const double im = g(rng);
        out.h = {re, im};
    }
    return out;
}

inline void add_awgn(std::span<cplx> samples, double sigma2, Rng& rng) {
    if (sigma2 <= 0.0) {
        return;
    }
    std::normal_distribution<double> g(0.0, std::sqrt(sigma2));
    for (auto& s : samples) {
        const double re = g(rng);
        const double im = g(rng);
        s += cplx{re, im};
    }
}

/// y[n] = x(n - delay). Integer delays shift exactly; fractional ones use band-limited (FFT) interpolation
/// over a zero-padded buffer, so content must sit away from the buffer edges.
[[nodiscard]] inline cvec delay_shift(std::span<const cplx> x, double delay) {
    const double whole = std::round(delay);
    const double frac = delay - whole;
    const auto shift = static_cast<std::ptrdiff_t>(whole);
    const auto len = static_cast<std::ptrdiff_t>(x.size());
    cvec y(x.size());
    for (std::ptrdiff_t n = 0; n < len; ++n) {
        const std::ptrdiff_t src = n - shift;
        if (src >= 0 && src < len) {
            y[static_cast<std::size_t>(n)] = x[static_cast<std::size_t>(src)];
        }
    }
    if (std::abs(frac) < 1e-12) {
        return y;
    }
    std::size_t n_fft = 1;
    while (n_fft < x.size() + 128) {
        n_fft <<= 1;
    }
    cvec buf(n_fft);
    std::copy(y.begin(), y.end(), buf.begin() + 64);
    dsp::dft_inplace(buf, dsp::Direction::forward);
    const double two_pi = 2.0 * std::numbers::pi;
    const auto n = static_cast<std::ptrdiff_t>(n_fft);
    for (std::ptrdiff_t b = 0; b < n; ++b) {
        const std::ptrdiff_t f = b < n / 2 ? b : b - n;
        if (f == -n / 2) {
            buf[static_cast<std::size_t>(b)] *= std::cos(std::numbers::pi * frac);  // Nyquist bin: keep it real
        } else {
            buf[static_cast<std::size_t>(b)] *= std::polar(1.0, -two_pi * static_cast<double>(f) * frac / static_cast<double>(n));
        }
    }
    dsp::dft_inplace(buf, dsp::Direction::inverse);
    std::copy(buf.begin() + 64, buf.begin() + 64 + len, y.begin());
    return y;
}

/// Multiplies sample n by exp(+j 2 pi cfo n / fs).
[[nodiscard]] inline cvec cfo_shift(std::span<const cplx> x, double cfo_hz, double sample_rate) {
    cvec out(x.begin(), x.end());
    if (cfo_hz == 0.0) {
        return out;
    }
    const double step = 2.0 * std::numbers::pi * cfo_hz / sample_rate;
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] *= std::polar(1.0, std::remainder(step * static_cast<double>(n), 2.0 * std::numbers::pi));
    }
    return out;
}

/// Receive-buffer geometry: the frames start @p lead samples in, followed by @p tail spare samples.
struct BufferLayout {
    std::size_t lead = 32;
    std::size_t tail = 32;
};

/**
 * One AP's received samples: both UE frames placed at layout.lead, each shifted in frequency and time by
 * its link, scaled by the link gain, summed, plus AWGN when @p noise is given.
 */
[[nodiscard]] inline cvec apply_access_link(const ofdm::UeFrame& f1, const ofdm::UeFrame& f2, const LinkChannel& ch1,
                                            const LinkChannel& ch2, const std::optional<NoiseSpec>& noise, Rng& rng,
                                            const BufferLayout& layout = {}, const ofdm::FrameSpec& spec = {}) {
    if (std::abs(ch1.delay - ch2.delay) >= static_cast<double>(spec.cp_len)) {
        throw argument_error("apply_access_link: inter-UE delay must be within the cyclic prefix");
    }
    for (const auto* ch : {&ch1, &ch2}) {
        if (!std::isfinite(std::abs(ch->h))) {
            throw argument_error("apply_access_link: channel gain must be finite");
        }
        if (std::abs(ch->delay) + 1.0 > static_cast<double>(std::min(layout.lead, layout.tail))) {
            throw argument_error("apply_access_link: delay exceeds the buffer margins");
        }
    }
    const std::size_t len = layout.lead + std::max(f1.samples.size(), f2.samples.size()) + layout.tail;
    cvec rx(len);
    for (const auto& [frame, ch] : {std::pair{&f1, &ch1}, std::pair{&f2, &ch2}}) {
        if (ch->h == cplx{}) {
            continue;
        }
        cvec buf(len);
        std::copy(frame->samples.begin(), frame->samples.end(), buf.begin() + static_cast<std::ptrdiff_t>(layout.lead));
        buf = delay_shift(cfo_shift(buf, ch->cfo, spec.sample_rate), ch->delay);
        for (std::size_t n = 0; n < len; ++n) {
            rx[n] += ch->h * buf[n];
        }
    }
    if (noise) {
        add_awgn(rx, noise->sigma2(), rng);
    }
    return rx;
}

/// 10 log10(sum |clean|^2 / sum |noisy - clean|^2); +infinity when the inputs are identical.
[[nodiscard]] inline double measured_snr(std::span<const cplx> clean, std::span<const cplx> noisy) {
    if (clean.size() != noisy.size()) {
        throw argument_error("measured_snr: length mismatch");
    }
    double ps = 0.0, pn = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        ps += std::norm(clean[i]);
        pn += std::norm(noisy[i] - clean[i]);
    }
    if (ps == 0.0) {
        throw estimation_error("measured_snr: undefined SNR, reference signal is zero");
    }
    if (pn == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(ps / pn);
}

}  // namespace netcom::channel
