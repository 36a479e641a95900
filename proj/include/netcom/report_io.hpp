/**
 * @file report_io.hpp
 * @brief CSV output: SER reports, superimposed constellations, channel estimates.
 *
 * Reals use the shortest round-trip form, so a written report re-parses to identical numbers. Aborted
 * points carry "nan" in the SER columns.
 */
#pragma once

#include <cerrno>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "netcom/catalog_io.hpp"
#include "netcom/error.hpp"
#include "netcom/pnc.hpp"
#include "netcom/sim.hpp"

namespace netcom::report {

using sim::cplx;

inline constexpr std::string_view ser_header = "ebno_db,symbols,errors,ser,ci_halfwidth,baseline_ser,fallback_rate,stall_rate";

namespace detail {

using pnc::detail::format_real;

inline std::string format_uint(std::uint64_t x) { return std::to_string(x); }

inline double read_real(const std::string& tok) {
    double x = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (tok.empty() || r.ec != std::errc{} || r.ptr != tok.data() + tok.size()) {
        throw parse_error("report: bad number '" + tok + "'");
    }
    return x;
}

inline std::uint64_t read_uint(const std::string& tok) {
    std::uint64_t x = 0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (tok.empty() || r.ec != std::errc{} || r.ptr != tok.data() + tok.size()) {
        throw parse_error("report: bad count '" + tok + "'");
    }
    return x;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) {
        throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    }
    return os;
}

inline void finish(std::ofstream& os, const std::string& path) {
    if (!os.flush()) {
        throw std::system_error(errno, std::generic_category(), "write failed: " + path);
    }
}

}  // namespace detail

inline void write_ser_csv(std::ostream& os, const sim::SerReport& rep) {
    using detail::format_real;
    os << ser_header << '\n';
    for (const auto& p : rep.points) {
        os << format_real(p.ebno_db) << ',' << p.symbols << ',' << p.errors << ',' << format_real(p.ser) << ','
           << format_real(p.ci_halfwidth) << ',' << format_real(p.baseline_ser) << ',' << format_real(p.fallback_rate) << ','
           << format_real(p.stall_rate) << '\n';
    }
}

/// Reads the columns written by write_ser_csv; other SerPoint fields stay default.
[[nodiscard]] inline sim::SerReport read_ser_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != ser_header) {
        throw parse_error("report: missing or unexpected header");
    }
    sim::SerReport rep;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1) {
            f.push_back(line.substr(start, pos - start));
        }
        f.push_back(line.substr(start));
        if (f.size() != 8) {
            throw parse_error("report: expected 8 columns, got " + std::to_string(f.size()));
        }
        sim::SerPoint p;
        p.ebno_db = detail::read_real(f[0]);
        p.symbols = detail::read_uint(f[1]);
        p.errors = detail::read_uint(f[2]);
        p.ser = detail::read_real(f[3]);
        p.ci_halfwidth = detail::read_real(f[4]);
        p.baseline_ser = detail::read_real(f[5]);
        p.fallback_rate = detail::read_real(f[6]);
        p.stall_rate = detail::read_real(f[7]);
        p.aborted = std::isnan(p.ser);
        rep.points.push_back(p);
    }
    return rep;
}

inline void export_report(const sim::SerReport& rep, const std::string& path) {
    auto os = detail::open_out(path);
    write_ser_csv(os, rep);
    detail::finish(os, path);
}

/// The 16 noiseless points h1 s1 + h2 s2 with the coded vector each carries under @p mapping (2x4).
inline void write_constellation_csv(std::ostream& os, cplx h1, cplx h2, const gf2::Matrix& mapping) {
    using detail::format_real;
    const auto sc = pnc::superimpose(h1, h2);
    const auto ncv = pnc::ncv_table(mapping);
    os << "word,ue1,ue2,re,im,ncv\n";
    for (unsigned w = 0; w < pnc::joint_words; ++w) {
        const pnc::SourceWord word(w);
        os << w << ',' << word.ue1() << ',' << word.ue2() << ',' << format_real(sc.points[w].real()) << ','
           << format_real(sc.points[w].imag()) << ',' << ncv[w].value() << '\n';
    }
}

/// One AP's per-carrier channel knowledge for data symbol @p symbol.
inline void write_channel_csv(std::ostream& os, int ap, const sim::ApView& view, std::size_t symbol = 0, bool header = true) {
    using detail::format_real;
    const auto carriers = ofdm::PilotMap{}.data_carriers();
    if (header) {
        os << "ap,carrier,freq_index,h1_re,h1_im,h2_re,h2_im,ratio_re,ratio_im\n";
    }
    for (std::size_t c = 0; c < carriers.size(); ++c) {
        const std::size_t i = symbol * carriers.size() + c;
        const cplx h1 = view.h1.at(i), h2 = view.h2.at(i);
        const cplx r = h2 / h1;
        os << ap << ',' << carriers[c] << ',' << ofdm::frequency_index(carriers[c]) << ',' << format_real(h1.real()) << ','
           << format_real(h1.imag()) << ',' << format_real(h2.real()) << ',' << format_real(h2.imag()) << ','
           << format_real(r.real()) << ',' << format_real(r.imag()) << '\n';
    }
}

}  // namespace netcom::report
