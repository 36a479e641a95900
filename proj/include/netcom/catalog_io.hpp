/**
 * @file catalog_io.hpp
 * @brief Plain-text export/import of a MappingCatalog.
 *
 * Layout (one item per line, '#' starts a comment):
 *
 *     point <label> <re> <im>        x4, the constellation labelling
 *     tolerance <tol>
 *     sfs <L>                        followed by L lines "<re> <im>"
 *     images <K>                     followed by K lines "<class> <re> <im>"
 *     candidate <l>                  followed by a 2x4 block in the gf2 text format
 *     M <i> <j>                      followed by a 4x4 block and "dmin <d1> <d2>"
 *
 * Reals are written in shortest round-trip form, so export -> import reproduces the catalog exactly.
 */
#pragma once

#include <cerrno>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "netcom/error.hpp"
#include "netcom/gf2.hpp"
#include "netcom/pnc.hpp"

namespace netcom::pnc {

namespace detail {

inline std::string format_real(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

inline double parse_real(const std::string& tok) {
    double x = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size()) {
        throw parse_error("catalog: bad number '" + tok + "'");
    }
    return x;
}

inline long parse_int(const std::string& tok) {
    long x = 0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size()) {
        throw parse_error("catalog: bad integer '" + tok + "'");
    }
    return x;
}

class LineReader {
  public:
    explicit LineReader(std::istream& is) : is_{is} {}

    /// Next non-empty, non-comment line split on whitespace; empty when the stream ends.
    std::vector<std::string> next() {
        std::string line;
        while (std::getline(is_, line)) {
            ++line_no_;
            if (const auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            std::istringstream ss(line);
            std::vector<std::string> toks;
            for (std::string t; ss >> t;) {
                toks.push_back(t);
            }
            if (!toks.empty()) {
                return toks;
            }
        }
        return {};
    }

    std::vector<std::string> expect(const std::string& key, std::size_t n_fields) {
        auto toks = next();
        if (toks.empty() || (!key.empty() && toks[0] != key) || toks.size() != n_fields) {
            throw parse_error("catalog line " + std::to_string(line_no_) + ": expected '" + key + "' with " +
                              std::to_string(n_fields - 1) + " field(s)");
        }
        return toks;
    }

    gf2::Matrix matrix(std::size_t rows) {
        std::vector<std::string> lines;
        for (std::size_t r = 0; r < rows; ++r) {
            auto toks = next();
            if (toks.size() != 1) {
                throw parse_error("catalog line " + std::to_string(line_no_) + ": expected a matrix row");
            }
            lines.push_back(toks[0]);
        }
        try {
            std::vector<std::string_view> views(lines.begin(), lines.end());
            return gf2::Matrix::from_rows(views);
        } catch (const argument_error& e) {
            throw parse_error(std::string("catalog: ") + e.what());
        }
    }

  private:
    std::istream& is_;
    std::size_t line_no_ = 0;
};

}  // namespace detail

inline void write_catalog(std::ostream& os, const MappingCatalog& cat) {
    using detail::format_real;
    os << "# netcom PNC mapping catalog\n";
    const char* labels[] = {"00", "01", "10", "11"};
    for (unsigned b = 0; b < 4; ++b) {
        os << "point " << labels[b] << ' ' << format_real(cat.constellation(b).real()) << ' '
           << format_real(cat.constellation(b).imag()) << '\n';
    }
    os << "tolerance " << format_real(cat.tolerance) << '\n';
    os << "sfs " << cat.sfs.size() << '\n';
    std::size_t n_images = 0;
    for (const auto& c : cat.sfs.classes) {
        os << format_real(c.value.real()) << ' ' << format_real(c.value.imag()) << '\n';
        n_images += c.images.size();
    }
    os << "images " << n_images << '\n';
    for (std::size_t l = 0; l < cat.sfs.size(); ++l) {
        for (cplx v : cat.sfs.classes[l].images) {
            os << l + 1 << ' ' << format_real(v.real()) << ' ' << format_real(v.imag()) << '\n';
        }
    }
    for (std::size_t l = 0; l < cat.candidates.size(); ++l) {
        os << "\ncandidate " << l + 1 << '\n';
        gf2::write_text(os, cat.candidates[l]);
    }
    const int n = static_cast<int>(cat.sfs.size());
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            const auto& e = cat.entry(SfsIndex{i}, SfsIndex{j});
            os << "\nM " << i << ' ' << j << '\n';
            gf2::write_text(os, e.combined);
            os << "dmin " << format_real(e.dmin_ap1) << ' ' << format_real(e.dmin_ap2) << '\n';
        }
    }
}

[[nodiscard]] inline MappingCatalog read_catalog(std::istream& is) {
    using detail::parse_int;
    using detail::parse_real;
    detail::LineReader in(is);

    std::array<cplx, 4> points{};
    for (unsigned b = 0; b < 4; ++b) {
        const auto t = in.expect("point", 4);
        const auto label = t[1];
        if (label.size() != 2 || (label[0] != '0' && label[0] != '1') || (label[1] != '0' && label[1] != '1')) {
            throw parse_error("catalog: bad point label '" + label + "'");
        }
        points[static_cast<std::size_t>((label[0] - '0') * 2 + (label[1] - '0'))] = {parse_real(t[2]), parse_real(t[3])};
    }
    MappingCatalog cat;
    try {
        cat.constellation = QamConstellation(points);
    } catch (const argument_error& e) {
        throw parse_error(std::string("catalog: ") + e.what());
    }
    cat.tolerance = parse_real(in.expect("tolerance", 2)[1]);
    cat.sfs.tolerance = cat.tolerance;

    const long n_sfs = parse_int(in.expect("sfs", 2)[1]);
    if (n_sfs < 1 || n_sfs > 64) {
        throw parse_error("catalog: implausible SFS count");
    }
    for (long l = 0; l < n_sfs; ++l) {
        const auto t = in.expect("", 2);
        cat.sfs.classes.push_back(SfsClass{{parse_real(t[0]), parse_real(t[1])}, {}});
    }
    const long n_images = parse_int(in.expect("images", 2)[1]);
    for (long k = 0; k < n_images; ++k) {
        const auto t = in.expect("", 3);
        const long l = parse_int(t[0]);
        if (l < 1 || l > n_sfs) {
            throw parse_error("catalog: image class out of range");
        }
        cat.sfs.classes[static_cast<std::size_t>(l - 1)].images.emplace_back(parse_real(t[1]), parse_real(t[2]));
    }
    for (long l = 1; l <= n_sfs; ++l) {
        if (parse_int(in.expect("candidate", 2)[1]) != l) {
            throw parse_error("catalog: candidates out of order");
        }
        cat.candidates.push_back(in.matrix(2));
    }
    for (long i = 1; i <= n_sfs; ++i) {
        for (long j = 1; j <= n_sfs; ++j) {
            const auto t = in.expect("M", 3);
            if (parse_int(t[1]) != i || parse_int(t[2]) != j) {
                throw parse_error("catalog: mapping blocks out of order at M " + t[1] + " " + t[2]);
            }
            MappingEntry e{in.matrix(4), 0.0, 0.0};
            const auto d = in.expect("dmin", 3);
            e.dmin_ap1 = parse_real(d[1]);
            e.dmin_ap2 = parse_real(d[2]);
            if (gf2::rank(e.combined) != 4) {
                throw integrity_error("catalog: M " + t[1] + " " + t[2] + " is singular");
            }
            cat.table.push_back(e);
        }
    }
    if (!in.next().empty()) {
        throw parse_error("catalog: trailing content");
    }
    return cat;
}

inline void export_catalog(const MappingCatalog& cat, const std::string& path) {
    std::ofstream os(path);
    if (!os) {
        throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    }
    write_catalog(os, cat);
    if (!os.flush()) {
        throw std::system_error(errno, std::generic_category(), "write failed: " + path);
    }
}

[[nodiscard]] inline MappingCatalog import_catalog(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    }
    return read_catalog(is);
}

}  // namespace netcom::pnc
