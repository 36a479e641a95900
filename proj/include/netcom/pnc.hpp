/**
 * @file pnc.hpp
 * @brief Binary physical-layer network coding for two 4-QAM users received at two access points.
 *
 * An access point j sees y = h_j1 s_1 + h_j2 s_2 + z. It forwards a 2-bit network coded vector
 * x_j = M_j w (GF(2)), where w is the 4-bit joint message and M_j a 2x4 binary mapping. The hub stacks
 * both mappings into a 4x4 matrix and inverts it to recover w.
 *
 * A singular fade state (SFS) is a channel ratio v = h_j2 / h_j1 at which two joint symbols collide.
 * A mapping "resolves" v when colliding symbols always share a coded vector. The offline search finds
 * the SFS catalog and, for every pair of SFS indices (one per AP), a full-rank combined mapping; the
 * online step only looks the pair up.
 *
 * Indices follow the published numbering: SFS indices are 1-based (1..5) and the combined mapping index
 * is 5 (i - 1) + j (1..25).
 */

#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "netcom/error.hpp"
#include "netcom/gf2.hpp"

namespace netcom::pnc {

using cplx = std::complex<double>;

inline constexpr std::size_t joint_words = 16;
inline constexpr std::size_t sfs_count = 5;
inline constexpr std::size_t mapping_count = sfs_count * sfs_count;
inline constexpr double default_tolerance = 1e-9;

/// Joint message w = [UE1 bits | UE2 bits]; UE1 occupies the two most significant bits.
class SourceWord {
  public:
    constexpr SourceWord() = default;
    constexpr explicit SourceWord(unsigned value) : value_{static_cast<std::uint8_t>(value)} {
        if (value >= joint_words) {
            throw argument_error("SourceWord must be in [0, 15], got " + std::to_string(value));
        }
    }

    static constexpr SourceWord from_ue_bits(unsigned ue1, unsigned ue2) { return SourceWord(((ue1 & 3U) << 2) | (ue2 & 3U)); }

    [[nodiscard]] constexpr unsigned value() const noexcept { return value_; }
    [[nodiscard]] constexpr unsigned ue1() const noexcept { return value_ >> 2; }
    [[nodiscard]] constexpr unsigned ue2() const noexcept { return value_ & 3U; }
    [[nodiscard]] gf2::Vector vector() const { return gf2::Vector(4, value_); }

    friend constexpr auto operator<=>(const SourceWord&, const SourceWord&) = default;

  private:
    std::uint8_t value_ = 0;
};

/// Network coded vector: the 2 bits an access point forwards per symbol.
class Ncv {
  public:
    constexpr Ncv() = default;
    constexpr explicit Ncv(unsigned value) : value_{static_cast<std::uint8_t>(value)} {
        if (value > 3) {
            throw argument_error("Ncv must be in [0, 3], got " + std::to_string(value));
        }
    }
    static Ncv from_vector(const gf2::Vector& v) {
        if (v.size() != 2) {
            throw argument_error("Ncv needs exactly 2 bits");
        }
        return Ncv(v.bits());
    }

    [[nodiscard]] constexpr unsigned value() const noexcept { return value_; }
    [[nodiscard]] gf2::Vector vector() const { return gf2::Vector(2, value_); }

    friend constexpr auto operator<=>(const Ncv&, const Ncv&) = default;

  private:
    std::uint8_t value_ = 0;
};

struct SfsIndex {
    int value = 1;
    friend constexpr auto operator<=>(const SfsIndex&, const SfsIndex&) = default;
};

struct MappingIndex {
    int value = 1;
    friend constexpr auto operator<=>(const MappingIndex&, const MappingIndex&) = default;
};

[[nodiscard]] constexpr MappingIndex mapping_index(SfsIndex i, SfsIndex j) noexcept {
    return MappingIndex{static_cast<int>(sfs_count) * (i.value - 1) + j.value};
}

[[nodiscard]] constexpr std::pair<SfsIndex, SfsIndex> sfs_pair(MappingIndex m) noexcept {
    const int z = m.value - 1;
    return {SfsIndex{z / static_cast<int>(sfs_count) + 1}, SfsIndex{z % static_cast<int>(sfs_count) + 1}};
}

/// True when a and b agree to @p tol relative to max(1, |a|, |b|).
[[nodiscard]] inline bool approx_equal(double a, double b, double tol) noexcept {
    if (std::isinf(a) || std::isinf(b)) {
        return a == b;
    }
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

[[nodiscard]] inline bool approx_equal(cplx a, cplx b, double tol) noexcept {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

class QamConstellation {
  public:
    /// @p by_label[b] is the point for the bit pair b (first bit most significant).
    explicit QamConstellation(const std::array<cplx, 4>& by_label) : points_{by_label} {
        double energy = 0.0;
        for (std::size_t a = 0; a < 4; ++a) {
            energy += std::norm(points_[a]);
            for (std::size_t b = a + 1; b < 4; ++b) {
                if (approx_equal(points_[a], points_[b], default_tolerance)) {
                    throw argument_error("QamConstellation points must be distinct");
                }
            }
        }
        if (!approx_equal(energy / 4.0, 1.0, 1e-9)) {
            throw argument_error("QamConstellation must have unit average energy");
        }
    }

    /// Gray-labelled unit-energy 4-QAM: 00 -> (+1+i)/sqrt2, 01 -> (-1+i)/sqrt2, 11 -> (-1-i)/sqrt2, 10 -> (+1-i)/sqrt2.
    static const QamConstellation& gray() {
        static const QamConstellation c = [] {
            const double a = std::numbers::sqrt2 / 2.0;
            return QamConstellation({cplx{a, a}, cplx{-a, a}, cplx{a, -a}, cplx{-a, -a}});
        }();
        return c;
    }

    [[nodiscard]] const cplx& operator()(unsigned bits) const noexcept { return points_[bits & 3U]; }
    [[nodiscard]] const std::array<cplx, 4>& points() const noexcept { return points_; }

    /// Hard decision: label of the nearest point.
    [[nodiscard]] unsigned slice(cplx y) const noexcept {
        unsigned best = 0;
        double best_d = std::norm(y - points_[0]);
        for (unsigned b = 1; b < 4; ++b) {
            const double d = std::norm(y - points_[b]);
            if (d < best_d) {
                best_d = d;
                best = b;
            }
        }
        return best;
    }

    friend bool operator==(const QamConstellation&, const QamConstellation&) = default;

  private:
    std::array<cplx, 4> points_;
};

[[nodiscard]] inline cplx modulate_4qam(unsigned bits, const QamConstellation& c = QamConstellation::gray()) { return c(bits); }

/// All 16 noiseless receive points h1 s1(w) + h2 s2(w), indexed by SourceWord value.
struct SuperposedConstellation {
    cplx h1;
    cplx h2;
    std::array<cplx, joint_words> points;
};

[[nodiscard]] inline SuperposedConstellation superimpose(cplx h1, cplx h2, const QamConstellation& c = QamConstellation::gray()) {
    SuperposedConstellation sc{h1, h2, {}};
    for (unsigned w = 0; w < joint_words; ++w) {
        const SourceWord word(w);
        sc.points[w] = h1 * c(word.ue1()) + h2 * c(word.ue2());
    }
    return sc;
}

[[nodiscard]] inline Ncv pnc_encode(const gf2::Matrix& m, SourceWord w) {
    if (m.rows() != 2 || m.cols() != 4) {
        throw argument_error("pnc_encode needs a 2x4 mapping matrix");
    }
    return Ncv::from_vector(gf2::multiply(m, w.vector()));
}

/// Coded vector of every joint word under @p m.
[[nodiscard]] inline std::array<Ncv, joint_words> ncv_table(const gf2::Matrix& m) {
    std::array<Ncv, joint_words> out{};
    for (unsigned w = 0; w < joint_words; ++w) {
        out[w] = pnc_encode(m, SourceWord(w));
    }
    return out;
}

/**
 * Minimum squared distance between superimposed points that carry different coded vectors.
 * +infinity when @p m maps all 16 words to one coded vector.
 */
[[nodiscard]] inline double min_ncv_distance(const SuperposedConstellation& sc, const gf2::Matrix& m) {
    const auto label = ncv_table(m);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < joint_words; ++a) {
        for (std::size_t b = a + 1; b < joint_words; ++b) {
            if (label[a] != label[b]) {
                best = std::min(best, std::norm(sc.points[a] - sc.points[b]));
            }
        }
    }
    return best;
}

/// Whether every pair of words that collide at channel (1, v) shares a coded vector under @p m.
[[nodiscard]] inline bool resolves_sfs(cplx v, const gf2::Matrix& m, double tol = default_tolerance,
                                       const QamConstellation& c = QamConstellation::gray()) {
    const auto sc = superimpose(1.0, v, c);
    const auto label = ncv_table(m);
    for (std::size_t a = 0; a < joint_words; ++a) {
        for (std::size_t b = a + 1; b < joint_words; ++b) {
            if (label[a] != label[b] && approx_equal(sc.points[a], sc.points[b], tol)) {
                return false;
            }
        }
    }
    return true;
}

/// One singular fade state: the retained value plus the image values resolved by the same mappings.
struct SfsClass {
    cplx value;
    std::vector<cplx> images;

    friend bool operator==(const SfsClass&, const SfsClass&) = default;
};

struct SfsCatalog {
    std::vector<SfsClass> classes;
    double tolerance = default_tolerance;

    [[nodiscard]] std::size_t size() const noexcept { return classes.size(); }

    [[nodiscard]] const SfsClass& at(SfsIndex l) const {
        if (l.value < 1 || static_cast<std::size_t>(l.value) > classes.size()) {
            throw argument_error("SFS index out of range: " + std::to_string(l.value));
        }
        return classes[static_cast<std::size_t>(l.value - 1)];
    }

    [[nodiscard]] cplx value(SfsIndex l) const { return at(l).value; }

    [[nodiscard]] std::vector<cplx> values() const {
        std::vector<cplx> out;
        for (const auto& c : classes) {
            out.push_back(c.value);
        }
        return out;
    }

    friend bool operator==(const SfsCatalog&, const SfsCatalog&) = default;
};

namespace detail {

/// Rank-2 2x4 matrices in enumeration order, as (pattern, matrix).
inline const std::vector<std::pair<std::uint32_t, gf2::Matrix>>& surjective_mappings() {
    static const auto list = [] {
        std::vector<std::pair<std::uint32_t, gf2::Matrix>> out;
        std::uint32_t p = 0;
        for (const auto& m : gf2::enumerate_matrices(2, 4)) {
            if (gf2::rank(m) == 2) {
                out.emplace_back(p, m);
            }
            ++p;
        }
        return out;
    }();
    return list;
}

/// Argument folded into [0, 2 pi), with values within tol of 2 pi snapped to 0.
inline double canonical_arg(cplx v, double tol) {
    if (std::abs(v) <= tol) {
        return 0.0;
    }
    double a = std::arg(v);
    if (a < 0.0) {
        a += 2.0 * std::numbers::pi;
    }
    if (2.0 * std::numbers::pi - a <= tol) {
        a = 0.0;
    }
    return a;
}

}  // namespace detail

/**
 * Singular fade states of a 4-QAM pair, as seen with h_j1 = 1.
 *
 * Every ratio (s1(t) - s1(t')) / (s2(t') - s2(t)) over word pairs with distinct UE2 symbols is collected
 * and de-duplicated within @p tol. Two values are images of one another when a single surjective 2x4
 * mapping resolves both; each image class keeps one representative (smallest argument in [0, 2 pi), then
 * smallest magnitude). Classes are ordered by ascending magnitude of the representative, then by
 * descending argument, which reproduces the published SFS numbering for the Gray labelling.
 */
[[nodiscard]] inline SfsCatalog enumerate_sfs(const QamConstellation& c = QamConstellation::gray(), double tol = default_tolerance) {
    if (!(tol > 0.0)) {
        throw argument_error("enumerate_sfs: tolerance must be positive");
    }
    std::vector<cplx> raw;
    for (unsigned t = 0; t < joint_words; ++t) {
        for (unsigned u = 0; u < joint_words; ++u) {
            if (t == u) {
                continue;
            }
            const SourceWord a(t), b(u);
            const cplx den = c(b.ue2()) - c(a.ue2());
            if (std::abs(den) <= tol) {
                continue;
            }
            const cplx v = (c(a.ue1()) - c(b.ue1())) / den;
            if (std::none_of(raw.begin(), raw.end(), [&](cplx r) { return approx_equal(r, v, tol); })) {
                raw.push_back(v);
            }
        }
    }

    const auto& maps = detail::surjective_mappings();
    std::vector<std::bitset<256>> resolvers(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
        for (const auto& [p, m] : maps) {
            if (resolves_sfs(raw[k], m, tol, c)) {
                resolvers[k].set(p);
            }
        }
    }

    // Union-find over "shares a resolver".
    std::vector<std::size_t> parent(raw.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    for (std::size_t a = 0; a < raw.size(); ++a) {
        for (std::size_t b = a + 1; b < raw.size(); ++b) {
            if ((resolvers[a] & resolvers[b]).any()) {
                parent[find(a)] = find(b);
            }
        }
    }

    auto before = [tol](cplx a, cplx b) {
        const double aa = detail::canonical_arg(a, tol), ab = detail::canonical_arg(b, tol);
        if (!approx_equal(aa, ab, tol)) {
            return aa < ab;
        }
        return std::abs(a) < std::abs(b);
    };

    std::vector<SfsClass> classes;
    std::vector<std::size_t> roots;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const std::size_t r = find(k);
        auto it = std::find(roots.begin(), roots.end(), r);
        if (it == roots.end()) {
            roots.push_back(r);
            classes.push_back(SfsClass{raw[k], {}});
        } else {
            classes[static_cast<std::size_t>(it - roots.begin())].images.push_back(raw[k]);
        }
    }
    for (auto& cl : classes) {
        std::vector<cplx> members = cl.images;
        members.push_back(cl.value);
        std::sort(members.begin(), members.end(), before);
        cl.value = members.front();
        cl.images.assign(members.begin() + 1, members.end());
    }
    std::sort(classes.begin(), classes.end(), [tol](const SfsClass& a, const SfsClass& b) {
        const double ma = std::abs(a.value), mb = std::abs(b.value);
        if (!approx_equal(ma, mb, tol)) {
            return ma < mb;
        }
        return detail::canonical_arg(a.value, tol) > detail::canonical_arg(b.value, tol);
    });
    return SfsCatalog{std::move(classes), tol};
}

/// Class index of the SFS member closest to @p h_ratio; exact ties go to the lower index.
[[nodiscard]] inline SfsIndex nearest_sfs(cplx h_ratio, const SfsCatalog& cat) {
    if (!std::isfinite(h_ratio.real()) || !std::isfinite(h_ratio.imag())) {
        throw argument_error("nearest_sfs: channel ratio must be finite");
    }
    if (cat.classes.empty()) {
        throw argument_error("nearest_sfs: empty catalog");
    }
    double best = std::numeric_limits<double>::infinity();
    int best_index = 1;
    for (std::size_t l = 0; l < cat.classes.size(); ++l) {
        const auto consider = [&](cplx v) {
            const double d = std::abs(h_ratio - v);
            if (d < best) {
                best = d;
                best_index = static_cast<int>(l) + 1;
            }
        };
        consider(cat.classes[l].value);
        for (cplx v : cat.classes[l].images) {
            consider(v);
        }
    }
    return SfsIndex{best_index};
}

struct MappingEntry {
    gf2::Matrix combined;  ///< [AP1 mapping; AP2 mapping], 4x4
    double dmin_ap1 = 0.0;  ///< d_min of the top half at SFS i
    double dmin_ap2 = 0.0;  ///< d_min of the bottom half at SFS j

    [[nodiscard]] gf2::Matrix ap1() const { return combined.row_slice(0, 2); }
    [[nodiscard]] gf2::Matrix ap2() const { return combined.row_slice(2, 2); }

    friend bool operator==(const MappingEntry&, const MappingEntry&) = default;
};

struct MappingCatalog {
    QamConstellation constellation = QamConstellation::gray();
    double tolerance = default_tolerance;
    SfsCatalog sfs;
    std::vector<gf2::Matrix> candidates;  ///< optimal resolving 2x4 mapping per SFS, index l - 1
    std::vector<MappingEntry> table;      ///< row-major over (i, j), index mapping_index - 1

    [[nodiscard]] const MappingEntry& entry(SfsIndex i, SfsIndex j) const {
        if (i.value < 1 || j.value < 1 || static_cast<std::size_t>(i.value) > sfs.size() ||
            static_cast<std::size_t>(j.value) > sfs.size()) {
            throw argument_error("mapping catalog index out of range: (" + std::to_string(i.value) + ", " +
                                 std::to_string(j.value) + ")");
        }
        return table[static_cast<std::size_t>(mapping_index(i, j).value - 1)];
    }

    [[nodiscard]] const MappingEntry& entry(MappingIndex m) const {
        const auto [i, j] = sfs_pair(m);
        if (m.value < 1 || static_cast<std::size_t>(m.value) > table.size()) {
            throw argument_error("mapping index out of range: " + std::to_string(m.value));
        }
        return entry(i, j);
    }

    friend bool operator==(const MappingCatalog&, const MappingCatalog&) = default;
};

/**
 * Exhaustive offline mapping design.
 *
 * Per SFS: among the surjective 2x4 mappings that resolve it, keep the one with the largest d_min
 * (lowest enumeration index on ties). Per (i, j): over every pair of surjective halves whose stack has
 * rank 4, maximise (min(d1, d2), d1, d2) lexicographically, where d1 is the top half's d_min at SFS i and
 * d2 the bottom half's at SFS j; ties go to the lowest stacked bit pattern. When no full-rank pair of
 * resolving halves exists, AP1 keeps an optimal mapping and AP2 receives the best full-rank complement.
 * d_min values within the tolerance of zero are stored as exactly zero.
 */
[[nodiscard]] inline MappingCatalog offline_search(const QamConstellation& c = QamConstellation::gray(), double tol = default_tolerance) {
    MappingCatalog cat;
    cat.constellation = c;
    cat.tolerance = tol;
    cat.sfs = enumerate_sfs(c, tol);

    const auto& maps = detail::surjective_mappings();
    const std::size_t n_sfs = cat.sfs.size();
    std::vector<std::vector<double>> dmin(n_sfs, std::vector<double>(maps.size()));
    for (std::size_t l = 0; l < n_sfs; ++l) {
        const auto sc = superimpose(1.0, cat.sfs.classes[l].value, c);
        for (std::size_t k = 0; k < maps.size(); ++k) {
            const double d = min_ncv_distance(sc, maps[k].second);
            dmin[l][k] = approx_equal(d, 0.0, tol) ? 0.0 : d;
        }
    }

    for (std::size_t l = 0; l < n_sfs; ++l) {
        std::optional<std::size_t> best;
        for (std::size_t k = 0; k < maps.size(); ++k) {
            if (!resolves_sfs(cat.sfs.classes[l].value, maps[k].second, tol, c)) {
                continue;
            }
            if (!best || (dmin[l][k] > dmin[l][*best] && !approx_equal(dmin[l][k], dmin[l][*best], tol))) {
                best = k;
            }
        }
        if (!best) {
            throw integrity_error("offline_search: SFS " + std::to_string(l + 1) + " has no resolving mapping");
        }
        cat.candidates.push_back(maps[*best].second);
    }

    // Lexicographic "a beats b" with tolerance on each key.
    auto beats = [tol](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        for (std::size_t k = 0; k < 3; ++k) {
            if (!approx_equal(a[k], b[k], tol)) {
                return a[k] > b[k];
            }
        }
        return false;
    };

    cat.table.reserve(n_sfs * n_sfs);
    for (std::size_t i = 0; i < n_sfs; ++i) {
        for (std::size_t j = 0; j < n_sfs; ++j) {
            std::optional<std::pair<std::size_t, std::size_t>> best;
            std::array<double, 3> best_key{};
            for (std::size_t a = 0; a < maps.size(); ++a) {
                for (std::size_t b = 0; b < maps.size(); ++b) {
                    const double d1 = dmin[i][a], d2 = dmin[j][b];
                    const std::array<double, 3> key{std::min(d1, d2), d1, d2};
                    if (best && !beats(key, best_key)) {
                        continue;
                    }
                    if (gf2::rank(stack(maps[a].second, maps[b].second)) != 4) {
                        continue;
                    }
                    best = {a, b};
                    best_key = key;
                }
            }
            if (!best) {
                throw integrity_error("offline_search: no full-rank combination");
            }
            cat.table.push_back(MappingEntry{stack(maps[best->first].second, maps[best->second].second),
                                             dmin[i][best->first], dmin[j][best->second]});
        }
    }
    return cat;
}

struct Selection {
    gf2::Matrix ap1;
    gf2::Matrix ap2;
    gf2::Matrix combined;
    MappingIndex index;
};

/// Hub-side lookup of the combined mapping for the SFS pair reported by AP1 (i) and AP2 (j).
[[nodiscard]] inline Selection online_select(SfsIndex i, SfsIndex j, const MappingCatalog& cat) {
    const auto& e = cat.entry(i, j);
    if (gf2::rank(e.combined) != 4) {
        throw integrity_error("catalog entry " + std::to_string(mapping_index(i, j).value) + " is not invertible");
    }
    return Selection{e.ap1(), e.ap2(), e.combined, mapping_index(i, j)};
}

/// Maximum-likelihood joint word for one observation; ties go to the lowest word.
[[nodiscard]] inline SourceWord detect_word(cplx y, cplx h1, cplx h2, const QamConstellation& c = QamConstellation::gray()) {
    unsigned best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (unsigned w = 0; w < joint_words; ++w) {
        const SourceWord word(w);
        const double d = std::norm(y - (h1 * c(word.ue1()) + h2 * c(word.ue2())));
        if (d < best_d) {
            best_d = d;
            best = w;
        }
    }
    return SourceWord(best);
}

/// AP-side decision: ML joint word, then its coded vector under the AP's mapping.
[[nodiscard]] inline Ncv ap_detect_ncv(cplx y, cplx h1, cplx h2, const gf2::Matrix& m,
                                       const QamConstellation& c = QamConstellation::gray()) {
    if (!std::isfinite(std::abs(h1)) || !std::isfinite(std::abs(h2))) {
        throw argument_error("ap_detect_ncv: channel must be finite");
    }
    return pnc_encode(m, detect_word(y, h1, h2, c));
}

/// Inverts a combined mapping once and decodes many coded-vector pairs with it.
class HubDecoder {
  public:
    explicit HubDecoder(const gf2::Matrix& combined) {
        if (combined.rows() != 4 || combined.cols() != 4) {
            throw argument_error("HubDecoder needs a 4x4 combined mapping");
        }
        const auto inv = gf2::inverse(combined);
        if (!inv) {
            throw integrity_error("hub_decode: combined mapping matrix is singular");
        }
        for (unsigned x = 0; x < joint_words; ++x) {
            lut_[x] = SourceWord(gf2::multiply(*inv, gf2::Vector(4, x)).bits());
        }
    }

    [[nodiscard]] SourceWord operator()(Ncv x1, Ncv x2) const noexcept { return lut_[(x1.value() << 2) | x2.value()]; }

  private:
    std::array<SourceWord, joint_words> lut_{};
};

[[nodiscard]] inline SourceWord hub_decode(const gf2::Matrix& combined, Ncv x1, Ncv x2) { return HubDecoder(combined)(x1, x2); }

}  // namespace netcom::pnc
