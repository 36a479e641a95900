#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "netcom/pnc.hpp"
#include "netcom/reference_tables.hpp"

using namespace netcom;
using namespace netcom::pnc;
using gf2::Matrix;

namespace {

const MappingCatalog& catalog() {
    static const MappingCatalog cat = offline_search();
    return cat;
}

// Oracle: points and coded vectors written out from scratch (Gray labelling spelled literally).
double brute_dmin(cplx h1, cplx h2, const Matrix& m) {
    const double a = 1.0 / std::sqrt(2.0);
    const cplx gray[4] = {{a, a}, {-a, a}, {a, -a}, {-a, -a}};
    auto ncv = [&](unsigned w) {
        const int bits[4] = {int(w >> 3) & 1, int(w >> 2) & 1, int(w >> 1) & 1, int(w) & 1};
        unsigned out = 0;
        for (std::size_t r = 0; r < 2; ++r) {
            int acc = 0;
            for (std::size_t c = 0; c < 4; ++c) {
                acc += m(r, c) * bits[c];
            }
            out = out * 2 + static_cast<unsigned>(acc % 2);
        }
        return out;
    };
    double best = INFINITY;
    for (unsigned t = 0; t < 16; ++t) {
        for (unsigned u = t + 1; u < 16; ++u) {
            if (ncv(t) == ncv(u)) {
                continue;
            }
            const cplx pt = h1 * gray[t >> 2] + h2 * gray[t & 3];
            const cplx pu = h1 * gray[u >> 2] + h2 * gray[u & 3];
            best = std::min(best, std::norm(pt - pu));
        }
    }
    return best;
}

const Matrix xor_map = Matrix::from_rows({"1010", "0101"});
const Matrix ue1_only = Matrix::from_rows({"1000", "0100"});

}  // namespace

TEST(Qam, GrayDefault) {
    const auto& c = QamConstellation::gray();
    const double a = std::numbers::sqrt2 / 2.0;
    EXPECT_NEAR(std::abs(modulate_4qam(0b00) - cplx(a, a)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(modulate_4qam(0b01) - cplx(-a, a)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(modulate_4qam(0b11) - cplx(-a, -a)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(modulate_4qam(0b10) - cplx(a, -a)), 0.0, 1e-15);
    EXPECT_EQ(modulate_4qam(0b11), -modulate_4qam(0b00));
    double e = 0.0;
    for (unsigned b = 0; b < 4; ++b) {
        e += std::norm(c(b));
        EXPECT_EQ(c.slice(c(b) * 0.9), b);
    }
    EXPECT_NEAR(e / 4.0, 1.0, 1e-15);
}

TEST(Qam, RejectsBadConstellations) {
    EXPECT_THROW(QamConstellation({cplx{1, 0}, cplx{1, 0}, cplx{-1, 0}, cplx{0, 1}}), argument_error);
    EXPECT_THROW(QamConstellation({cplx{2, 0}, cplx{-2, 0}, cplx{0, 2}, cplx{0, -2}}), argument_error);
}

TEST(SourceWordTest, BitLayout) {
    const SourceWord w = SourceWord::from_ue_bits(0b01, 0b11);
    EXPECT_EQ(w.value(), 0b0111U);
    EXPECT_EQ(w.ue1(), 1U);
    EXPECT_EQ(w.ue2(), 3U);
    EXPECT_EQ(w.vector(), gf2::Vector::from_entries({0, 1, 1, 1}));
    EXPECT_THROW(SourceWord(16), argument_error);
    EXPECT_THROW(Ncv(4), argument_error);
}

TEST(Superimpose, UeTwoErased) {
    const auto sc = superimpose(1.0, 0.0);
    std::set<std::pair<double, double>> distinct;
    for (unsigned w = 0; w < 16; ++w) {
        EXPECT_EQ(sc.points[w], modulate_4qam(w >> 2));
        distinct.insert({sc.points[w].real(), sc.points[w].imag()});
    }
    EXPECT_EQ(distinct.size(), 4U);
}

TEST(Superimpose, EqualGainsCollide) {
    const auto sc = superimpose(1.0, 1.0);
    EXPECT_NEAR(std::abs(sc.points[0b0001] - sc.points[0b0100]), 0.0, 1e-15);
}

TEST(Superimpose, HalfGainAllDistinct) {
    const auto sc = superimpose(1.0, 0.5);
    for (unsigned a = 0; a < 16; ++a) {
        for (unsigned b = a + 1; b < 16; ++b) {
            EXPECT_GT(std::abs(sc.points[a] - sc.points[b]), 1e-3);
        }
    }
}

TEST(MinNcvDistance, Examples) {
    const auto sc = superimpose(1.0, 1.0);
    EXPECT_GT(min_ncv_distance(sc, xor_map), 0.1);
    EXPECT_NEAR(min_ncv_distance(sc, ue1_only), 0.0, 1e-24);
    EXPECT_TRUE(std::isinf(min_ncv_distance(sc, Matrix(2, 4))));
    EXPECT_TRUE(std::isinf(min_ncv_distance(superimpose(cplx(0.3, 2.0), cplx(-1.1, 0.4)), Matrix(2, 4))));
}

TEST(MinNcvDistance, MatchesBruteForceOracle) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<std::uint32_t> pat(0, 255);
    for (int t = 0; t < 2000; ++t) {
        const cplx h1(g(rng), g(rng)), h2(g(rng), g(rng));
        const Matrix m = Matrix::from_pattern(2, 4, pat(rng));
        const double got = min_ncv_distance(superimpose(h1, h2), m);
        const double want = brute_dmin(h1, h2, m);
        if (std::isinf(want)) {
            ASSERT_TRUE(std::isinf(got));
        } else {
            ASSERT_LE(std::abs(got - want), 1e-12 * std::max(1.0, want));
        }
    }
}

TEST(ResolvesSfs, Examples) {
    EXPECT_TRUE(resolves_sfs(1.0, xor_map));
    EXPECT_FALSE(resolves_sfs(1.0, ue1_only));
    EXPECT_TRUE(resolves_sfs(0.0, ue1_only));
    EXPECT_TRUE(resolves_sfs(cplx(0.37, 1.9), ue1_only));  // not an SFS: nothing collides
}

TEST(EnumerateSfs, FrozenCatalog) {
    const auto sfs = enumerate_sfs();
    ASSERT_EQ(sfs.size(), 5U);
    const cplx expected[5] = {{0, 0}, {0.5, 0.5}, {0, 1}, {1, 0}, {1, 1}};
    const std::size_t image_counts[5] = {0, 3, 1, 1, 3};
    for (int l = 0; l < 5; ++l) {
        EXPECT_NEAR(std::abs(sfs.value({l + 1}) - expected[l]), 0.0, 1e-12) << "SFS " << l + 1;
        EXPECT_EQ(sfs.classes[static_cast<std::size_t>(l)].images.size(), image_counts[l]);
    }
    bool has_one = false;
    for (const auto& c : sfs.classes) {
        has_one = has_one || approx_equal(c.value, 1.0, 1e-12);
    }
    EXPECT_TRUE(has_one);
    EXPECT_THROW((void)enumerate_sfs(QamConstellation::gray(), 0.0), argument_error);
}

TEST(EnumerateSfs, EveryMemberIsACollision) {
    const auto sfs = enumerate_sfs();
    for (const auto& c : sfs.classes) {
        std::vector<cplx> members = c.images;
        members.push_back(c.value);
        for (cplx v : members) {
            const auto sc = superimpose(1.0, v);
            bool collides = false;
            for (unsigned a = 0; a < 16; ++a) {
                for (unsigned b = a + 1; b < 16; ++b) {
                    collides = collides || std::abs(sc.points[a] - sc.points[b]) < 1e-9;
                }
            }
            EXPECT_TRUE(collides) << v;
        }
    }
}

TEST(EnumerateSfs, RetainedValuesAreNotImages) {
    const auto sfs = enumerate_sfs();
    for (const auto& m : gf2::enumerate_matrices(2, 4)) {
        if (gf2::rank(m) != 2) {
            continue;
        }
        int resolved = 0;
        for (const auto& c : sfs.classes) {
            resolved += resolves_sfs(c.value, m) ? 1 : 0;
        }
        EXPECT_LE(resolved, 1) << m;
    }
}

TEST(EnumerateSfs, ImageRemovalSoundness) {
    const auto& cat = catalog();
    for (std::size_t l = 0; l < cat.sfs.size(); ++l) {
        for (cplx v : cat.sfs.classes[l].images) {
            EXPECT_TRUE(resolves_sfs(v, cat.candidates[l])) << "image " << v << " of SFS " << l + 1;
        }
    }
}

TEST(OfflineSearch, CandidatesAreOptimalAndSurjective) {
    const auto& cat = catalog();
    ASSERT_EQ(cat.candidates.size(), 5U);
    ASSERT_EQ(cat.table.size(), 25U);
    const double optimal[5] = {2.0, 1.0, 2.0, 2.0, 2.0};
    for (std::size_t l = 0; l < 5; ++l) {
        const Matrix& m = cat.candidates[l];
        EXPECT_EQ(gf2::rank(m), 2U);
        std::set<unsigned> ncvs;
        for (unsigned w = 0; w < 16; ++w) {
            ncvs.insert(pnc_encode(m, SourceWord(w)).value());
        }
        EXPECT_EQ(ncvs.size(), 4U);
        const cplx v = cat.sfs.classes[l].value;
        EXPECT_TRUE(resolves_sfs(v, m));
        EXPECT_NEAR(brute_dmin(1.0, v, m), optimal[l], 1e-12);
        // No rank-2 resolver does better.
        for (const auto& other : gf2::enumerate_matrices(2, 4)) {
            if (gf2::rank(other) == 2 && resolves_sfs(v, other)) {
                EXPECT_LE(brute_dmin(1.0, v, other), optimal[l] + 1e-12);
            }
        }
    }
}

TEST(OfflineSearch, TableInvariants) {
    const auto& cat = catalog();
    for (int i = 1; i <= 5; ++i) {
        for (int j = 1; j <= 5; ++j) {
            const auto& e = cat.entry(SfsIndex{i}, SfsIndex{j});
            EXPECT_EQ(gf2::rank(e.combined), 4U);
            EXPECT_EQ(gf2::rank(e.ap1()), 2U);
            EXPECT_EQ(gf2::rank(e.ap2()), 2U);
            EXPECT_TRUE(resolves_sfs(cat.sfs.value({i}), e.ap1())) << i << j;
            EXPECT_NEAR(e.dmin_ap1, brute_dmin(1.0, cat.sfs.value({i}), e.ap1()), 1e-9);
            EXPECT_NEAR(e.dmin_ap2, brute_dmin(1.0, cat.sfs.value({j}), e.ap2()), 1e-9);
        }
    }
}

// GF(2) feasibility: a full-rank pair of resolving halves exists iff the resolver row spaces of SFS i and
// SFS j intersect only in zero. Exactly where it exists, the search resolves both sides.
TEST(OfflineSearch, BottomResolvesExactlyWhenFeasible) {
    const auto& cat = catalog();
    int infeasible = 0;
    for (int i = 1; i <= 5; ++i) {
        for (int j = 1; j <= 5; ++j) {
            bool feasible = false;
            for (const auto& a : gf2::enumerate_matrices(2, 4)) {
                if (gf2::rank(a) != 2 || !resolves_sfs(cat.sfs.value({i}), a)) {
                    continue;
                }
                for (const auto& b : gf2::enumerate_matrices(2, 4)) {
                    if (resolves_sfs(cat.sfs.value({j}), b) && gf2::rank(stack(a, b)) == 4) {
                        feasible = true;
                        break;
                    }
                }
                if (feasible) {
                    break;
                }
            }
            infeasible += feasible ? 0 : 1;
            const auto& e = cat.entry(SfsIndex{i}, SfsIndex{j});
            EXPECT_EQ(resolves_sfs(cat.sfs.value({j}), e.ap2()), feasible) << i << j;
            EXPECT_EQ(e.dmin_ap2 > 0.0, feasible) << i << j;
        }
    }
    EXPECT_EQ(infeasible, 9);
}

TEST(OfflineSearch, NeverWorseThanPublishedTable) {
    const auto& cat = catalog();
    for (int i = 1; i <= 5; ++i) {
        for (int j = 1; j <= 5; ++j) {
            const Matrix pub = reference::published_mapping({i}, {j});
            const double p1 = brute_dmin(1.0, cat.sfs.value({i}), pub.row_slice(0, 2));
            const double p2 = brute_dmin(1.0, cat.sfs.value({j}), pub.row_slice(2, 2));
            const auto& e = cat.entry(SfsIndex{i}, SfsIndex{j});
            EXPECT_GE(std::min(e.dmin_ap1, e.dmin_ap2) + 1e-9, std::min(p1, p2)) << i << j;
        }
    }
}

TEST(OfflineSearch, Deterministic) { EXPECT_EQ(offline_search(), catalog()); }

TEST(NearestSfs, Examples) {
    const auto& sfs = catalog().sfs;
    for (int l = 1; l <= 5; ++l) {
        EXPECT_EQ(nearest_sfs(sfs.value({l}), sfs), SfsIndex{l});
    }
    EXPECT_EQ(nearest_sfs(cplx(1.02, -0.03), sfs), SfsIndex{4});
    EXPECT_EQ(nearest_sfs(cplx(-0.98, 0.01), sfs), SfsIndex{4});  // image of 1
    EXPECT_EQ(nearest_sfs(cplx(0.01, -1.0), sfs), SfsIndex{3});   // image of i
    // (0.75 + 0.75i) is equidistant from (1+i)/2 (SFS 2) and 1+i (SFS 5).
    EXPECT_EQ(nearest_sfs(cplx(0.75, 0.75), sfs), SfsIndex{2});
    EXPECT_THROW((void)nearest_sfs(cplx(NAN, 0.0), sfs), argument_error);
}

TEST(NearestSfs, ScaleInvariant) {
    const auto& sfs = catalog().sfs;
    std::mt19937_64 rng(22);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
        const cplx h1(g(rng), g(rng)), h2(g(rng), g(rng));
        const cplx c = std::polar(std::exp(g(rng)), g(rng));
        EXPECT_EQ(nearest_sfs(h2 / h1, sfs), nearest_sfs((c * h2) / (c * h1), sfs));
    }
}

TEST(OnlineSelect, LoggedCases) {
    const auto& cat = catalog();
    EXPECT_EQ(online_select({3}, {1}, cat).index, MappingIndex{11});
    EXPECT_EQ(online_select({4}, {4}, cat).index, MappingIndex{19});
    EXPECT_EQ(online_select({1}, {1}, cat).index, MappingIndex{1});
    const auto s = online_select({2}, {5}, cat);
    EXPECT_EQ(stack(s.ap1, s.ap2), s.combined);
    EXPECT_EQ(sfs_pair(s.index), std::make_pair(SfsIndex{2}, SfsIndex{5}));
    EXPECT_THROW((void)online_select({0}, {1}, cat), argument_error);
    EXPECT_THROW((void)online_select({1}, {6}, cat), argument_error);
}

TEST(Encode, Examples) {
    const Matrix m11 = reference::published_mapping({1}, {1});
    EXPECT_EQ(pnc_encode(m11.row_slice(0, 2), SourceWord(0b1011)), Ncv(0b01));
    for (const auto& m : gf2::enumerate_matrices(2, 4)) {
        EXPECT_EQ(pnc_encode(m, SourceWord(0)), Ncv(0));
    }
    EXPECT_THROW((void)pnc_encode(Matrix(4, 4), SourceWord(0)), argument_error);
}

TEST(Encode, CoincidentPointsShareNcvUnderResolver) {
    const auto& cat = catalog();
    for (std::size_t l = 0; l < 5; ++l) {
        const auto sc = superimpose(1.0, cat.sfs.classes[l].value);
        for (unsigned a = 0; a < 16; ++a) {
            for (unsigned b = a + 1; b < 16; ++b) {
                if (std::abs(sc.points[a] - sc.points[b]) < 1e-9) {
                    EXPECT_EQ(pnc_encode(cat.candidates[l], SourceWord(a)), pnc_encode(cat.candidates[l], SourceWord(b)));
                }
            }
        }
    }
}

TEST(ApDetect, NoiselessAndMargins) {
    const cplx h1(0.8, -0.3), h2(-0.2, 1.1);
    const Matrix m = catalog().candidates[3];
    const auto sc = superimpose(h1, h2);
    const double dmin = min_ncv_distance(sc, m);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    for (unsigned w = 0; w < 16; ++w) {
        const Ncv want = pnc_encode(m, SourceWord(w));
        EXPECT_EQ(ap_detect_ncv(sc.points[w], h1, h2, m), want);
        const cplx noise = std::polar(0.49 * std::sqrt(dmin), ang(rng));
        EXPECT_EQ(ap_detect_ncv(sc.points[w] + noise, h1, h2, m), want);
    }
    // At v = 1, coincident words decode to the shared coded vector.
    const Matrix r4 = catalog().candidates[3];
    const auto s1 = superimpose(1.0, 1.0);
    for (unsigned w = 0; w < 16; ++w) {
        EXPECT_EQ(ap_detect_ncv(s1.points[w], 1.0, 1.0, r4), pnc_encode(r4, SourceWord(w)));
    }
}

TEST(HubDecode, Examples) {
    const Matrix m11 = reference::published_mapping({1}, {1});
    EXPECT_EQ(hub_decode(m11, Ncv(0b10), Ncv(0b11)), SourceWord(0b0111));
    for (unsigned w = 0; w < 16; ++w) {
        EXPECT_EQ(hub_decode(Matrix::identity(4), Ncv(w >> 2), Ncv(w & 3)), SourceWord(w));
    }
    EXPECT_THROW((void)hub_decode(Matrix::from_rows({"1000", "1000", "0010", "0001"}), Ncv(0), Ncv(0)), integrity_error);
}

TEST(HubDecode, RoundTripAllCatalogEntries) {
    const auto& cat = catalog();
    for (const auto& e : cat.table) {
        const HubDecoder dec(e.combined);
        for (unsigned w = 0; w < 16; ++w) {
            const SourceWord word(w);
            ASSERT_EQ(dec(pnc_encode(e.ap1(), word), pnc_encode(e.ap2(), word)), word);
        }
    }
}
