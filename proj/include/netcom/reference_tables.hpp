// Published combined mapping matrices M_ij (i: SFS at AP1, j: SFS at AP2), used as test fixtures.
// The runtime path always uses the catalog produced by offline_search.
#pragma once

#include <array>
#include <string_view>

#include "netcom/gf2.hpp"
#include "netcom/pnc.hpp"

namespace netcom::reference {

inline constexpr std::array<std::array<std::string_view, 4>, 25> published_rows{{
    {"0100", "1000", "0001", "0010"},  // M11
    {"0100", "1000", "0011", "1110"},  // M12
    {"0100", "1000", "1001", "0110"},  // M13
    {"0100", "1000", "0101", "1010"},  // M14
    {"0100", "1000", "0111", "0010"},  // M15
    {"0011", "1101", "1000", "0100"},  // M21
    {"0100", "1000", "0001", "0010"},  // M22
    {"0011", "1101", "1001", "0110"},  // M23
    {"0011", "1101", "1010", "0101"},  // M24
    {"0011", "1101", "1011", "0111"},  // M25
    {"0110", "1001", "1000", "0100"},  // M31
    {"0110", "1001", "0011", "1110"},  // M32
    {"0110", "1001", "0100", "0001"},  // M33
    {"0110", "1001", "0101", "0001"},  // M34
    {"0110", "1001", "0111", "1011"},  // M35
    {"0101", "1010", "0100", "1000"},  // M41
    {"0101", "1010", "0011", "1110"},  // M42
    {"0101", "1010", "0110", "0100"},  // M43
    {"0101", "1010", "1000", "0001"},  // M44
    {"0101", "1010", "0111", "1100"},  // M45
    {"0111", "1011", "0100", "0001"},  // M51
    {"0111", "1011", "0011", "1110"},  // M52
    {"0111", "1011", "0110", "1001"},  // M53
    {"0111", "1011", "1010", "0100"},  // M54
    {"0111", "1011", "0100", "0001"},  // M55
}};

[[nodiscard]] inline gf2::Matrix published_mapping(pnc::SfsIndex i, pnc::SfsIndex j) {
    if (i.value < 1 || i.value > 5 || j.value < 1 || j.value > 5) {
        throw argument_error("published mapping index out of range");
    }
    const auto& r = published_rows[static_cast<std::size_t>(pnc::mapping_index(i, j).value - 1)];
    return gf2::Matrix::from_rows({r[0], r[1], r[2], r[3]});
}

}  // namespace netcom::reference
