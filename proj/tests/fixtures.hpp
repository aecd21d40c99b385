#pragma once

#include <string>

namespace fixtures {

// 12-node toy network in the shape of the running illustration: three
// cascade seeds (0,1,2), five one-hop neighbors (3..7), four two-hop
// neighbors (8..11). One duplicate line and mixed separators exercise the
// loader; 14 distinct edges remain after dedup.
inline const char* kToyEdgeList =
    "# toy cascade network\n"
    "0 3\n"
    "0 4\n"
    "1 4\n"
    "1,5\n"
    "2 6\n"
    "2 7\n"
    "1 6\n"
    "3 8\n"
    "4 9\n"
    "5 9\n"
    "6 10\n"
    "7 11\n"
    "6,11\n"
    "4 5\n"
    "4 5\n";

inline constexpr std::size_t kToyNodes = 12;
inline constexpr std::size_t kToyEdges = 14;
inline constexpr std::size_t kToySeedCount = 3;

}  // namespace fixtures
