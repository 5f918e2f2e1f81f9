#pragma once

#include <cstdint>
#include <vector>

namespace cmsbm {

// A set partition of {0..m-1} as a restricted growth string: block[i] is the
// block of element i, and block ids appear in order of first use.
struct SetPartition {
    std::vector<int> block;
    int blocks = 0;
    // Moebius function from the finest partition: prod over blocks of
    // (-1)^(|B|-1) (|B|-1)!.
    double moebius = 1.0;
};

std::vector<SetPartition> set_partitions(int m);

// Bell number B_m.
std::uint64_t bell_number(int m);

}  // namespace cmsbm
