#include "cmsbm/partitions.hpp"

namespace cmsbm {

namespace {

void extend(std::vector<int>& rgs, int pos, int used, std::vector<SetPartition>& out) {
    const int m = static_cast<int>(rgs.size());
    if (pos == m) {
        SetPartition p;
        p.block = rgs;
        p.blocks = used;
        std::vector<int> sizes(static_cast<std::size_t>(used), 0);
        for (int b : rgs) ++sizes[static_cast<std::size_t>(b)];
        for (int s : sizes)
            for (int k = 1; k < s; ++k) p.moebius *= -static_cast<double>(k);
        out.push_back(std::move(p));
        return;
    }
    for (int b = 0; b <= used; ++b) {
        rgs[static_cast<std::size_t>(pos)] = b;
        extend(rgs, pos + 1, b == used ? used + 1 : used, out);
    }
}

}  // namespace

std::vector<SetPartition> set_partitions(int m) {
    std::vector<SetPartition> out;
    if (m <= 0) {
        out.push_back({});
        return out;
    }
    std::vector<int> rgs(static_cast<std::size_t>(m), 0);
    extend(rgs, 0, 0, out);
    return out;
}

std::uint64_t bell_number(int m) {
    // Bell triangle.
    std::vector<std::uint64_t> row{1};
    for (int i = 0; i < m; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (auto v : row) next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

}  // namespace cmsbm
