#pragma once

// Brute-force flip / net-position scanner over raw rows.

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "copyguard/chain/model.hpp"
#include "oracle.hpp"

namespace cgtest {

struct BumpTruth {
    long flips = 0;
    Rational net = 0;  // |signed sum|
};

inline std::map<std::string, BumpTruth> brute_force_bump(const std::vector<copyguard::chain::TxRecord>& rows) {
    using copyguard::chain::TxKind;
    std::map<std::string, BumpTruth> out;
    std::map<std::string, std::vector<copyguard::chain::TxRecord>> groups;
    for (const auto& r : rows)
        if (r.kind == TxKind::Buy || r.kind == TxKind::Sell) groups[r.trader].push_back(r);
    for (auto& [w, g] : groups) {
        std::sort(g.begin(), g.end(), [](const auto& a, const auto& b) {
            return std::tie(a.block, a.index_in_block) < std::tie(b.block, b.index_in_block);
        });
        BumpTruth t;
        Rational sum = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            sum += g[i].kind == TxKind::Buy ? rat(g[i].token_qty) : -rat(g[i].token_qty);
            for (std::size_t j = i + 1; j == i + 1 && j < g.size(); ++j)
                if (g[i].kind != g[j].kind && rat(g[i].token_qty) == rat(g[j].token_qty)) ++t.flips;
        }
        t.net = sum < 0 ? Rational(-sum) : sum;
        out[w] = t;
    }
    return out;
}

}  // namespace cgtest
