#pragma once

#include <cstdint>

#include "cbmr/market.hpp"

namespace cbmr {

// Synthetic co-purchase market: `query_count` query products, each with
// `companions_per_query` frequently co-purchased companions drawn from a
// shared pool of `companion_pool` items. The pool size controls companion
// overlap across queries; item count is query_count + companion_pool.
// Inventories are dealt near-equally across agents, optionally pinning the
// placement of the first query's companions.
struct ScenarioParams {
    int query_count = 20;
    int companions_per_query = 2;
    int companion_pool = 10;
    int agent_count = 3;
    int slots = 2;  // N

    // Where the companions of query 0 live:
    //   kBalanced: wherever the deal puts them
    //   kBothFirstAgent: both on agent 0
    //   kSplitFirstLast: one on agent 0, one on the last agent
    //   kNoneFirstAgent: one on agent 1, one on the last agent
    enum Placement { kBalanced, kBothFirstAgent, kSplitFirstLast, kNoneFirstAgent };
    Placement placement = kBalanced;

    bool group_dependent = true;
    double a = 0.5;  // must satisfy a < 1/N
    double b = 0.01;
    double g_c = 0.1;
    double g_nc = 0.01;

    double alpha = 1.0 / 13.0;
    double commission = 0.5;
    CommissionMode commission_mode = CommissionMode::kFixed;
    double unit_price = 1.0;
    std::uint64_t seed = 1;
};

MarketModel generate_scenario(const ScenarioParams& params);

}  // namespace cbmr
