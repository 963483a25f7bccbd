#include "cbmr/scenario.hpp"

#include <algorithm>
#include <stdexcept>

#include "cbmr/rng.hpp"

namespace cbmr {

namespace {

// Moves item `f` into agent `target`'s inventory by swapping owners with the
// first item of `target` that is not protected; inventory sizes stay fixed.
void place_item(std::vector<Item>& items, ItemId f, AgentId target,
                const std::vector<ItemId>& keep) {
    if (items[f].owner == target) return;
    for (Item& other : items) {
        if (other.owner != target) continue;
        if (std::find(keep.begin(), keep.end(), other.id) != keep.end()) continue;
        std::swap(items[f].owner, other.owner);
        return;
    }
    throw ConfigError("placement constraint cannot be satisfied");
}

}  // namespace

MarketModel generate_scenario(const ScenarioParams& p) {
    if (p.query_count < 1) throw ConfigError("scenario needs at least one query");
    if (p.companions_per_query < 0 || p.companions_per_query > p.companion_pool)
        throw ConfigError("companions per query must fit in the companion pool");
    if (p.agent_count < 1) throw ConfigError("scenario needs at least one agent");

    const int item_count = p.query_count + p.companion_pool;
    Rng rng(mix_seed(p.seed, 0x5ce0));

    // Deal inventories round-robin over a seeded shuffle.
    std::vector<ItemId> order(item_count);
    for (int f = 0; f < item_count; ++f) order[f] = f;
    for (int f = item_count - 1; f > 0; --f)
        std::swap(order[f], order[rng.uniform_int(f + 1)]);

    std::vector<Item> items(item_count);
    for (int pos = 0; pos < item_count; ++pos) {
        items[order[pos]].id = order[pos];
        items[order[pos]].owner = pos % p.agent_count;
        items[order[pos]].price = p.unit_price;
    }

    // Companion assignment: a seeded permutation of the pool walked
    // cyclically, so every pool item serves some query and each query's
    // companions are distinct.
    std::vector<ItemId> pool(p.companion_pool);
    for (int c = 0; c < p.companion_pool; ++c) pool[c] = p.query_count + c;
    for (int c = p.companion_pool - 1; c > 0; --c)
        std::swap(pool[c], pool[rng.uniform_int(c + 1)]);

    std::map<int, std::vector<ItemId>> copurchase;
    for (int q = 0; q < p.query_count; ++q) {
        std::vector<ItemId> companions;
        for (int r = 0; r < p.companions_per_query; ++r)
            companions.push_back(pool[(q * p.companions_per_query + r) % p.companion_pool]);
        if (!companions.empty()) copurchase[q] = std::move(companions);
    }

    if (p.placement != ScenarioParams::kBalanced) {
        if (p.companions_per_query < 2 || p.agent_count < 2)
            throw ConfigError("explicit placements need two companions and two agents");
        const ItemId c1 = copurchase.at(0)[0];
        const ItemId c2 = copurchase.at(0)[1];
        const AgentId last = p.agent_count - 1;
        switch (p.placement) {
            case ScenarioParams::kBothFirstAgent:
                place_item(items, c1, 0, {c2});
                place_item(items, c2, 0, {c1});
                break;
            case ScenarioParams::kSplitFirstLast:
                place_item(items, c1, 0, {c2});
                place_item(items, c2, last, {c1});
                break;
            case ScenarioParams::kNoneFirstAgent:
                place_item(items, c1, std::min(1, last), {c2});
                place_item(items, c2, last, {c1});
                break;
            default:
                break;
        }
    }

    CommissionSchema schema;
    schema.mode = p.commission_mode;
    schema.rate.assign(p.agent_count, std::vector<double>(p.agent_count, 0.0));
    for (AgentId i = 0; i < p.agent_count; ++i)
        for (AgentId j = 0; j < p.agent_count; ++j)
            if (i != j) schema.rate[i][j] = p.commission;

    PurchaseParams purchase;
    purchase.variant = p.group_dependent ? PurchaseVariant::kGroupDependentCoPurchase
                                         : PurchaseVariant::kIndependentCoPurchase;
    purchase.a = p.a;
    purchase.b = p.b;
    purchase.g_c = p.g_c;
    purchase.g_nc = p.g_nc;
    purchase.copurchase = std::move(copurchase);
    purchase.holder_L = 1.0;
    purchase.holder_alpha = p.alpha;

    ContextSpec contexts;
    contexts.discrete = true;
    contexts.query_count = p.query_count;

    // The first agent is evaluated on a fixed query; users of the other
    // agents draw uniformly over the query set.
    std::vector<ArrivalSpec> arrivals(p.agent_count);
    arrivals[0].kind = ArrivalSpec::kConstantQuery;
    arrivals[0].query = 0;
    for (AgentId i = 1; i < p.agent_count; ++i) arrivals[i].kind = ArrivalSpec::kUniformQuery;

    return MarketModel(p.agent_count, p.slots, std::move(items), std::move(schema),
                       std::move(purchase), contexts, std::move(arrivals), p.alpha);
}

}  // namespace cbmr
