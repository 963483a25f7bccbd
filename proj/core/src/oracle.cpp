#include "cbmr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cbmr {

double RevenueRule::recommender_cut(AgentId recommender, AgentId owner, double price) const {
    if (recommender == owner) return 0.0;
    if (graph != nullptr && !graph->has_edge(recommender, owner)) {
        const AgentId hop = graph->first_hop(recommender, owner);
        const double c = schema->rate[recommender][hop];
        return schema->mode == CommissionMode::kFixed ? c : c * price;
    }
    return schema->recommender_cut(recommender, owner, price);
}

bool RevenueRule::cross_eligible(AgentId recommender, AgentId owner, double price) const {
    if (recommender == owner) return true;
    if (graph != nullptr) {
        const double charge = graph->chain_charge(recommender, owner);
        const double total =
            schema->mode == CommissionMode::kFixed ? charge : charge * price;
        return total <= price + 1e-12;
    }
    return schema->recommender_cut(recommender, owner, price) <= price + 1e-12;
}

namespace oracle {

double sigma(const MarketModel& market, const RevenueRule& rule, AgentId i,
             std::span<const ItemId> rec_set, const Context& x) {
    double total = 0.0;
    for (ItemId f : rec_set) {
        const Item& item = market.item(f);
        const double q = market.true_q(f, x, rec_set);
        if (item.owner == i)
            total += item.price * q;
        else
            total += rule.recommender_cut(i, item.owner, item.price) * q;
    }
    return total;
}

namespace {

// All N-subsets of the pool, lexicographic, streamed into the visitor.
template <typename Fn>
void for_each_subset(const std::vector<ItemId>& pool, int n, Fn&& fn) {
    std::vector<ItemId> cur;
    const std::function<void(size_t)> rec = [&](size_t next) {
        if (static_cast<int>(cur.size()) == n) {
            fn(cur);
            return;
        }
        for (size_t p = next; p < pool.size(); ++p) {
            cur.push_back(pool[p]);
            rec(p + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

std::vector<ItemId> recommendable_pool(const MarketModel& market, const RevenueRule& rule,
                                       AgentId i) {
    std::vector<ItemId> pool;
    for (const Item& item : market.items()) {
        if (item.owner == i) {
            pool.push_back(item.id);
            continue;
        }
        if (rule.graph != nullptr) {
            if (rule.cross_eligible(i, item.owner, item.price)) pool.push_back(item.id);
        } else {
            for (ItemId f : market.eligible_items(item.owner, i)) {
                if (f == item.id) {
                    pool.push_back(item.id);
                    break;
                }
            }
        }
    }
    return pool;
}

}  // namespace

std::pair<std::vector<ItemId>, double> optimal_set(const MarketModel& market,
                                                   const RevenueRule& rule, AgentId i,
                                                   const Context& x) {
    const std::vector<ItemId> pool = recommendable_pool(market, rule, i);
    std::vector<ItemId> best_set;
    double best = -1e300;
    for_each_subset(pool, market.slots(), [&](const std::vector<ItemId>& candidate) {
        const double v = sigma(market, rule, i, candidate, x);
        if (v > best + 1e-12) {
            best = v;
            best_set = candidate;
        }
    });
    if (best_set.empty()) throw std::logic_error("no recommendable set exists");
    return {best_set, best};
}

std::vector<ItemId> best_responder_items(const MarketModel& market, const RevenueRule& rule,
                                         AgentId j, AgentId requester,
                                         const std::vector<int>& rec_vector, const Context& x) {
    const int own = rec_vector.at(j);
    std::vector<ItemId> pool;
    if (rule.graph != nullptr) {
        for (ItemId f : market.inventory(j))
            if (rule.cross_eligible(requester, j, market.item(f).price)) pool.push_back(f);
    } else {
        pool = market.eligible_items(j, requester);
    }
    if (own < 1 || own > static_cast<int>(pool.size()))
        throw std::invalid_argument("invalid responder request");

    // Purchase rate of a candidate subset: expected number of j's items
    // bought given the cross-group counts in the recommendation vector. The
    // evaluation set pads the candidate with the other groups' counts using
    // arbitrary representatives; group-dependent models only read the counts.
    std::vector<ItemId> pad;
    for (AgentId g = 0; g < market.agent_count(); ++g) {
        if (g == j) continue;
        int need = rec_vector[g];
        for (ItemId f : market.inventory(g)) {
            if (need == 0) break;
            pad.push_back(f);
            --need;
        }
        if (need != 0) throw std::invalid_argument("recommendation vector exceeds inventories");
    }

    std::vector<ItemId> best_set;
    double best = -1e300;
    for_each_subset(pool, own, [&](const std::vector<ItemId>& candidate) {
        std::vector<ItemId> full(candidate);
        full.insert(full.end(), pad.begin(), pad.end());
        double rate = 0.0;
        for (ItemId f : candidate) rate += market.true_q(f, x, full);
        if (rate > best + 1e-12) {
            best = rate;
            best_set = candidate;
        }
    });
    return best_set;
}

double mu(const MarketModel& market, const RevenueRule& rule, const ActionSpace& space,
          AgentId i, ActionId k, const Context& x) {
    const Action& action = space.action(k);
    const std::vector<int> rec_vector = space.recommendation_vector(k);
    const std::vector<ItemId>& inventory = market.inventory(i);

    // Assemble the full evaluation set: own items plus each called agent's
    // best response under the true purchase rates.
    std::vector<ItemId> full;
    for (int local : action.own_items) full.push_back(inventory.at(local));
    std::vector<std::pair<AgentId, std::vector<ItemId>>> responses;
    for (AgentId j = 0; j < market.agent_count(); ++j) {
        if (action.request_counts[j] == 0) continue;
        auto items = best_responder_items(market, rule, j, i, rec_vector, x);
        full.insert(full.end(), items.begin(), items.end());
        responses.emplace_back(j, std::move(items));
    }

    double total = 0.0;
    for (int local : action.own_items) {
        const ItemId f = inventory.at(local);
        total += market.item(f).price * market.true_q(f, x, full);
    }
    for (const auto& [j, items] : responses) {
        for (ItemId f : items)
            total += rule.recommender_cut(i, j, market.item(f).price) * market.true_q(f, x, full);
    }
    return total;
}

ActionId best_action(const MarketModel& market, const RevenueRule& rule, const ActionSpace& space,
                     AgentId i, const Context& x) {
    ActionId best = 0;
    double best_value = -1e300;
    for (ActionId k = 0; k < static_cast<ActionId>(space.actions().size()); ++k) {
        const double v = mu(market, rule, space, i, k, x);
        if (v > best_value + 1e-12) {
            best_value = v;
            best = k;
        }
    }
    return best;
}

}  // namespace oracle

OracleTable::OracleTable(const MarketModel& market, RevenueRule rule, const Partition& partition,
                         std::vector<const ActionSpace*> spaces)
    : market_(market), rule_(rule), partition_(partition), spaces_(std::move(spaces)) {
    cache_.resize(market_.agent_count());
}

const OracleTable::CellEntry& OracleTable::entry(AgentId i, CellId cell, const Context&) const {
    auto it = cache_[i].find(cell);
    if (it == cache_[i].end()) {
        const Context center = partition_.cell_center(cell);
        CellEntry e;
        e.mu_star = oracle::optimal_set(market_, rule_, i, center).second;
        e.best = oracle::best_action(market_, rule_, *spaces_[i], i, center);
        it = cache_[i].emplace(cell, e).first;
    }
    return it->second;
}

double OracleTable::mu_star(AgentId i, const Context& x) const {
    return entry(i, partition_.cell_of(x), x).mu_star;
}

double OracleTable::mu_star_exact(AgentId i, const Context& x) const {
    return oracle::optimal_set(market_, rule_, i, x).second;
}

ActionId OracleTable::best_action(AgentId i, const Context& x) const {
    return entry(i, partition_.cell_of(x), x).best;
}

RegretStep regret_step(const MarketModel& market, const OracleTable& table, AgentId i,
                       const Context& x, std::span<const ItemId> executed_set,
                       double realized_reward) {
    RegretStep step;
    const double star = market.contexts().discrete ? table.mu_star(i, x)
                                                   : table.mu_star_exact(i, x);
    const double expected = oracle::sigma(market, table.rule(), i, executed_set, x);
    step.pseudo = star - expected;
    step.realized = star - realized_reward;
    return step;
}

std::string regret_trace_csv_header() {
    return "t,agent,phase,action_id,pseudo_regret,realized_regret,cum_pseudo,cum_realized";
}

std::string regret_trace_csv_row(const RegretTraceRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%lld,%d,%s,%d,%.10g,%.10g,%.10g,%.10g",
                  static_cast<long long>(row.t), row.agent, phase_name(row.phase), row.action,
                  row.pseudo_regret, row.realized_regret, row.cum_pseudo, row.cum_realized);
    return std::string(buf);
}

double basel_constant() { return std::numbers::pi * std::numbers::pi / 6.0; }

std::function<double(Time)> bound_curve(int theorem, const BoundParams& p) {
    if (theorem < 1 || theorem > 3) throw std::invalid_argument("theorem must be 1, 2 or 3");
    const double alpha = p.alpha;
    const double d = static_cast<double>(p.dimension);
    const double e_lead = (2.0 * alpha + d) / (3.0 * alpha + d);
    const double e_mid = (alpha + d) / (3.0 * alpha + d);
    const double e_low = d / (3.0 * alpha + d);
    const double z = 2.0 * alpha / (3.0 * alpha + d);
    const double beta2 = basel_constant();
    const double pow2d = std::pow(2.0, d);
    const double smooth = p.y_r * (p.holder_L * std::pow(d, alpha / 2.0) + 1.0) + 1.0;

    if (theorem == 1) {
        const double half = binomial(p.f_max, (p.f_max + 1) / 2);
        const double z_const =
            static_cast<double>(p.action_count) + static_cast<double>(p.cooperative_count) * half;
        return [=](Time t) {
            const double T = static_cast<double>(t);
            double r = std::pow(T, e_lead) *
                       (4.0 * smooth / e_lead + p.y_r * pow2d * z_const * std::log(T));
            r += std::pow(T, e_mid) * (std::pow(2.0, d + 2.0) * p.y_r *
                                       static_cast<double>(p.cooperative_count) * beta2) / z;
            r += std::pow(T, e_low) * pow2d * p.y_r *
                 (2.0 * static_cast<double>(p.cooperative_count) * beta2 +
                  static_cast<double>(p.action_count));
            r += 2.0 * p.y_r * half * beta2;
            return r;
        };
    }

    const long long inventory = theorem == 3 ? p.network_inventory : p.f_max;
    double subset_sum = 0.0;
    for (int n = 1; n <= p.slots; ++n) subset_sum += binomial(static_cast<int>(inventory), n);
    const double z_const = static_cast<double>(p.arm_count) +
                           static_cast<double>(p.agent_count - 1) * subset_sum;
    const double n_slots = static_cast<double>(p.slots);
    const double tail = 2.0 * p.y_r * n_slots * static_cast<double>(inventory) * beta2;
    return [=](Time t) {
        const double T = static_cast<double>(t);
        double r = std::pow(T, e_lead) *
                   (4.0 * n_slots * smooth / e_lead + p.y_r * pow2d * z_const * std::log(T));
        r += std::pow(T, e_mid) * (std::pow(2.0, d + 2.0) * n_slots * p.y_r *
                                   static_cast<double>(p.foreign_arm_count) * beta2) / z;
        r += std::pow(T, e_low) * pow2d * p.y_r *
             (2.0 * static_cast<double>(p.arm_count) * beta2 +
              static_cast<double>(p.arm_count) +
              static_cast<double>(p.agent_count - 1) * n_slots);
        r += tail;
        return r;
    };
}

}  // namespace cbmr
