#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cbmr/action_space.hpp"
#include "cbmr/context_space.hpp"
#include "cbmr/market.hpp"
#include "cbmr/network.hpp"
#include "cbmr/policy.hpp"
#include "cbmr/types.hpp"

namespace cbmr {

// How cross-sales pay the recommending agent. Direct markets use the
// commission schema as-is; topology-aware markets pay the first-hop edge
// commission on the routing path, and an owner whose chain charge exceeds
// the item price is not recommendable.
struct RevenueRule {
    const CommissionSchema* schema = nullptr;
    const TopologyGraph* graph = nullptr;

    double recommender_cut(AgentId recommender, AgentId owner, double price) const;
    bool cross_eligible(AgentId recommender, AgentId owner, double price) const;
};

namespace oracle {

// Expected slot reward of agent i from recommending `rec_set` to a user
// with context x: commissions on foreign items plus prices on own items,
// each weighted by the true purchase probability.
double sigma(const MarketModel& market, const RevenueRule& rule, AgentId i,
             std::span<const ItemId> rec_set, const Context& x);

// Brute-force argmax of sigma over every N-subset of the recommendable
// items. Deterministic lexicographic tie-break.
std::pair<std::vector<ItemId>, double> optimal_set(const MarketModel& market,
                                                   const RevenueRule& rule, AgentId i,
                                                   const Context& x);

// Best items agent j can return for recommendation vector m (the subset of
// its eligible items maximizing the true purchase rate). Returns global ids.
std::vector<ItemId> best_responder_items(const MarketModel& market, const RevenueRule& rule,
                                         AgentId j, AgentId requester,
                                         const std::vector<int>& rec_vector, const Context& x);

// Expected reward of one action: own items at their true probabilities plus
// each called agent's best-response purchase rate times the commission.
double mu(const MarketModel& market, const RevenueRule& rule, const ActionSpace& space,
          AgentId i, ActionId k, const Context& x);

ActionId best_action(const MarketModel& market, const RevenueRule& rule,
                     const ActionSpace& space, AgentId i, const Context& x);

}  // namespace oracle

// Per-cell cache of oracle quantities evaluated at cell centers, with exact
// on-demand evaluation at arbitrary contexts.
class OracleTable {
   public:
    OracleTable(const MarketModel& market, RevenueRule rule, const Partition& partition,
                std::vector<const ActionSpace*> spaces);

    double mu_star(AgentId i, const Context& x) const;      // cached by cell
    double mu_star_exact(AgentId i, const Context& x) const;  // no cache
    ActionId best_action(AgentId i, const Context& x) const;
    const RevenueRule& rule() const { return rule_; }

   private:
    struct CellEntry {
        double mu_star = 0.0;
        ActionId best = -1;
    };
    const CellEntry& entry(AgentId i, CellId cell, const Context& x) const;

    const MarketModel& market_;
    RevenueRule rule_;
    const Partition& partition_;
    std::vector<const ActionSpace*> spaces_;
    mutable std::vector<std::map<CellId, CellEntry>> cache_;
};

// Per-slot regret bookkeeping for one agent. Pseudo-regret compares the
// oracle-optimal expected reward against the expected reward of what was
// actually recommended; realized regret uses the sampled reward.
struct RegretStep {
    double pseudo = 0.0;
    double realized = 0.0;
};

RegretStep regret_step(const MarketModel& market, const OracleTable& table, AgentId i,
                       const Context& x, std::span<const ItemId> executed_set,
                       double realized_reward);

struct RegretTraceRow {
    Time t = 0;
    AgentId agent = 0;
    Phase phase = Phase::kExploit;
    ActionId action = -1;
    double pseudo_regret = 0.0;
    double realized_regret = 0.0;
    double cum_pseudo = 0.0;
    double cum_realized = 0.0;
};

std::string regret_trace_csv_header();
std::string regret_trace_csv_row(const RegretTraceRow& row);

// Finite-time regret bound evaluators; informational overlays only.
struct BoundParams {
    double y_r = 1.0;  // sup over contexts of the optimal expected reward
    double holder_L = 1.0;
    double alpha = 1.0;
    int dimension = 1;
    int f_max = 1;
    int slots = 1;        // N
    int agent_count = 1;  // M
    long long action_count = 0;       // |L_i|
    long long cooperative_count = 0;  // |L-tilde_i|
    long long arm_count = 0;          // |J_i|
    long long foreign_arm_count = 0;  // |J-tilde_i|
    long long network_inventory = 0;  // D_k^D_h * F_max for the network bound
};

// theorem = 1 (action-level), 2 (arm-level) or 3 (arm-level over a network).
std::function<double(Time)> bound_curve(int theorem, const BoundParams& params);

double basel_constant();  // sum 1/t^2 = pi^2/6

}  // namespace cbmr
