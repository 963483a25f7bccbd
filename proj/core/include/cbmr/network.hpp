#pragma once

#include <utility>
#include <vector>

#include "cbmr/market.hpp"
#include "cbmr/types.hpp"

namespace cbmr {

// Undirected, connected trade graph over the agents with a static routing
// table. For each ordered pair (i, j) the table holds the path minimizing the
// total commission charged to the item owner, ties broken by fewest hops and
// then lexicographically. Routing is fixed at startup; rerouting mid-run
// would change the learning target.
class TopologyGraph {
   public:
    static TopologyGraph complete(int agent_count);
    TopologyGraph(int agent_count, std::vector<std::pair<AgentId, AgentId>> edges);

    // Builds the routing table; must be called before route()/chain queries.
    void build_routes(const CommissionSchema& commissions);

    int agent_count() const { return agent_count_; }
    bool has_edge(AgentId a, AgentId b) const { return adj_[a][b]; }
    bool is_complete() const;
    int max_degree() const;       // D_k
    int max_route_hops() const;   // D_h: hop count of the longest routing path
    bool is_star() const;
    AgentId star_hub() const;     // -1 when not a star

    // Relay agents between `from` and `to`, excluding both endpoints; empty
    // for a direct edge.
    const std::vector<AgentId>& route(AgentId from, AgentId to) const;

    AgentId first_hop(AgentId from, AgentId to) const;

    // Sum of edge commissions along the routing path; what the owner is
    // charged in total when `from` sells its item (fixed mode uses raw
    // entries, proportional multiplies by price at settlement time).
    double chain_charge(AgentId from, AgentId to) const;

   private:
    int agent_count_ = 0;
    std::vector<std::vector<bool>> adj_;
    std::vector<std::vector<std::vector<AgentId>>> relays_;  // [from][to]
    std::vector<std::vector<double>> charge_;
    bool routes_built_ = false;
    const CommissionSchema* schema_ = nullptr;
};

struct ChainSettlement {
    // Net receivable per agent on the path, recommender first, owner last.
    std::vector<std::pair<AgentId, double>> payouts;
    double owner_net = 0.0;
    double total() const;
};

// Chained commission settlement of one sale along the routing path. The
// recommender nets its first-hop commission, each relay nets its edge
// commission toward the owner, and the owner nets price minus the chain
// charge. Payouts always sum to the price.
ChainSettlement settle_chain(double price, AgentId recommender, AgentId owner,
                             const TopologyGraph& graph, const CommissionSchema& schema);

// Inventory-size multiplier inside the training control function for a
// foreign arm under a network topology:
//   complete graph        -> F_max              (base rule)
//   star topology, hub    -> F_max
//   star topology, spoke  -> M^2 * F_max
//   general graph         -> D_k^D_h * F_max
long long network_training_inventory(const TopologyGraph& graph, AgentId agent, int f_max);

}  // namespace cbmr
