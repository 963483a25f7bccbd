#include "cbmr/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>

namespace cbmr {

TopologyGraph TopologyGraph::complete(int agent_count) {
    std::vector<std::pair<AgentId, AgentId>> edges;
    for (AgentId a = 0; a < agent_count; ++a)
        for (AgentId b = a + 1; b < agent_count; ++b) edges.emplace_back(a, b);
    return TopologyGraph(agent_count, std::move(edges));
}

TopologyGraph::TopologyGraph(int agent_count, std::vector<std::pair<AgentId, AgentId>> edges)
    : agent_count_(agent_count) {
    if (agent_count_ < 1) throw ConfigError("topology needs at least one agent");
    adj_.assign(agent_count_, std::vector<bool>(agent_count_, false));
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= agent_count_ || b >= agent_count_ || a == b)
            throw ConfigError("invalid topology edge");
        adj_[a][b] = adj_[b][a] = true;  // trade links are bidirectional
    }
    // connectivity
    if (agent_count_ > 1) {
        std::vector<bool> seen(agent_count_, false);
        std::queue<AgentId> q;
        q.push(0);
        seen[0] = true;
        int reached = 1;
        while (!q.empty()) {
            const AgentId v = q.front();
            q.pop();
            for (AgentId w = 0; w < agent_count_; ++w) {
                if (adj_[v][w] && !seen[w]) {
                    seen[w] = true;
                    ++reached;
                    q.push(w);
                }
            }
        }
        if (reached != agent_count_) throw ConfigError("topology graph must be connected");
    }
}

void TopologyGraph::build_routes(const CommissionSchema& commissions) {
    schema_ = &commissions;
    relays_.assign(agent_count_,
                   std::vector<std::vector<AgentId>>(agent_count_, std::vector<AgentId>()));
    charge_.assign(agent_count_, std::vector<double>(agent_count_, 0.0));

    // Exhaustive simple-path search from each source. Cheapest total charge
    // to the owner wins; ties fall to fewest hops, then the lexicographically
    // smallest relay sequence. Agent counts stay desk-scale.
    for (AgentId src = 0; src < agent_count_; ++src) {
        std::vector<double> best_cost(agent_count_, 1e300);
        std::vector<int> best_hops(agent_count_, 1 << 30);
        std::vector<std::vector<AgentId>> best_path(agent_count_);
        std::vector<AgentId> path;
        std::vector<bool> used(agent_count_, false);
        used[src] = true;

        const std::function<void(AgentId, double)> dfs = [&](AgentId at, double cost) {
            if (at != src) {
                const int hops = static_cast<int>(path.size());
                const bool better =
                    cost < best_cost[at] - 1e-15 ||
                    (std::abs(cost - best_cost[at]) <= 1e-15 &&
                     (hops < best_hops[at] ||
                      (hops == best_hops[at] &&
                       std::vector<AgentId>(path.begin(), path.end() - 1) < best_path[at])));
                if (better) {
                    best_cost[at] = cost;
                    best_hops[at] = hops;
                    best_path[at].assign(path.begin(), path.end() - 1);  // relays only
                }
            }
            for (AgentId next = 0; next < agent_count_; ++next) {
                const AgentId from = path.empty() ? src : path.back();
                if (!adj_[from][next] || used[next]) continue;
                used[next] = true;
                path.push_back(next);
                dfs(next, cost + schema_->rate[from][next]);
                path.pop_back();
                used[next] = false;
            }
        };
        dfs(src, 0.0);

        for (AgentId dst = 0; dst < agent_count_; ++dst) {
            if (dst == src) continue;
            if (best_hops[dst] >= (1 << 30)) throw ConfigError("no route between agents");
            relays_[src][dst] = best_path[dst];
            charge_[src][dst] = best_cost[dst];
        }
    }
    routes_built_ = true;
}

bool TopologyGraph::is_complete() const {
    for (AgentId a = 0; a < agent_count_; ++a)
        for (AgentId b = 0; b < agent_count_; ++b)
            if (a != b && !adj_[a][b]) return false;
    return true;
}

int TopologyGraph::max_degree() const {
    int best = 0;
    for (AgentId a = 0; a < agent_count_; ++a) {
        int d = 0;
        for (AgentId b = 0; b < agent_count_; ++b) d += adj_[a][b] ? 1 : 0;
        best = std::max(best, d);
    }
    return best;
}

int TopologyGraph::max_route_hops() const {
    if (!routes_built_) throw std::logic_error("routes not built");
    int best = 1;
    for (AgentId a = 0; a < agent_count_; ++a)
        for (AgentId b = 0; b < agent_count_; ++b)
            if (a != b) best = std::max(best, static_cast<int>(relays_[a][b].size()) + 1);
    return best;
}

bool TopologyGraph::is_star() const { return agent_count_ >= 3 && star_hub() >= 0; }

AgentId TopologyGraph::star_hub() const {
    if (agent_count_ < 3) return -1;
    AgentId hub = -1;
    for (AgentId a = 0; a < agent_count_; ++a) {
        int d = 0;
        for (AgentId b = 0; b < agent_count_; ++b) d += adj_[a][b] ? 1 : 0;
        if (d == agent_count_ - 1) {
            if (hub >= 0) return -1;  // two full-degree nodes: not a star
            hub = a;
        } else if (d != 1) {
            return -1;
        }
    }
    return hub;
}

const std::vector<AgentId>& TopologyGraph::route(AgentId from, AgentId to) const {
    if (!routes_built_) throw std::logic_error("routes not built");
    if (from == to) throw std::invalid_argument("route endpoints must differ");
    return relays_[from][to];
}

AgentId TopologyGraph::first_hop(AgentId from, AgentId to) const {
    const auto& relays = route(from, to);
    return relays.empty() ? to : relays.front();
}

double TopologyGraph::chain_charge(AgentId from, AgentId to) const {
    if (!routes_built_) throw std::logic_error("routes not built");
    return charge_[from][to];
}

double ChainSettlement::total() const {
    double s = owner_net;
    for (const auto& [agent, amount] : payouts) s += amount;
    return s;
}

ChainSettlement settle_chain(double price, AgentId recommender, AgentId owner,
                             const TopologyGraph& graph, const CommissionSchema& schema) {
    ChainSettlement out;
    if (recommender == owner) {
        out.payouts.emplace_back(owner, price);
        out.owner_net = 0.0;
        return out;
    }
    const auto& relays = graph.route(recommender, owner);
    const bool proportional = schema.mode == CommissionMode::kProportional;
    const auto edge = [&](AgentId a, AgentId b) {
        const double c = schema.rate[a][b];
        return proportional ? c * price : c;
    };
    double charged = 0.0;
    AgentId prev = recommender;
    std::vector<AgentId> chain(relays);
    chain.push_back(owner);
    // Recommender nets its first-hop commission; each relay nets the edge
    // toward the owner (it recovers what it paid downstream).
    out.payouts.emplace_back(recommender, edge(recommender, chain.front()));
    charged += edge(recommender, chain.front());
    prev = chain.front();
    for (size_t h = 1; h < chain.size(); ++h) {
        out.payouts.emplace_back(prev, edge(prev, chain[h]));
        charged += edge(prev, chain[h]);
        prev = chain[h];
    }
    if (charged > price + 1e-12)
        throw std::logic_error("chain charge exceeds price: owner should not have recommended");
    out.owner_net = price - charged;
    return out;
}

long long network_training_inventory(const TopologyGraph& graph, AgentId agent, int f_max) {
    if (graph.is_complete()) return f_max;
    if (graph.is_star()) {
        if (agent == graph.star_hub()) return f_max;
        const long long m = graph.agent_count();
        return m * m * static_cast<long long>(f_max);
    }
    const double dk = static_cast<double>(graph.max_degree());
    const double dh = static_cast<double>(graph.max_route_hops());
    const double factor = std::pow(dk, dh);
    const double value = factor * static_cast<double>(f_max);
    if (value > 9e15) throw ConfigError("network training inventory overflows");
    return static_cast<long long>(std::llround(value));
}

}  // namespace cbmr
