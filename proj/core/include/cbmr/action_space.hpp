#pragma once

#include <map>
#include <vector>

#include "cbmr/types.hpp"

namespace cbmr {

// One recommendation allocation: a subset of the agent's own items plus a
// per-agent count of items requested from every other agent. Own items are
// local inventory indices (0-based); request_counts has one entry per agent
// in the market, zero at the owner's slot. |own_items| + sum(request_counts)
// always equals the slot count N.
struct Action {
    std::vector<int> own_items;
    std::vector<int> request_counts;

    bool own_only() const {
        for (int n : request_counts)
            if (n > 0) return false;
        return true;
    }
};

// A decomposed selection unit: a single own item, or a request of `count`
// items from one other agent.
struct Arm {
    bool own = true;
    int item = -1;       // own: local inventory index
    AgentId agent = -1;  // foreign: responding agent
    int count = 0;       // foreign: number of items requested

    bool operator==(const Arm&) const = default;
};

// Eagerly enumerated action and arm spaces for one agent, with the canonical
// orderings all counters are indexed by:
//   - actions: own-item subsets in lexicographic sequence order (the empty
//     subset first), and for each subset the request vectors over the other
//     agents in ascending lexicographic order;
//   - arms: own items by inventory index, then foreign (agent, count) pairs
//     by agent then count.
// The orderings are fixed so seeded runs reproduce bit-identically.
class ActionSpace {
   public:
    ActionSpace(AgentId owner, int own_size, int agent_count, int slots);

    AgentId owner() const { return owner_; }
    int own_size() const { return own_size_; }
    int agent_count() const { return agent_count_; }
    int slots() const { return slots_; }

    const std::vector<Action>& actions() const { return actions_; }
    const std::vector<Arm>& arms() const { return arms_; }

    const Action& action(ActionId k) const { return actions_.at(k); }
    const Arm& arm(ArmId u) const { return arms_.at(u); }

    bool is_own_only(ActionId k) const { return own_only_mask_[k]; }
    const std::vector<ActionId>& own_only_actions() const { return own_only_; }
    const std::vector<ActionId>& cooperative_actions() const { return cooperative_; }

    // Arms composing an action: one own-item arm per recommended own item
    // plus one (agent, count) arm per called agent.
    const std::vector<ArmId>& arms_of(ActionId k) const { return action_arms_[k]; }

    // Agents called by the action (request count > 0), ascending.
    std::vector<AgentId> called_agents(ActionId k) const;

    // Recommendation vector m(k): per-agent counts, own slot included.
    std::vector<int> recommendation_vector(ActionId k) const;

    // Responder action set for an incoming recommendation vector m: every
    // action whose request counts match m outside this agent. The own-item
    // subset size of each is m[owner].
    const std::vector<ActionId>& responder_set(const std::vector<int>& rec_vector) const;

    ArmId arm_id(const Arm& a) const;

   private:
    AgentId owner_;
    int own_size_;
    int agent_count_;
    int slots_;
    std::vector<Action> actions_;
    std::vector<Arm> arms_;
    std::vector<bool> own_only_mask_;
    std::vector<ActionId> own_only_;
    std::vector<ActionId> cooperative_;
    std::vector<std::vector<ArmId>> action_arms_;
    std::map<std::vector<int>, std::vector<ActionId>> responder_sets_;
};

// All size-k subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> item_subsets(int inventory_size, int subset_size);

// Binomial coefficient as double; exact for the desk-scale arguments used in
// control functions.
double binomial(int n, int k);

}  // namespace cbmr
