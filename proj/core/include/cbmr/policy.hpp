#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cbmr/action_space.hpp"
#include "cbmr/rng.hpp"
#include "cbmr/types.hpp"

namespace cbmr {

struct SelectResult {
    ActionId action = -1;
    Phase slot_phase = Phase::kExploit;
    // Per-arm phases aligned with space().arms_of(action); empty for
    // action-level learners, which carry a single slot_phase.
    std::vector<Phase> arm_phases;
};

// What a responder hands back for one incoming request. `items` are local
// inventory indices; `internal_action` is the responder-side bookkeeping id
// of action-level learners and is echoed back with the outcome.
struct ResponseTicket {
    std::vector<int> items;
    ActionId internal_action = -1;
};

// Everything an agent observes about its own slot: the realized reward from
// its page and the per-item purchase outcomes. Learners receive nothing
// else; in particular no other agent's state.
struct OwnOutcome {
    ActionId action = -1;
    CellId cell = 0;
    Time t = 0;
    Phase slot_phase = Phase::kExploit;
    std::vector<Phase> arm_phases;
    double realized_reward = 0.0;
    std::vector<std::pair<int, bool>> own_purchases;         // (local index, bought)
    std::vector<std::pair<AgentId, int>> foreign_purchases;  // (agent, bought count)
};

struct ResponseOutcome {
    ResponseTicket ticket;
    CellId cell = 0;
    Time t = 0;
    std::vector<bool> purchased;  // aligned with ticket.items
    int purchased_count = 0;
};

// One agent's recommendation strategy: the slot-side selection for its own
// user and the responder side serving other agents' requests, plus the
// update hooks the simulation feeds at the end of each slot.
class AgentPolicy {
   public:
    virtual ~AgentPolicy() = default;

    virtual SelectResult select_own(const Context& x, CellId cell, Time t, Rng& rng) = 0;

    // `rec_vector` is the requester's per-agent recommendation vector m; the
    // entry at this agent's own index is the number of items to return.
    virtual ResponseTicket respond(AgentId requester, const Context& x, CellId cell,
                                   const std::vector<int>& rec_vector, Time t, Rng& rng) = 0;

    virtual void update_own(const OwnOutcome& outcome) = 0;
    virtual void update_response(const ResponseOutcome& outcome) = 0;

    virtual const ActionSpace& space() const = 0;
    virtual std::string name() const = 0;

    // State snapshot (counters and sample means per cell) as a JSON document.
    virtual std::string snapshot() const { return "{}"; }
};

// Uniform-random baseline: uniform action, uniform responder subsets.
std::unique_ptr<AgentPolicy> make_random_policy(ActionSpace space);

// Per-(action, cell) epsilon-greedy baseline on sample-mean rewards, with a
// matching epsilon-greedy responder on sample-mean purchase rates.
std::unique_ptr<AgentPolicy> make_eps_greedy_policy(ActionSpace space, double epsilon);

}  // namespace cbmr
