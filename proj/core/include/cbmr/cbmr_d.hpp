#pragma once

#include <unordered_map>
#include <vector>

#include "cbmr/action_space.hpp"
#include "cbmr/control.hpp"
#include "cbmr/policy.hpp"

namespace cbmr {

// Action-level learner for group-dependent purchase probabilities.
//
// Per (action, cell) it keeps a use counter, a sample-mean reward and a
// sample-mean purchase rate; cooperative actions carry two extra counters
// separating training slots from scored (explore/exploit) slots. The slot
// side trains or explores while any counter sits at or below its control
// threshold and otherwise exploits the empirical-best action. The responder
// side explores under-used subsets first, then serves the subset with the
// highest sample-mean purchase rate.
//
// Sample means keep their own sample counts, so a reward mean never divides
// by events that did not contribute to it. Rewards observed while an
// action's training counter was still deficient are dropped: training slots
// exist to teach the called agents, not to score the action.
class CbmrDPolicy final : public AgentPolicy {
   public:
    struct ActionStats {
        long long uses = 0;    // slot-side uses for own-only actions, plus responder uses
        long long train = 0;   // cooperative only
        long long scored = 0;  // cooperative only: explore + exploit selections
        MeanAcc reward;
        MeanAcc purchase_rate;
    };

    // `training_inventory[j]` is the inventory-size bound used in the
    // training threshold of actions calling agent j (F_max, or |F_j| when
    // inventories are public knowledge).
    CbmrDPolicy(ActionSpace space, ControlFunctions control,
                std::vector<long long> training_inventory);

    SelectResult select_own(const Context& x, CellId cell, Time t, Rng& rng) override;
    ResponseTicket respond(AgentId requester, const Context& x, CellId cell,
                           const std::vector<int>& rec_vector, Time t, Rng& rng) override;
    void update_own(const OwnOutcome& outcome) override;
    void update_response(const ResponseOutcome& outcome) override;

    const ActionSpace& space() const override { return space_; }
    std::string name() const override { return "cbmr-d"; }
    std::string snapshot() const override;

    const ActionStats& stats(ActionId k, CellId cell) const;
    double training_subset_count(ActionId k) const { return train_subsets_[k]; }

   private:
    std::vector<ActionStats>& cell_stats(CellId cell);

    ActionSpace space_;
    ControlFunctions control_;
    std::vector<double> train_subsets_;  // max_j C(inventory_j, m_j(k)) per action
    std::unordered_map<CellId, std::vector<ActionStats>> cells_;
};

}  // namespace cbmr
