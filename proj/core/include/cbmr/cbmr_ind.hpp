#pragma once

#include <unordered_map>
#include <vector>

#include "cbmr/action_space.hpp"
#include "cbmr/control.hpp"
#include "cbmr/policy.hpp"

namespace cbmr {

// Arm-level learner for independent purchase probabilities.
//
// Estimates a sample-mean purchase rate per arm (own item, or foreign
// (agent, count) request) instead of per action, and scores actions by the
// price- and commission-weighted sum of their arms' estimates. A slot may
// train one arm while exploiting another; foreign arms in training update
// only their training counter.
//
// The same class covers the network variant: commission weights are the
// effective first-hop commissions and the training inventory per agent is
// inflated by the topology factor. On a complete graph with base thresholds
// it behaves identically to the plain learner.
class CbmrIndPolicy final : public AgentPolicy {
   public:
    struct ArmStats {
        long long uses = 0;    // own arms: slot-side + responder-side selections
        long long train = 0;   // foreign arms only
        long long scored = 0;  // foreign arms only
        MeanAcc rate;
    };

    CbmrIndPolicy(ActionSpace space, ControlFunctions control, std::vector<double> own_prices,
                  std::vector<double> commission_weights,
                  std::vector<long long> training_inventory, std::string name = "cbmr-ind");

    SelectResult select_own(const Context& x, CellId cell, Time t, Rng& rng) override;
    ResponseTicket respond(AgentId requester, const Context& x, CellId cell,
                           const std::vector<int>& rec_vector, Time t, Rng& rng) override;
    void update_own(const OwnOutcome& outcome) override;
    void update_response(const ResponseOutcome& outcome) override;

    const ActionSpace& space() const override { return space_; }
    std::string name() const override { return name_; }
    std::string snapshot() const override;

    const ArmStats& stats(ArmId u, CellId cell) const;
    double action_score(ActionId k, CellId cell) const;
    double training_subset_count(ArmId u) const { return train_subsets_[u]; }

   private:
    std::vector<ArmStats>& cell_stats(CellId cell);
    Phase arm_phase(const ArmStats& s, const Arm& arm, ArmId u, Time t) const;

    ActionSpace space_;
    ControlFunctions control_;
    std::vector<double> own_prices_;
    std::vector<double> commission_weights_;  // per agent id
    std::vector<double> train_subsets_;       // C(training inventory, n(u)) per arm
    std::string name_;
    std::unordered_map<CellId, std::vector<ArmStats>> cells_;
};

}  // namespace cbmr
