#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbmr/context_space.hpp"
#include "cbmr/market.hpp"
#include "cbmr/network.hpp"
#include "cbmr/oracle.hpp"
#include "cbmr/policy.hpp"
#include "cbmr/types.hpp"

namespace cbmr {

struct ExperimentFlags {
    bool known_inventory = false;  // training thresholds use the true |F_j|
    bool network_base_thresholds = false;  // disable topology inflation
};

struct AgentSlotView {
    Context context;
    CellId cell = 0;
    ActionId action = -1;
    Phase phase = Phase::kExploit;
    std::vector<ItemId> recommended;  // full N-item set, global ids
    std::vector<ItemId> purchased;
    double realized_reward = 0.0;   // own-page revenue: prices + commissions
    double expected_reward = 0.0;   // sigma of the executed set
    double mu_star = 0.0;
    double pseudo_regret = 0.0;
    double realized_regret = 0.0;
    double side_revenue = 0.0;  // from own items sold through other agents, net of chain charges
};

struct SlotTranscript {
    Time t = 0;
    std::vector<AgentSlotView> agents;
};

// Synchronous slot loop over all agents. Per slot: contexts arrive and every
// agent picks its slot action; cross-agent requests are dispatched (through
// relays under a topology) and answered from pre-slot responder state; full
// recommendation sets are assembled; purchases are sampled once per set;
// sales settle; and only then do all learner updates apply. No agent ever
// reads another agent's internals.
class Simulation {
   public:
    Simulation(const MarketModel& market, const TopologyGraph& graph, const Partition& partition,
               std::vector<std::unique_ptr<AgentPolicy>> policies, const OracleTable& oracle,
               std::uint64_t seed);

    SlotTranscript run_slot();
    Time now() const { return t_; }

    const AgentPolicy& policy(AgentId i) const { return *policies_[i]; }

    // Cumulative per-agent tallies over the run so far.
    struct Tally {
        double realized_reward = 0.0;
        double expected_reward = 0.0;
        double side_revenue = 0.0;
        double cum_pseudo_regret = 0.0;
        double cum_realized_regret = 0.0;
        long long train_slots = 0;
        long long explore_slots = 0;
        long long exploit_slots = 0;
        long long train_events = 0;  // arm- or action-level training updates
    };
    const Tally& tally(AgentId i) const { return tallies_[i]; }

   private:
    const MarketModel& market_;
    const TopologyGraph& graph_;
    const Partition& partition_;
    std::vector<std::unique_ptr<AgentPolicy>> policies_;
    const OracleTable& oracle_;
    Rng env_rng_;
    std::vector<Rng> agent_rngs_;
    std::vector<Tally> tallies_;
    Time t_ = 0;
};

struct ExperimentConfig {
    std::vector<std::string> policies;  // one entry, or one per agent
    Time horizon = 10000;
    int replications = 1;
    std::uint64_t seed = 1;
    std::string out_dir;
    bool write_traces = false;
    int trace_stride = 1;
    bool record_actions = false;
    double epsilon = 0.1;  // eps-greedy baseline knob
    ExperimentFlags flags;
};

struct ReplicationResult {
    std::uint64_t seed = 0;
    std::vector<Simulation::Tally> agents;
    // Cumulative pseudo-regret checkpoints (log-spaced) per agent.
    std::vector<Time> checkpoint_times;
    std::vector<std::vector<double>> checkpoint_cum_pseudo;
    // Optional per-slot action ids per agent (trace-equality tests).
    std::vector<std::vector<ActionId>> action_trace;
};

struct ExperimentSummary {
    ExperimentConfig config;
    std::vector<ReplicationResult> replications;

    double median_realized_reward(AgentId i) const;
    double mean_realized_reward(AgentId i) const;
    double median_train_slots(AgentId i) const;
    double median_train_events(AgentId i) const;
};

// Builds the partition implied by the market and horizon: the identity
// partition over queries for discrete contexts, hypercubes otherwise.
Partition partition_for(const MarketModel& market, Time horizon);

std::unique_ptr<AgentPolicy> make_policy(const std::string& name, AgentId agent,
                                         const MarketModel& market, const TopologyGraph& graph,
                                         const Partition& partition, const OracleTable& oracle,
                                         const ExperimentFlags& flags, double epsilon);

ReplicationResult run_replication(const MarketModel& market, const TopologyGraph& graph,
                                  const Partition& partition, const OracleTable& oracle,
                                  const ExperimentConfig& config, std::uint64_t seed,
                                  std::ostream* trace_out = nullptr);

// Runs all replications and, when out_dir is set, writes summary.json plus
// optional trace CSVs.
ExperimentSummary run_experiment(const MarketModel& market, const TopologyGraph& graph,
                                 const ExperimentConfig& config);

std::string summary_json(const ExperimentSummary& summary);

}  // namespace cbmr
