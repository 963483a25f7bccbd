#include "cbmr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cbmr/cbmr_d.hpp"
#include "cbmr/cbmr_ind.hpp"
#include "json.hpp"

namespace cbmr {

namespace {

// Benchmark policy computed from the true model; unavailable to learners.
class OraclePolicy final : public AgentPolicy {
   public:
    OraclePolicy(const MarketModel& market, const OracleTable& table, ActionSpace space,
                 AgentId agent)
        : market_(market), table_(table), space_(std::move(space)), agent_(agent) {}

    SelectResult select_own(const Context& x, CellId, Time, Rng&) override {
        SelectResult out;
        out.action = market_.contexts().discrete
                         ? table_.best_action(agent_, x)
                         : oracle::best_action(market_, table_.rule(), space_, agent_, x);
        out.slot_phase = Phase::kExploit;
        return out;
    }

    ResponseTicket respond(AgentId requester, const Context& x, CellId,
                           const std::vector<int>& rec_vector, Time, Rng&) override {
        const auto items =
            oracle::best_responder_items(market_, table_.rule(), agent_, requester, rec_vector, x);
        ResponseTicket ticket;
        const auto& inventory = market_.inventory(agent_);
        for (ItemId f : items) {
            const auto it = std::lower_bound(inventory.begin(), inventory.end(), f);
            ticket.items.push_back(static_cast<int>(it - inventory.begin()));
        }
        return ticket;
    }

    void update_own(const OwnOutcome&) override {}
    void update_response(const ResponseOutcome&) override {}
    const ActionSpace& space() const override { return space_; }
    std::string name() const override { return "oracle"; }

   private:
    const MarketModel& market_;
    const OracleTable& table_;
    ActionSpace space_;
    AgentId agent_;
};

}  // namespace

Simulation::Simulation(const MarketModel& market, const TopologyGraph& graph,
                       const Partition& partition,
                       std::vector<std::unique_ptr<AgentPolicy>> policies,
                       const OracleTable& oracle, std::uint64_t seed)
    : market_(market),
      graph_(graph),
      partition_(partition),
      policies_(std::move(policies)),
      oracle_(oracle),
      env_rng_(mix_seed(seed, 0)) {
    if (static_cast<int>(policies_.size()) != market_.agent_count())
        throw std::invalid_argument("one policy per agent required");
    for (AgentId i = 0; i < market_.agent_count(); ++i)
        agent_rngs_.emplace_back(mix_seed(seed, 1000 + static_cast<std::uint64_t>(i)));
    tallies_.resize(market_.agent_count());
}

SlotTranscript Simulation::run_slot() {
    ++t_;
    const int agent_count = market_.agent_count();
    SlotTranscript ts;
    ts.t = t_;
    ts.agents.resize(agent_count);

    // 1. Arrivals and slot-side selections for every agent.
    std::vector<SelectResult> selections(agent_count);
    for (AgentId i = 0; i < agent_count; ++i) {
        AgentSlotView& view = ts.agents[i];
        view.context = market_.draw_context(i, env_rng_);
        view.cell = partition_.cell_of(view.context);
        selections[i] = policies_[i]->select_own(view.context, view.cell, t_, agent_rngs_[i]);
        view.action = selections[i].action;
        view.phase = selections[i].slot_phase;
    }

    // 2. Cross-agent requests, answered from pre-slot responder state. Under
    //    a topology the relays forward the request verbatim; only the
    //    terminal agent serves and learns.
    struct PendingResponse {
        AgentId requester = -1;
        AgentId responder = -1;
        CellId cell = 0;
        ResponseTicket ticket;
        std::vector<ItemId> global_items;
    };
    std::vector<PendingResponse> pending;
    for (AgentId i = 0; i < agent_count; ++i) {
        const ActionSpace& space = policies_[i]->space();
        const Action& action = space.action(selections[i].action);
        const std::vector<int> rec_vector = space.recommendation_vector(selections[i].action);
        for (AgentId j = 0; j < agent_count; ++j) {
            if (action.request_counts[j] == 0) continue;
            PendingResponse pr;
            pr.requester = i;
            pr.responder = j;
            pr.cell = ts.agents[i].cell;
            pr.ticket = policies_[j]->respond(i, ts.agents[i].context, pr.cell, rec_vector, t_,
                                              agent_rngs_[j]);
            if (static_cast<int>(pr.ticket.items.size()) != action.request_counts[j])
                throw ProtocolError("responder returned a wrong-sized item set");
            const auto& inventory = market_.inventory(j);
            for (int local : pr.ticket.items) pr.global_items.push_back(inventory.at(local));
            pending.push_back(std::move(pr));
        }
    }

    // 3. Assemble the N-item set per agent.
    for (AgentId i = 0; i < agent_count; ++i) {
        AgentSlotView& view = ts.agents[i];
        const ActionSpace& space = policies_[i]->space();
        const Action& action = space.action(view.action);
        const auto& inventory = market_.inventory(i);
        for (int local : action.own_items) view.recommended.push_back(inventory.at(local));
        for (const PendingResponse& pr : pending) {
            if (pr.requester != i) continue;
            view.recommended.insert(view.recommended.end(), pr.global_items.begin(),
                                    pr.global_items.end());
        }
        if (static_cast<int>(view.recommended.size()) != market_.slots())
            throw ProtocolError("assembled recommendation set has the wrong size");
    }

    // 4. One purchase draw per recommended set.
    for (AgentId i = 0; i < agent_count; ++i)
        ts.agents[i].purchased =
            market_.sample_purchases(ts.agents[i].context, ts.agents[i].recommended, env_rng_);

    // 5. Settlements; every sale must conserve the item price.
    for (AgentId i = 0; i < agent_count; ++i) {
        AgentSlotView& view = ts.agents[i];
        for (ItemId f : view.purchased) {
            const Item& item = market_.item(f);
            if (item.owner == i) {
                view.realized_reward += item.price;
                continue;
            }
            const ChainSettlement chain =
                settle_chain(item.price, i, item.owner, graph_, market_.commissions());
            if (std::abs(chain.total() - item.price) > 1e-9)
                throw std::logic_error("settlement does not conserve the item price");
            view.realized_reward += chain.payouts.front().second;
            for (size_t h = 1; h < chain.payouts.size(); ++h)
                ts.agents[chain.payouts[h].first].side_revenue += chain.payouts[h].second;
            ts.agents[item.owner].side_revenue += chain.owner_net;
        }
    }

    // 6. Learner updates from this slot's outcomes, then regret accounting.
    for (AgentId i = 0; i < agent_count; ++i) {
        AgentSlotView& view = ts.agents[i];
        const ActionSpace& space = policies_[i]->space();
        const Action& action = space.action(view.action);
        const auto& inventory = market_.inventory(i);

        OwnOutcome outcome;
        outcome.action = view.action;
        outcome.cell = view.cell;
        outcome.t = t_;
        outcome.slot_phase = view.phase;
        outcome.arm_phases = selections[i].arm_phases;
        outcome.realized_reward = view.realized_reward;
        for (int local : action.own_items) {
            const ItemId f = inventory.at(local);
            const bool bought =
                std::find(view.purchased.begin(), view.purchased.end(), f) != view.purchased.end();
            outcome.own_purchases.emplace_back(local, bought);
        }
        for (const PendingResponse& pr : pending) {
            if (pr.requester != i) continue;
            int bought = 0;
            for (ItemId f : pr.global_items)
                bought += std::find(view.purchased.begin(), view.purchased.end(), f) !=
                                  view.purchased.end()
                              ? 1
                              : 0;
            outcome.foreign_purchases.emplace_back(pr.responder, bought);
        }
        policies_[i]->update_own(outcome);
    }
    for (const PendingResponse& pr : pending) {
        const AgentSlotView& requester_view = ts.agents[pr.requester];
        ResponseOutcome outcome;
        outcome.ticket = pr.ticket;
        outcome.cell = pr.cell;
        outcome.t = t_;
        for (ItemId f : pr.global_items) {
            const bool bought = std::find(requester_view.purchased.begin(),
                                          requester_view.purchased.end(),
                                          f) != requester_view.purchased.end();
            outcome.purchased.push_back(bought);
            outcome.purchased_count += bought ? 1 : 0;
        }
        policies_[pr.responder]->update_response(outcome);
    }

    for (AgentId i = 0; i < agent_count; ++i) {
        AgentSlotView& view = ts.agents[i];
        const RegretStep step = regret_step(market_, oracle_, i, view.context, view.recommended,
                                            view.realized_reward);
        view.expected_reward = oracle::sigma(market_, oracle_.rule(), i, view.recommended,
                                             view.context);
        view.mu_star = step.pseudo + view.expected_reward;
        view.pseudo_regret = step.pseudo;
        view.realized_regret = step.realized;

        Tally& tally = tallies_[i];
        tally.realized_reward += view.realized_reward;
        tally.expected_reward += view.expected_reward;
        tally.side_revenue += view.side_revenue;
        tally.cum_pseudo_regret += step.pseudo;
        tally.cum_realized_regret += step.realized;
        switch (view.phase) {
            case Phase::kTrain: tally.train_slots += 1; break;
            case Phase::kExplore: tally.explore_slots += 1; break;
            case Phase::kExploit: tally.exploit_slots += 1; break;
        }
        if (selections[i].arm_phases.empty()) {
            tally.train_events += view.phase == Phase::kTrain ? 1 : 0;
        } else {
            for (Phase p : selections[i].arm_phases)
                tally.train_events += p == Phase::kTrain ? 1 : 0;
        }
    }
    return ts;
}

Partition partition_for(const MarketModel& market, Time horizon) {
    if (market.contexts().discrete) return Partition::discrete(market.contexts().query_count);
    const int cells = cells_per_axis_for_horizon(horizon, market.alpha(),
                                                 market.contexts().dimension);
    return Partition::hypercube(market.contexts().dimension, cells);
}

std::unique_ptr<AgentPolicy> make_policy(const std::string& name, AgentId agent,
                                         const MarketModel& market, const TopologyGraph& graph,
                                         const Partition& partition, const OracleTable& oracle,
                                         const ExperimentFlags& flags, double epsilon) {
    ActionSpace space(agent, static_cast<int>(market.inventory(agent).size()),
                      market.agent_count(), market.slots());
    const ControlFunctions control =
        ControlFunctions::from_model(market.alpha(), partition.dimension());

    std::vector<long long> training_inventory(market.agent_count());
    for (AgentId j = 0; j < market.agent_count(); ++j)
        training_inventory[j] = flags.known_inventory
                                    ? static_cast<long long>(market.inventory(j).size())
                                    : market.f_max();

    if (name == "cbmr-d")
        return std::make_unique<CbmrDPolicy>(std::move(space), control,
                                             std::move(training_inventory));

    if (name == "cbmr-ind" || name == "cbmr-ind-n") {
        RevenueRule rule{&market.commissions(), &graph};
        std::vector<double> prices;
        for (ItemId f : market.inventory(agent)) prices.push_back(market.item(f).price);
        std::vector<double> weights(market.agent_count(), 0.0);
        for (AgentId j = 0; j < market.agent_count(); ++j)
            if (j != agent) weights[j] = rule.recommender_cut(agent, j, 1.0);
        if (name == "cbmr-ind-n" && !flags.network_base_thresholds && !graph.is_complete()) {
            const long long inflated = network_training_inventory(graph, agent, market.f_max());
            for (AgentId j = 0; j < market.agent_count(); ++j) training_inventory[j] = inflated;
        }
        return std::make_unique<CbmrIndPolicy>(std::move(space), control, std::move(prices),
                                               std::move(weights), std::move(training_inventory),
                                               name);
    }

    if (name == "oracle")
        return std::make_unique<OraclePolicy>(market, oracle, std::move(space), agent);
    if (name == "random") return make_random_policy(std::move(space));
    if (name == "eps-greedy") return make_eps_greedy_policy(std::move(space), epsilon);
    throw ConfigError("unknown policy: " + name);
}

namespace {

std::vector<Time> checkpoint_times(Time horizon) {
    std::set<Time> points;
    const int samples = 40;
    for (int k = 1; k <= samples; ++k) {
        const double frac = static_cast<double>(k) / samples;
        const Time t = static_cast<Time>(
            std::llround(std::pow(static_cast<double>(horizon), frac)));
        points.insert(std::max<Time>(1, std::min(horizon, t)));
    }
    points.insert(horizon);
    return {points.begin(), points.end()};
}

}  // namespace

ReplicationResult run_replication(const MarketModel& market, const TopologyGraph& graph,
                                  const Partition& partition, const OracleTable& oracle,
                                  const ExperimentConfig& config, std::uint64_t seed,
                                  std::ostream* trace_out) {
    const int agent_count = market.agent_count();
    std::vector<std::string> names = config.policies;
    if (names.empty()) throw ConfigError("no policy configured");
    if (names.size() == 1) names.assign(agent_count, names[0]);
    if (static_cast<int>(names.size()) != agent_count)
        throw ConfigError("policy list must name one policy, or one per agent");

    std::vector<std::unique_ptr<AgentPolicy>> policies;
    for (AgentId i = 0; i < agent_count; ++i)
        policies.push_back(make_policy(names[i], i, market, graph, partition, oracle,
                                       config.flags, config.epsilon));

    Simulation sim(market, graph, partition, std::move(policies), oracle, seed);

    ReplicationResult result;
    result.seed = seed;
    result.checkpoint_times = checkpoint_times(config.horizon);
    result.checkpoint_cum_pseudo.assign(agent_count, {});
    if (config.record_actions) result.action_trace.assign(agent_count, {});

    if (trace_out != nullptr) *trace_out << regret_trace_csv_header() << "\n";

    size_t next_checkpoint = 0;
    for (Time t = 1; t <= config.horizon; ++t) {
        const SlotTranscript ts = sim.run_slot();
        if (config.record_actions)
            for (AgentId i = 0; i < agent_count; ++i)
                result.action_trace[i].push_back(ts.agents[i].action);
        if (trace_out != nullptr &&
            (t % config.trace_stride == 0 || t == 1 || t == config.horizon)) {
            for (AgentId i = 0; i < agent_count; ++i) {
                RegretTraceRow row;
                row.t = t;
                row.agent = i;
                row.phase = ts.agents[i].phase;
                row.action = ts.agents[i].action;
                row.pseudo_regret = ts.agents[i].pseudo_regret;
                row.realized_regret = ts.agents[i].realized_regret;
                row.cum_pseudo = sim.tally(i).cum_pseudo_regret;
                row.cum_realized = sim.tally(i).cum_realized_regret;
                *trace_out << regret_trace_csv_row(row) << "\n";
            }
        }
        if (next_checkpoint < result.checkpoint_times.size() &&
            t == result.checkpoint_times[next_checkpoint]) {
            for (AgentId i = 0; i < agent_count; ++i)
                result.checkpoint_cum_pseudo[i].push_back(sim.tally(i).cum_pseudo_regret);
            ++next_checkpoint;
        }
    }
    for (AgentId i = 0; i < agent_count; ++i) result.agents.push_back(sim.tally(i));
    return result;
}

namespace {

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

double ExperimentSummary::median_realized_reward(AgentId i) const {
    std::vector<double> v;
    for (const auto& rep : replications) v.push_back(rep.agents[i].realized_reward);
    return median_of(std::move(v));
}

double ExperimentSummary::mean_realized_reward(AgentId i) const {
    double s = 0.0;
    for (const auto& rep : replications) s += rep.agents[i].realized_reward;
    return replications.empty() ? 0.0 : s / static_cast<double>(replications.size());
}

double ExperimentSummary::median_train_slots(AgentId i) const {
    std::vector<double> v;
    for (const auto& rep : replications)
        v.push_back(static_cast<double>(rep.agents[i].train_slots));
    return median_of(std::move(v));
}

double ExperimentSummary::median_train_events(AgentId i) const {
    std::vector<double> v;
    for (const auto& rep : replications)
        v.push_back(static_cast<double>(rep.agents[i].train_events));
    return median_of(std::move(v));
}

ExperimentSummary run_experiment(const MarketModel& market, const TopologyGraph& graph,
                                 const ExperimentConfig& config) {
    const Partition partition = partition_for(market, config.horizon);
    RevenueRule rule{&market.commissions(), &graph};

    std::vector<ActionSpace> spaces;
    spaces.reserve(market.agent_count());
    for (AgentId i = 0; i < market.agent_count(); ++i)
        spaces.emplace_back(i, static_cast<int>(market.inventory(i).size()),
                            market.agent_count(), market.slots());
    std::vector<const ActionSpace*> space_ptrs;
    for (const auto& s : spaces) space_ptrs.push_back(&s);
    const OracleTable oracle(market, rule, partition, space_ptrs);

    ExperimentSummary summary;
    summary.config = config;

    const bool to_disk = !config.out_dir.empty();
    if (to_disk) std::filesystem::create_directories(config.out_dir);

    for (int r = 0; r < config.replications; ++r) {
        const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
        std::ofstream trace_file;
        std::ostream* trace = nullptr;
        if (to_disk && config.write_traces) {
            trace_file.open(std::filesystem::path(config.out_dir) /
                            ("trace_rep" + std::to_string(r) + ".csv"));
            trace = &trace_file;
        }
        summary.replications.push_back(
            run_replication(market, graph, partition, oracle, config, seed, trace));
    }

    if (to_disk) {
        std::ofstream out(std::filesystem::path(config.out_dir) / "summary.json");
        out << summary_json(summary) << "\n";
    }
    return summary;
}

std::string summary_json(const ExperimentSummary& summary) {
    using nlohmann::json;
    json doc;
    doc["schema"] = "cbmr-summary/1";
    doc["config"] = {
        {"policies", summary.config.policies},
        {"horizon", summary.config.horizon},
        {"replications", summary.config.replications},
        {"seed", summary.config.seed},
        {"known_inventory", summary.config.flags.known_inventory},
        {"network_base_thresholds", summary.config.flags.network_base_thresholds},
    };
    json reps = json::array();
    for (const auto& rep : summary.replications) {
        json agents = json::array();
        for (size_t i = 0; i < rep.agents.size(); ++i) {
            const auto& a = rep.agents[i];
            agents.push_back({
                {"agent", i},
                {"realized_reward", a.realized_reward},
                {"expected_reward", a.expected_reward},
                {"side_revenue", a.side_revenue},
                {"cum_pseudo_regret", a.cum_pseudo_regret},
                {"cum_realized_regret", a.cum_realized_regret},
                {"train_slots", a.train_slots},
                {"explore_slots", a.explore_slots},
                {"exploit_slots", a.exploit_slots},
                {"train_events", a.train_events},
            });
        }
        json checkpoints = json::array();
        for (size_t k = 0; k < rep.checkpoint_times.size(); ++k) {
            json row;
            row["t"] = rep.checkpoint_times[k];
            json per_agent = json::array();
            for (size_t i = 0; i < rep.checkpoint_cum_pseudo.size(); ++i)
                per_agent.push_back(rep.checkpoint_cum_pseudo[i][k]);
            row["cum_pseudo"] = per_agent;
            checkpoints.push_back(row);
        }
        reps.push_back({{"seed", rep.seed}, {"agents", agents}, {"checkpoints", checkpoints}});
    }
    doc["replications"] = reps;

    json aggregate = json::array();
    if (!summary.replications.empty()) {
        const size_t agents = summary.replications.front().agents.size();
        for (size_t i = 0; i < agents; ++i) {
            aggregate.push_back({
                {"agent", i},
                {"median_realized_reward", summary.median_realized_reward(static_cast<int>(i))},
                {"mean_realized_reward", summary.mean_realized_reward(static_cast<int>(i))},
                {"median_train_slots", summary.median_train_slots(static_cast<int>(i))},
                {"median_train_events", summary.median_train_events(static_cast<int>(i))},
            });
        }
    }
    doc["aggregate"] = aggregate;
    return doc.dump(2);
}

}  // namespace cbmr
