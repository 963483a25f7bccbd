#include "cbmr/policy.hpp"

#include <algorithm>
#include <unordered_map>

namespace cbmr {

namespace {

class RandomPolicy final : public AgentPolicy {
   public:
    explicit RandomPolicy(ActionSpace space) : space_(std::move(space)) {}

    SelectResult select_own(const Context&, CellId, Time, Rng& rng) override {
        SelectResult out;
        out.action = rng.uniform_int(static_cast<int>(space_.actions().size()));
        out.slot_phase = Phase::kExplore;
        return out;
    }

    ResponseTicket respond(AgentId, const Context&, CellId, const std::vector<int>& rec_vector,
                           Time, Rng& rng) override {
        const int want = rec_vector.at(space_.owner());
        if (want < 1 || want > space_.own_size())
            throw ProtocolError("requested more items than the inventory holds");
        ResponseTicket ticket;
        ticket.items = rng.sample_indices(space_.own_size(), want);
        return ticket;
    }

    void update_own(const OwnOutcome&) override {}
    void update_response(const ResponseOutcome&) override {}
    const ActionSpace& space() const override { return space_; }
    std::string name() const override { return "random"; }

   private:
    ActionSpace space_;
};

class EpsGreedyPolicy final : public AgentPolicy {
   public:
    EpsGreedyPolicy(ActionSpace space, double epsilon)
        : space_(std::move(space)), epsilon_(epsilon) {}

    SelectResult select_own(const Context&, CellId cell, Time, Rng& rng) override {
        SelectResult out;
        auto& rewards = reward_stats(cell);
        if (rng.next_double() < epsilon_) {
            out.action = rng.uniform_int(static_cast<int>(space_.actions().size()));
            out.slot_phase = Phase::kExplore;
            return out;
        }
        double best = -1e300;
        std::vector<ActionId> ties;
        for (ActionId k = 0; k < static_cast<ActionId>(rewards.size()); ++k) {
            const double r = rewards[k].mean;
            if (r > best + 1e-15) {
                best = r;
                ties.assign(1, k);
            } else if (r >= best - 1e-15) {
                ties.push_back(k);
            }
        }
        out.action = ties[rng.uniform_int(static_cast<int>(ties.size()))];
        out.slot_phase = Phase::kExploit;
        return out;
    }

    ResponseTicket respond(AgentId, const Context&, CellId cell,
                           const std::vector<int>& rec_vector, Time, Rng& rng) override {
        const int want = rec_vector.at(space_.owner());
        if (want < 1 || want > space_.own_size())
            throw ProtocolError("requested more items than the inventory holds");
        ResponseTicket ticket;
        if (rng.next_double() < epsilon_) {
            ticket.items = rng.sample_indices(space_.own_size(), want);
            return ticket;
        }
        auto& rates = rate_stats(cell);
        std::vector<int> order(space_.own_size());
        for (int f = 0; f < space_.own_size(); ++f) order[f] = f;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return rates[a].mean > rates[b].mean; });
        order.resize(want);
        std::sort(order.begin(), order.end());
        ticket.items = order;
        return ticket;
    }

    void update_own(const OwnOutcome& o) override {
        reward_stats(o.cell)[o.action].add(o.realized_reward);
    }

    void update_response(const ResponseOutcome& o) override {
        auto& rates = rate_stats(o.cell);
        for (size_t i = 0; i < o.ticket.items.size(); ++i)
            rates[o.ticket.items[i]].add(o.purchased[i] ? 1.0 : 0.0);
    }

    const ActionSpace& space() const override { return space_; }
    std::string name() const override { return "eps-greedy"; }

   private:
    std::vector<MeanAcc>& reward_stats(CellId cell) {
        auto it = rewards_.find(cell);
        if (it == rewards_.end())
            it = rewards_.emplace(cell, std::vector<MeanAcc>(space_.actions().size())).first;
        return it->second;
    }
    std::vector<MeanAcc>& rate_stats(CellId cell) {
        auto it = rates_.find(cell);
        if (it == rates_.end())
            it = rates_.emplace(cell, std::vector<MeanAcc>(space_.own_size())).first;
        return it->second;
    }

    ActionSpace space_;
    double epsilon_;
    std::unordered_map<CellId, std::vector<MeanAcc>> rewards_;
    std::unordered_map<CellId, std::vector<MeanAcc>> rates_;
};

}  // namespace

std::unique_ptr<AgentPolicy> make_random_policy(ActionSpace space) {
    return std::make_unique<RandomPolicy>(std::move(space));
}

std::unique_ptr<AgentPolicy> make_eps_greedy_policy(ActionSpace space, double epsilon) {
    return std::make_unique<EpsGreedyPolicy>(std::move(space), epsilon);
}

}  // namespace cbmr
