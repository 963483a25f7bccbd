#include "cbmr/cbmr_ind.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cbmr {

CbmrIndPolicy::CbmrIndPolicy(ActionSpace space, ControlFunctions control,
                             std::vector<double> own_prices,
                             std::vector<double> commission_weights,
                             std::vector<long long> training_inventory, std::string name)
    : space_(std::move(space)),
      control_(control),
      own_prices_(std::move(own_prices)),
      commission_weights_(std::move(commission_weights)),
      name_(std::move(name)) {
    if (static_cast<int>(own_prices_.size()) != space_.own_size())
        throw std::invalid_argument("one price per own item required");
    if (static_cast<int>(commission_weights_.size()) != space_.agent_count())
        throw std::invalid_argument("one commission weight per agent required");
    if (static_cast<int>(training_inventory.size()) != space_.agent_count())
        throw std::invalid_argument("training inventory list must cover every agent");
    train_subsets_.resize(space_.arms().size(), 0.0);
    for (ArmId u = 0; u < static_cast<ArmId>(space_.arms().size()); ++u) {
        const Arm& arm = space_.arm(u);
        if (!arm.own)
            train_subsets_[u] =
                binomial(static_cast<int>(training_inventory[arm.agent]), arm.count);
    }
}

std::vector<CbmrIndPolicy::ArmStats>& CbmrIndPolicy::cell_stats(CellId cell) {
    auto it = cells_.find(cell);
    if (it == cells_.end())
        it = cells_.emplace(cell, std::vector<ArmStats>(space_.arms().size())).first;
    return it->second;
}

const CbmrIndPolicy::ArmStats& CbmrIndPolicy::stats(ArmId u, CellId cell) const {
    static const ArmStats kEmpty{};
    const auto it = cells_.find(cell);
    if (it == cells_.end()) return kEmpty;
    return it->second.at(u);
}

Phase CbmrIndPolicy::arm_phase(const ArmStats& s, const Arm& arm, ArmId u, Time t) const {
    const double d1 = control_.explore_threshold(t);
    if (arm.own)
        return static_cast<double>(s.uses) <= d1 ? Phase::kExplore : Phase::kExploit;
    if (static_cast<double>(s.train) <= control_.training_threshold(train_subsets_[u], t))
        return Phase::kTrain;
    return static_cast<double>(s.scored) <= d1 ? Phase::kExplore : Phase::kExploit;
}

double CbmrIndPolicy::action_score(ActionId k, CellId cell) const {
    const auto it = cells_.find(cell);
    double score = 0.0;
    for (ArmId u : space_.arms_of(k)) {
        const Arm& arm = space_.arm(u);
        const double rate = it == cells_.end() ? 0.0 : it->second[u].rate.mean;
        score += arm.own ? own_prices_[arm.item] * rate : commission_weights_[arm.agent] * rate;
    }
    return score;
}

SelectResult CbmrIndPolicy::select_own(const Context&, CellId cell, Time t, Rng& rng) {
    auto& stats = cell_stats(cell);

    std::vector<bool> deficient(stats.size(), false);
    bool any_deficient = false;
    for (ArmId u = 0; u < static_cast<ArmId>(stats.size()); ++u) {
        const Phase p = arm_phase(stats[u], space_.arm(u), u, t);
        if (p != Phase::kExploit) {
            deficient[u] = true;
            any_deficient = true;
        }
    }

    SelectResult out;
    if (any_deficient) {
        // Uniform over actions covering at least one deficient arm.
        std::vector<ActionId> eligible;
        for (ActionId k = 0; k < static_cast<ActionId>(space_.actions().size()); ++k) {
            for (ArmId u : space_.arms_of(k)) {
                if (deficient[u]) {
                    eligible.push_back(k);
                    break;
                }
            }
        }
        out.action = eligible[rng.uniform_int(static_cast<int>(eligible.size()))];
    } else {
        double best = -1e300;
        std::vector<ActionId> ties;
        for (ActionId k = 0; k < static_cast<ActionId>(space_.actions().size()); ++k) {
            const double v = action_score(k, cell);
            if (v > best + 1e-15) {
                best = v;
                ties.assign(1, k);
            } else if (v >= best - 1e-15) {
                ties.push_back(k);
            }
        }
        out.action = ties[rng.uniform_int(static_cast<int>(ties.size()))];
    }

    // Arms of one slot can sit in different phases.
    Phase slot = Phase::kExploit;
    for (ArmId u : space_.arms_of(out.action)) {
        const Phase p = arm_phase(stats[u], space_.arm(u), u, t);
        out.arm_phases.push_back(p);
        if (p == Phase::kTrain)
            slot = Phase::kTrain;
        else if (p == Phase::kExplore && slot == Phase::kExploit)
            slot = Phase::kExplore;
    }
    out.slot_phase = slot;
    return out;
}

void CbmrIndPolicy::update_own(const OwnOutcome& o) {
    auto& stats = cell_stats(o.cell);
    const auto& arms = space_.arms_of(o.action);
    const Action& action = space_.action(o.action);

    for (size_t idx = 0; idx < arms.size(); ++idx) {
        const ArmId u = arms[idx];
        const Arm& arm = space_.arm(u);
        ArmStats& s = stats[u];
        if (arm.own) {
            bool bought = false;
            for (const auto& [item, flag] : o.own_purchases) {
                if (item == arm.item) {
                    bought = flag;
                    break;
                }
            }
            s.rate.add(bought ? 1.0 : 0.0);
            s.uses += 1;
        } else {
            const double d2 = control_.training_threshold(train_subsets_[u], o.t);
            if (static_cast<double>(s.train) <= d2) {
                s.train += 1;  // training: the estimate stays untouched
                continue;
            }
            int bought = 0;
            for (const auto& [agent, count] : o.foreign_purchases) {
                if (agent == arm.agent) {
                    bought = count;
                    break;
                }
            }
            if (bought < 0 || bought > action.request_counts[arm.agent])
                throw std::logic_error("foreign purchase count outside the requested range");
            s.rate.add(static_cast<double>(bought));
            s.scored += 1;
        }
    }
}

ResponseTicket CbmrIndPolicy::respond(AgentId, const Context&, CellId cell,
                                      const std::vector<int>& rec_vector, Time t, Rng& rng) {
    const int want = rec_vector.at(space_.owner());
    if (want < 1 || want > space_.own_size())
        throw ProtocolError("requested more items than the inventory holds");

    auto& stats = cell_stats(cell);
    const double d1 = control_.explore_threshold(t);

    // Under-explored items first, chosen uniformly when there are more than
    // requested; remaining slots go to the best explored estimates.
    std::vector<int> under;
    std::vector<int> explored;
    for (int f = 0; f < space_.own_size(); ++f) {
        if (static_cast<double>(stats[f].uses) <= d1)
            under.push_back(f);
        else
            explored.push_back(f);
    }

    ResponseTicket ticket;
    if (static_cast<int>(under.size()) >= want) {
        const auto picks = rng.sample_indices(static_cast<int>(under.size()), want);
        for (int idx : picks) ticket.items.push_back(under[idx]);
    } else {
        ticket.items = under;
        std::stable_sort(explored.begin(), explored.end(), [&](int a, int b) {
            return stats[a].rate.mean > stats[b].rate.mean;
        });
        for (int f : explored) {
            if (static_cast<int>(ticket.items.size()) == want) break;
            ticket.items.push_back(f);
        }
        std::sort(ticket.items.begin(), ticket.items.end());
    }
    return ticket;
}

void CbmrIndPolicy::update_response(const ResponseOutcome& o) {
    auto& stats = cell_stats(o.cell);
    for (size_t idx = 0; idx < o.ticket.items.size(); ++idx) {
        ArmStats& s = stats.at(o.ticket.items[idx]);
        s.rate.add(o.purchased[idx] ? 1.0 : 0.0);
        s.uses += 1;
    }
}

std::string CbmrIndPolicy::snapshot() const {
    std::map<CellId, const std::vector<ArmStats>*> ordered;
    for (const auto& [cell, stats] : cells_) ordered[cell] = &stats;
    std::ostringstream out;
    out << "{\"policy\":\"" << name_ << "\",\"cells\":{";
    bool first_cell = true;
    for (const auto& [cell, stats] : ordered) {
        if (!first_cell) out << ",";
        first_cell = false;
        out << "\"" << cell << "\":[";
        for (size_t u = 0; u < stats->size(); ++u) {
            const ArmStats& s = (*stats)[u];
            if (u) out << ",";
            out << "{\"uses\":" << s.uses << ",\"train\":" << s.train
                << ",\"scored\":" << s.scored << ",\"rate_n\":" << s.rate.count
                << ",\"rate\":" << s.rate.mean << "}";
        }
        out << "]";
    }
    out << "}}";
    return out.str();
}

}  // namespace cbmr
