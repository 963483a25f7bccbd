#include "cbmr/cbmr_d.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cbmr {

CbmrDPolicy::CbmrDPolicy(ActionSpace space, ControlFunctions control,
                         std::vector<long long> training_inventory)
    : space_(std::move(space)), control_(control) {
    if (static_cast<int>(training_inventory.size()) != space_.agent_count())
        throw std::invalid_argument("training inventory list must cover every agent");
    train_subsets_.resize(space_.actions().size(), 0.0);
    for (ActionId k : space_.cooperative_actions()) {
        double worst = 0.0;
        const Action& a = space_.action(k);
        for (AgentId j = 0; j < space_.agent_count(); ++j) {
            if (a.request_counts[j] > 0)
                worst = std::max(worst, binomial(static_cast<int>(training_inventory[j]),
                                                 a.request_counts[j]));
        }
        train_subsets_[k] = worst;
    }
}

std::vector<CbmrDPolicy::ActionStats>& CbmrDPolicy::cell_stats(CellId cell) {
    auto it = cells_.find(cell);
    if (it == cells_.end())
        it = cells_.emplace(cell, std::vector<ActionStats>(space_.actions().size())).first;
    return it->second;
}

const CbmrDPolicy::ActionStats& CbmrDPolicy::stats(ActionId k, CellId cell) const {
    static const ActionStats kEmpty{};
    const auto it = cells_.find(cell);
    if (it == cells_.end()) return kEmpty;
    return it->second.at(k);
}

SelectResult CbmrDPolicy::select_own(const Context&, CellId cell, Time t, Rng& rng) {
    auto& stats = cell_stats(cell);
    const double d1 = control_.explore_threshold(t);

    // Deficiency set: own-only actions short on uses, cooperative actions
    // short on training or on scored selections.
    std::vector<ActionId> deficient;
    for (ActionId k = 0; k < static_cast<ActionId>(stats.size()); ++k) {
        const ActionStats& s = stats[k];
        if (space_.is_own_only(k)) {
            if (static_cast<double>(s.uses) <= d1) deficient.push_back(k);
        } else {
            const double d2 = control_.training_threshold(train_subsets_[k], t);
            if (static_cast<double>(s.train) <= d2 || static_cast<double>(s.scored) <= d1)
                deficient.push_back(k);
        }
    }

    SelectResult out;
    if (!deficient.empty()) {
        out.action = deficient[rng.uniform_int(static_cast<int>(deficient.size()))];
        // Training takes precedence when both counters are deficient.
        if (!space_.is_own_only(out.action) &&
            static_cast<double>(stats[out.action].train) <=
                control_.training_threshold(train_subsets_[out.action], t))
            out.slot_phase = Phase::kTrain;
        else
            out.slot_phase = Phase::kExplore;
        return out;
    }

    double best = -1e300;
    std::vector<ActionId> ties;
    for (ActionId k = 0; k < static_cast<ActionId>(stats.size()); ++k) {
        const double r = stats[k].reward.mean;
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

void CbmrDPolicy::update_own(const OwnOutcome& o) {
    auto& stats = cell_stats(o.cell);
    ActionStats& s = stats.at(o.action);
    if (o.slot_phase == Phase::kTrain) {
        if (space_.is_own_only(o.action))
            throw std::logic_error("own-only actions have no training phase");
        // The reward is received but deliberately not averaged: the slot was
        // spent teaching the called agents.
        s.train += 1;
        return;
    }
    s.reward.add(o.realized_reward);
    if (space_.is_own_only(o.action))
        s.uses += 1;
    else
        s.scored += 1;
}

ResponseTicket CbmrDPolicy::respond(AgentId, const Context&, CellId cell,
                                    const std::vector<int>& rec_vector, Time t, Rng& rng) {
    const int want = rec_vector.at(space_.owner());
    if (want < 1 || want > space_.own_size())
        throw ProtocolError("requested more items than the inventory holds");

    const std::vector<ActionId>& candidates = space_.responder_set(rec_vector);
    auto& stats = cell_stats(cell);
    const double d1 = control_.explore_threshold(t);

    std::vector<ActionId> under;
    for (ActionId k : candidates)
        if (static_cast<double>(stats[k].uses) <= d1) under.push_back(k);

    ActionId chosen;
    if (!under.empty()) {
        chosen = under[rng.uniform_int(static_cast<int>(under.size()))];
    } else {
        double best = -1e300;
        std::vector<ActionId> ties;
        for (ActionId k : candidates) {
            const double p = stats[k].purchase_rate.mean;
            if (p > best + 1e-15) {
                best = p;
                ties.assign(1, k);
            } else if (p >= best - 1e-15) {
                ties.push_back(k);
            }
        }
        chosen = ties[rng.uniform_int(static_cast<int>(ties.size()))];
    }

    ResponseTicket ticket;
    ticket.internal_action = chosen;
    ticket.items = space_.action(chosen).own_items;
    return ticket;
}

void CbmrDPolicy::update_response(const ResponseOutcome& o) {
    auto& stats = cell_stats(o.cell);
    ActionStats& s = stats.at(o.ticket.internal_action);
    s.purchase_rate.add(static_cast<double>(o.purchased_count));
    s.uses += 1;
}

std::string CbmrDPolicy::snapshot() const {
    // Cells sorted for stable output.
    std::map<CellId, const std::vector<ActionStats>*> ordered;
    for (const auto& [cell, stats] : cells_) ordered[cell] = &stats;
    std::ostringstream out;
    out << "{\"policy\":\"cbmr-d\",\"cells\":{";
    bool first_cell = true;
    for (const auto& [cell, stats] : ordered) {
        if (!first_cell) out << ",";
        first_cell = false;
        out << "\"" << cell << "\":[";
        for (size_t k = 0; k < stats->size(); ++k) {
            const ActionStats& s = (*stats)[k];
            if (k) out << ",";
            out << "{\"uses\":" << s.uses << ",\"train\":" << s.train
                << ",\"scored\":" << s.scored << ",\"reward_n\":" << s.reward.count
                << ",\"reward\":" << s.reward.mean << ",\"prate_n\":" << s.purchase_rate.count
                << ",\"prate\":" << s.purchase_rate.mean << "}";
        }
        out << "]";
    }
    out << "}}";
    return out.str();
}

}  // namespace cbmr
