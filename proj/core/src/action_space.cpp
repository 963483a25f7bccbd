#include "cbmr/action_space.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace cbmr {

namespace {

// Request vectors over the foreign agents (ascending id order) summing to
// `remaining`, appended in lexicographic order.
void emit_request_vectors(int foreign_agents, int remaining, std::vector<int>& prefix,
                          std::vector<std::vector<int>>& out) {
    if (static_cast<int>(prefix.size()) == foreign_agents) {
        if (remaining == 0) out.push_back(prefix);
        return;
    }
    const bool last = static_cast<int>(prefix.size()) == foreign_agents - 1;
    for (int n = 0; n <= remaining; ++n) {
        if (last && n != remaining) continue;
        prefix.push_back(n);
        emit_request_vectors(foreign_agents, remaining - n, prefix, out);
        prefix.pop_back();
    }
}

// Own-item subsets of size <= max_size in lexicographic sequence order:
// {} < {0} < {0,1} < {0,2} < {1} < ... Each node emits before descending.
void emit_subsets(int inventory_size, int max_size, int next, std::vector<int>& prefix,
                  const std::function<void(const std::vector<int>&)>& sink) {
    sink(prefix);
    if (static_cast<int>(prefix.size()) == max_size) return;
    for (int f = next; f < inventory_size; ++f) {
        prefix.push_back(f);
        emit_subsets(inventory_size, max_size, f + 1, prefix, sink);
        prefix.pop_back();
    }
}

}  // namespace

ActionSpace::ActionSpace(AgentId owner, int own_size, int agent_count, int slots)
    : owner_(owner), own_size_(own_size), agent_count_(agent_count), slots_(slots) {
    if (own_size < slots)
        throw std::invalid_argument("inventory smaller than the number of slots");
    if (agent_count < 1 || slots < 1 || owner < 0 || owner >= agent_count)
        throw std::invalid_argument("invalid action space parameters");

    std::vector<AgentId> foreign;
    for (AgentId j = 0; j < agent_count; ++j)
        if (j != owner) foreign.push_back(j);

    std::vector<int> prefix;
    emit_subsets(own_size, slots, 0, prefix, [&](const std::vector<int>& own) {
        const int need = slots_ - static_cast<int>(own.size());
        if (need > 0 && foreign.empty()) return;
        std::vector<std::vector<int>> vectors;
        if (need == 0) {
            vectors.push_back({});
            vectors.back().resize(foreign.size(), 0);
        } else {
            std::vector<int> vp;
            emit_request_vectors(static_cast<int>(foreign.size()), need, vp, vectors);
        }
        for (const auto& v : vectors) {
            Action a;
            a.own_items = own;
            a.request_counts.assign(agent_count_, 0);
            for (size_t fi = 0; fi < foreign.size(); ++fi) a.request_counts[foreign[fi]] = v[fi];
            actions_.push_back(std::move(a));
        }
    });

    // Canonical arm order: own items, then (agent, count) ascending.
    for (int f = 0; f < own_size_; ++f) {
        Arm a;
        a.own = true;
        a.item = f;
        arms_.push_back(a);
    }
    for (AgentId j : foreign) {
        for (int n = 1; n <= slots_; ++n) {
            Arm a;
            a.own = false;
            a.agent = j;
            a.count = n;
            arms_.push_back(a);
        }
    }

    own_only_mask_.resize(actions_.size());
    action_arms_.resize(actions_.size());
    for (ActionId k = 0; k < static_cast<ActionId>(actions_.size()); ++k) {
        const Action& a = actions_[k];
        const bool pure = a.own_only();
        own_only_mask_[k] = pure;
        (pure ? own_only_ : cooperative_).push_back(k);
        for (int f : a.own_items) action_arms_[k].push_back(f);
        for (AgentId j = 0; j < agent_count_; ++j) {
            if (a.request_counts[j] > 0) {
                Arm want;
                want.own = false;
                want.agent = j;
                want.count = a.request_counts[j];
                action_arms_[k].push_back(arm_id(want));
            }
        }
        std::vector<int> key(a.request_counts);
        key[owner_] = static_cast<int>(a.own_items.size());
        key.erase(key.begin() + owner_);
        responder_sets_[key].push_back(k);
    }
}

std::vector<AgentId> ActionSpace::called_agents(ActionId k) const {
    std::vector<AgentId> out;
    const Action& a = actions_.at(k);
    for (AgentId j = 0; j < agent_count_; ++j)
        if (a.request_counts[j] > 0) out.push_back(j);
    return out;
}

std::vector<int> ActionSpace::recommendation_vector(ActionId k) const {
    const Action& a = actions_.at(k);
    std::vector<int> m(a.request_counts);
    m[owner_] = static_cast<int>(a.own_items.size());
    return m;
}

const std::vector<ActionId>& ActionSpace::responder_set(
    const std::vector<int>& rec_vector) const {
    if (static_cast<int>(rec_vector.size()) != agent_count_)
        throw std::invalid_argument("recommendation vector length mismatch");
    std::vector<int> key(rec_vector);
    key.erase(key.begin() + owner_);
    const auto it = responder_sets_.find(key);
    if (it == responder_sets_.end())
        throw std::invalid_argument("no responder actions for this recommendation vector");
    return it->second;
}

ArmId ActionSpace::arm_id(const Arm& a) const {
    if (a.own) return a.item;
    int base = own_size_;
    for (AgentId j = 0; j < agent_count_; ++j) {
        if (j == owner_) continue;
        if (j == a.agent) return base + a.count - 1;
        base += slots_;
    }
    throw std::invalid_argument("unknown arm");
}

std::vector<std::vector<int>> item_subsets(int inventory_size, int subset_size) {
    if (subset_size < 0 || subset_size > inventory_size)
        throw std::invalid_argument("invalid subset size");
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    const std::function<void(int)> rec = [&](int next) {
        if (static_cast<int>(cur.size()) == subset_size) {
            out.push_back(cur);
            return;
        }
        for (int f = next; f < inventory_size; ++f) {
            cur.push_back(f);
            rec(f + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

}  // namespace cbmr
