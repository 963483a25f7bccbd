#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cbmr/rng.hpp"
#include "cbmr/types.hpp"

namespace cbmr {

struct Item {
    ItemId id = -1;
    AgentId owner = -1;
    double price = 1.0;
};

enum class CommissionMode { kFixed, kProportional };

// Commission c[i][j]: what recommender i receives when it sells an item
// owned by j. Fixed mode pays the raw entry; proportional mode treats the
// entry as a rate on the sold item's price.
struct CommissionSchema {
    CommissionMode mode = CommissionMode::kFixed;
    std::vector<std::vector<double>> rate;

    double recommender_cut(AgentId recommender, AgentId owner, double price) const {
        if (recommender == owner) return 0.0;
        const double c = rate[recommender][owner];
        return mode == CommissionMode::kFixed ? c : c * price;
    }
};

struct Settlement {
    double recommender_revenue = 0.0;
    double seller_revenue = 0.0;
};

// Split of one sale between the recommending agent and the item owner.
// Own-item sales pay the full price to the owner. recommender_revenue +
// seller_revenue equals the price on every call.
Settlement settle(AgentId seller, AgentId recommender, const Item& item,
                  const CommissionSchema& schema);

// Ground-truth purchase probability models. Only the market itself (oracle
// and purchase sampler) evaluates these; learners see purchase outcomes.
enum class PurchaseVariant {
    kGroupDependentCoPurchase,  // q = 1 - a*n for companions, b otherwise
    kIndependentCoPurchase,     // q = g_c for companions, g_nc otherwise
    kGroupDependentAffine,      // synthetic continuous-context model
    kIndependentAffine,
};

// Per-item coefficients for the affine synthetic models:
//   base(x)  = clamp01(u + v * mean(x))
//   group-dependent: q = clamp01(base(x) + gamma*(g_own-1) + delta*(N-g_own))
// where g_own is the number of recommended items from the item's own group.
struct AffineItemParams {
    double u = 0.0;
    double v = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
};

struct PurchaseParams {
    PurchaseVariant variant = PurchaseVariant::kIndependentCoPurchase;
    // co-purchase scenario
    double a = 0.5;    // group-dependent companion slope, requires a < 1/N
    double b = 0.01;   // group-dependent non-companion probability
    double g_c = 0.1;  // independent companion probability
    double g_nc = 0.01;
    std::map<int, std::vector<ItemId>> copurchase;  // query id -> companion items
    // affine scenario
    std::vector<AffineItemParams> affine;
    // declared smoothness constants (bound evaluator, property tests)
    double holder_L = 1.0;
    double holder_alpha = 1.0;
};

// Per-agent arrival process; one user per agent per slot.
struct ArrivalSpec {
    enum Kind { kConstantQuery, kUniformQuery, kUniformBox } kind = kUniformQuery;
    int query = 0;  // kConstantQuery
};

struct ContextSpec {
    bool discrete = true;
    int query_count = 0;
    int dimension = 1;
};

// The environment: items, prices, inventories, commissions and the true
// purchase model. Holds everything the learners must not see.
class MarketModel {
   public:
    MarketModel(int agent_count, int slots, std::vector<Item> items,
                CommissionSchema commissions, PurchaseParams purchase,
                ContextSpec contexts, std::vector<ArrivalSpec> arrivals,
                double alpha, std::optional<int> f_max_override = std::nullopt);

    int agent_count() const { return agent_count_; }
    int slots() const { return slots_; }
    double alpha() const { return alpha_; }
    int f_max() const { return f_max_; }

    const std::vector<Item>& items() const { return items_; }
    const Item& item(ItemId f) const { return items_.at(f); }
    const std::vector<ItemId>& inventory(AgentId i) const { return inventories_.at(i); }
    const CommissionSchema& commissions() const { return commissions_; }
    const PurchaseParams& purchase() const { return purchase_; }
    const ContextSpec& contexts() const { return contexts_; }
    const std::vector<ArrivalSpec>& arrivals() const { return arrivals_; }
    double max_price() const { return max_price_; }

    // Items of `owner` whose price covers the fixed commission owed to
    // `recommender`; cross-recommendation candidates are restricted to these.
    const std::vector<ItemId>& eligible_items(AgentId owner, AgentId recommender) const;

    // True purchase probability of item f within the recommended set.
    // Requires f to be a member of rec_set.
    double true_q(ItemId f, const Context& x, std::span<const ItemId> rec_set) const;

    bool group_dependent() const;

    // Independent Bernoulli draw per recommended item at its true_q.
    std::vector<ItemId> sample_purchases(const Context& x, std::span<const ItemId> rec_set,
                                         Rng& rng) const;

    Context draw_context(AgentId agent, Rng& rng) const;

   private:
    int agent_count_;
    int slots_;
    std::vector<Item> items_;
    std::vector<std::vector<ItemId>> inventories_;
    CommissionSchema commissions_;
    PurchaseParams purchase_;
    ContextSpec contexts_;
    std::vector<ArrivalSpec> arrivals_;
    double alpha_;
    int f_max_ = 0;
    double max_price_ = 0.0;
    // [owner][recommender] -> eligible item list
    std::vector<std::vector<std::vector<ItemId>>> eligible_;
    std::vector<std::vector<bool>> companion_;  // [query][item] for co-purchase models
};

}  // namespace cbmr
