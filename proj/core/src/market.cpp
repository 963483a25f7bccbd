#include "cbmr/market.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbmr {

Settlement settle(AgentId seller, AgentId recommender, const Item& item,
                  const CommissionSchema& schema) {
    Settlement s;
    if (seller == recommender) {
        s.recommender_revenue = item.price;
        s.seller_revenue = 0.0;
        return s;
    }
    const double cut = schema.recommender_cut(recommender, seller, item.price);
    if (cut > item.price + 1e-12)
        throw std::logic_error("commission exceeds price: item should have been excluded");
    s.recommender_revenue = cut;
    s.seller_revenue = item.price - cut;
    return s;
}

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

double mean_coord(const Context& x) {
    if (x.coords.empty()) return 0.0;
    double s = 0.0;
    for (double v : x.coords) s += v;
    return s / static_cast<double>(x.coords.size());
}

}  // namespace

MarketModel::MarketModel(int agent_count, int slots, std::vector<Item> items,
                         CommissionSchema commissions, PurchaseParams purchase,
                         ContextSpec contexts, std::vector<ArrivalSpec> arrivals, double alpha,
                         std::optional<int> f_max_override)
    : agent_count_(agent_count),
      slots_(slots),
      items_(std::move(items)),
      commissions_(std::move(commissions)),
      purchase_(std::move(purchase)),
      contexts_(contexts),
      arrivals_(std::move(arrivals)),
      alpha_(alpha) {
    if (agent_count_ < 1) throw ConfigError("at least one agent required");
    if (slots_ < 1) throw ConfigError("slot count must be positive");
    if (alpha_ <= 0.0) throw ConfigError("alpha must be positive");
    if (static_cast<int>(arrivals_.size()) != agent_count_)
        throw ConfigError("one arrival spec per agent required");

    inventories_.resize(agent_count_);
    for (size_t f = 0; f < items_.size(); ++f) {
        const Item& it = items_[f];
        if (it.id != static_cast<ItemId>(f)) throw ConfigError("item ids must be dense 0..F-1");
        if (it.owner < 0 || it.owner >= agent_count_) throw ConfigError("item owner out of range");
        if (it.price <= 0.0) throw ConfigError("item prices must be positive");
        inventories_[it.owner].push_back(it.id);
        max_price_ = std::max(max_price_, it.price);
    }
    int max_inv = 0;
    for (const auto& inv : inventories_) {
        if (static_cast<int>(inv.size()) < slots_)
            throw ConfigError("every inventory must hold at least N items");
        max_inv = std::max(max_inv, static_cast<int>(inv.size()));
    }
    f_max_ = f_max_override.value_or(max_inv);
    if (f_max_ < max_inv) throw ConfigError("f_max below the largest inventory");

    if (static_cast<int>(commissions_.rate.size()) != agent_count_)
        throw ConfigError("commission matrix must be MxM");
    for (const auto& row : commissions_.rate) {
        if (static_cast<int>(row.size()) != agent_count_)
            throw ConfigError("commission matrix must be MxM");
        for (double c : row) {
            if (c < 0.0) throw ConfigError("commissions must be nonnegative");
            if (commissions_.mode == CommissionMode::kProportional && c >= 1.0)
                throw ConfigError("proportional commission rates must lie in [0,1)");
        }
    }

    const bool copurchase_model =
        purchase_.variant == PurchaseVariant::kGroupDependentCoPurchase ||
        purchase_.variant == PurchaseVariant::kIndependentCoPurchase;
    if (copurchase_model) {
        if (!contexts_.discrete) throw ConfigError("co-purchase models use discrete contexts");
        if (purchase_.variant == PurchaseVariant::kGroupDependentCoPurchase &&
            purchase_.a * slots_ >= 1.0)
            throw ConfigError("companion slope a must satisfy a < 1/N");
        companion_.assign(contexts_.query_count, std::vector<bool>(items_.size(), false));
        for (const auto& [query, companions] : purchase_.copurchase) {
            if (query < 0 || query >= contexts_.query_count)
                throw ConfigError("co-purchase map references unknown query");
            for (ItemId f : companions) {
                if (f < 0 || f >= static_cast<ItemId>(items_.size()))
                    throw ConfigError("co-purchase map references unknown item");
                companion_[query][f] = true;
            }
        }
    } else {
        if (static_cast<int>(purchase_.affine.size()) != static_cast<int>(items_.size()))
            throw ConfigError("affine model needs one parameter row per item");
    }

    // Fixed-mode cross-recommendation candidates: the owner never offers an
    // item whose price is below the commission owed to the recommender.
    eligible_.assign(agent_count_,
                     std::vector<std::vector<ItemId>>(agent_count_, std::vector<ItemId>()));
    for (AgentId owner = 0; owner < agent_count_; ++owner) {
        for (AgentId rec = 0; rec < agent_count_; ++rec) {
            if (owner == rec) {
                eligible_[owner][rec] = inventories_[owner];
                continue;
            }
            for (ItemId f : inventories_[owner]) {
                const double cut = commissions_.recommender_cut(rec, owner, items_[f].price);
                if (cut <= items_[f].price + 1e-12) eligible_[owner][rec].push_back(f);
            }
        }
    }
}

const std::vector<ItemId>& MarketModel::eligible_items(AgentId owner, AgentId recommender) const {
    return eligible_.at(owner).at(recommender);
}

bool MarketModel::group_dependent() const {
    return purchase_.variant == PurchaseVariant::kGroupDependentCoPurchase ||
           purchase_.variant == PurchaseVariant::kGroupDependentAffine;
}

double MarketModel::true_q(ItemId f, const Context& x, std::span<const ItemId> rec_set) const {
    bool member = false;
    for (ItemId g : rec_set) member = member || (g == f);
    if (!member) throw std::logic_error("true_q queried for an item outside the recommended set");

    switch (purchase_.variant) {
        case PurchaseVariant::kIndependentCoPurchase: {
            if (!x.is_discrete()) throw std::domain_error("co-purchase model expects a query");
            return companion_[x.query][f] ? purchase_.g_c : purchase_.g_nc;
        }
        case PurchaseVariant::kGroupDependentCoPurchase: {
            if (!x.is_discrete()) throw std::domain_error("co-purchase model expects a query");
            if (!companion_[x.query][f]) return purchase_.b;
            // Companions interact within their owner's group only: the
            // probability falls with the number of same-group companions
            // recommended together (including f itself).
            const AgentId group = items_[f].owner;
            int n = 0;
            for (ItemId g : rec_set)
                if (items_[g].owner == group && companion_[x.query][g]) ++n;
            return clamp01(1.0 - purchase_.a * static_cast<double>(n));
        }
        case PurchaseVariant::kIndependentAffine: {
            const AffineItemParams& p = purchase_.affine[f];
            return clamp01(p.u + p.v * mean_coord(x));
        }
        case PurchaseVariant::kGroupDependentAffine: {
            const AffineItemParams& p = purchase_.affine[f];
            const AgentId group = items_[f].owner;
            int g_own = 0;
            for (ItemId g : rec_set)
                if (items_[g].owner == group) ++g_own;
            const double base = clamp01(p.u + p.v * mean_coord(x));
            return clamp01(base + p.gamma * static_cast<double>(g_own - 1) +
                           p.delta * static_cast<double>(static_cast<int>(rec_set.size()) - g_own));
        }
    }
    return 0.0;
}

std::vector<ItemId> MarketModel::sample_purchases(const Context& x,
                                                  std::span<const ItemId> rec_set,
                                                  Rng& rng) const {
    std::vector<ItemId> bought;
    for (ItemId f : rec_set) {
        if (rng.bernoulli(true_q(f, x, rec_set))) bought.push_back(f);
    }
    return bought;
}

Context MarketModel::draw_context(AgentId agent, Rng& rng) const {
    const ArrivalSpec& spec = arrivals_.at(agent);
    switch (spec.kind) {
        case ArrivalSpec::kConstantQuery:
            return Context::make_query(spec.query);
        case ArrivalSpec::kUniformQuery:
            return Context::make_query(rng.uniform_int(contexts_.query_count));
        case ArrivalSpec::kUniformBox: {
            std::vector<double> p(contexts_.dimension);
            for (double& v : p) v = rng.next_double();
            return Context::make_point(std::move(p));
        }
    }
    throw std::logic_error("unreachable arrival kind");
}

}  // namespace cbmr
