#include "cbmr/config_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cbmr {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw ConfigError(origin + ": " + what);
}

template <typename T>
T need(const json& doc, const std::string& key, const std::string& origin) {
    if (!doc.contains(key)) fail(origin, "missing key '" + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(origin, "bad value for key '" + key + "': " + e.what());
    }
}

template <typename T>
T opt(const json& doc, const std::string& key, T fallback) {
    if (!doc.contains(key)) return fallback;
    return doc.at(key).get<T>();
}

json parse_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(origin, e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

LoadedMarket parse_market(const std::string& text, const std::string& origin) {
    const json doc = parse_text(text, origin);
    const std::string schema = need<std::string>(doc, "schema", origin);
    if (schema != "cbmr-market/1") fail(origin, "unsupported schema '" + schema + "'");

    const int agents = need<int>(doc, "agents", origin);
    const int slots = need<int>(doc, "slots", origin);
    const double alpha = need<double>(doc, "alpha", origin);

    std::vector<Item> items;
    for (const json& row : need<json>(doc, "items", origin)) {
        Item it;
        it.id = need<int>(row, "id", origin);
        it.owner = need<int>(row, "owner", origin);
        it.price = opt<double>(row, "price", 1.0);
        items.push_back(it);
    }

    const json& cj = need<json>(doc, "commissions", origin);
    CommissionSchema schema_c;
    const std::string mode = opt<std::string>(cj, "mode", "fixed");
    if (mode == "fixed")
        schema_c.mode = CommissionMode::kFixed;
    else if (mode == "proportional")
        schema_c.mode = CommissionMode::kProportional;
    else
        fail(origin, "commission mode must be fixed or proportional");
    schema_c.rate = need<std::vector<std::vector<double>>>(cj, "matrix", origin);

    const json& pj = need<json>(doc, "purchase_model", origin);
    PurchaseParams purchase;
    const std::string variant = need<std::string>(pj, "variant", origin);
    if (variant == "group_dependent_copurchase")
        purchase.variant = PurchaseVariant::kGroupDependentCoPurchase;
    else if (variant == "independent_copurchase")
        purchase.variant = PurchaseVariant::kIndependentCoPurchase;
    else if (variant == "group_dependent_affine")
        purchase.variant = PurchaseVariant::kGroupDependentAffine;
    else if (variant == "independent_affine")
        purchase.variant = PurchaseVariant::kIndependentAffine;
    else
        fail(origin, "unknown purchase model variant '" + variant + "'");
    purchase.a = opt<double>(pj, "a", purchase.a);
    purchase.b = opt<double>(pj, "b", purchase.b);
    purchase.g_c = opt<double>(pj, "g_c", purchase.g_c);
    purchase.g_nc = opt<double>(pj, "g_nc", purchase.g_nc);
    purchase.holder_L = opt<double>(pj, "holder_L", purchase.holder_L);
    purchase.holder_alpha = opt<double>(pj, "holder_alpha", purchase.holder_alpha);
    if (pj.contains("copurchase")) {
        for (const auto& [key, value] : pj.at("copurchase").items())
            purchase.copurchase[std::stoi(key)] = value.get<std::vector<int>>();
    }
    if (pj.contains("items_affine")) {
        for (const json& row : pj.at("items_affine")) {
            AffineItemParams p;
            p.u = opt<double>(row, "u", 0.0);
            p.v = opt<double>(row, "v", 0.0);
            p.gamma = opt<double>(row, "gamma", 0.0);
            p.delta = opt<double>(row, "delta", 0.0);
            purchase.affine.push_back(p);
        }
    }

    const json& ctxj = need<json>(doc, "contexts", origin);
    ContextSpec contexts;
    const std::string ctype = need<std::string>(ctxj, "type", origin);
    if (ctype == "discrete") {
        contexts.discrete = true;
        contexts.query_count = need<int>(ctxj, "queries", origin);
    } else if (ctype == "continuous") {
        contexts.discrete = false;
        contexts.dimension = need<int>(ctxj, "dimension", origin);
    } else {
        fail(origin, "context type must be discrete or continuous");
    }

    std::vector<ArrivalSpec> arrivals;
    for (const json& row : need<json>(doc, "arrivals", origin)) {
        ArrivalSpec a;
        const std::string kind = need<std::string>(row, "kind", origin);
        if (kind == "constant_query") {
            a.kind = ArrivalSpec::kConstantQuery;
            a.query = need<int>(row, "query", origin);
        } else if (kind == "uniform_query") {
            a.kind = ArrivalSpec::kUniformQuery;
        } else if (kind == "uniform_box") {
            a.kind = ArrivalSpec::kUniformBox;
        } else {
            fail(origin, "unknown arrival kind '" + kind + "'");
        }
        arrivals.push_back(a);
    }

    std::optional<int> f_max;
    if (doc.contains("f_max")) f_max = doc.at("f_max").get<int>();

    MarketModel market(agents, slots, std::move(items), std::move(schema_c), std::move(purchase),
                       contexts, std::move(arrivals), alpha, f_max);

    TopologyGraph graph = TopologyGraph::complete(agents);
    if (doc.contains("topology")) {
        std::vector<std::pair<AgentId, AgentId>> edges;
        for (const json& e : doc.at("topology").at("edges"))
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        graph = TopologyGraph(agents, std::move(edges));
    }
    graph.build_routes(market.commissions());
    return LoadedMarket{std::move(market), std::move(graph)};
}

LoadedMarket load_market(const std::string& path) {
    return parse_market(read_file(path), path);
}

std::string market_json(const MarketModel& market, const TopologyGraph& graph) {
    json doc;
    doc["schema"] = "cbmr-market/1";
    doc["agents"] = market.agent_count();
    doc["slots"] = market.slots();
    doc["alpha"] = market.alpha();
    doc["f_max"] = market.f_max();

    json items = json::array();
    for (const Item& it : market.items())
        items.push_back({{"id", it.id}, {"owner", it.owner}, {"price", it.price}});
    doc["items"] = items;

    doc["commissions"] = {
        {"mode", market.commissions().mode == CommissionMode::kFixed ? "fixed" : "proportional"},
        {"matrix", market.commissions().rate},
    };

    const PurchaseParams& p = market.purchase();
    json pj;
    switch (p.variant) {
        case PurchaseVariant::kGroupDependentCoPurchase:
            pj["variant"] = "group_dependent_copurchase";
            break;
        case PurchaseVariant::kIndependentCoPurchase:
            pj["variant"] = "independent_copurchase";
            break;
        case PurchaseVariant::kGroupDependentAffine:
            pj["variant"] = "group_dependent_affine";
            break;
        case PurchaseVariant::kIndependentAffine:
            pj["variant"] = "independent_affine";
            break;
    }
    pj["a"] = p.a;
    pj["b"] = p.b;
    pj["g_c"] = p.g_c;
    pj["g_nc"] = p.g_nc;
    pj["holder_L"] = p.holder_L;
    pj["holder_alpha"] = p.holder_alpha;
    if (!p.copurchase.empty()) {
        json cp;
        for (const auto& [query, companions] : p.copurchase)
            cp[std::to_string(query)] = companions;
        pj["copurchase"] = cp;
    }
    if (!p.affine.empty()) {
        json rows = json::array();
        for (const AffineItemParams& ap : p.affine)
            rows.push_back(
                {{"u", ap.u}, {"v", ap.v}, {"gamma", ap.gamma}, {"delta", ap.delta}});
        pj["items_affine"] = rows;
    }
    doc["purchase_model"] = pj;

    if (market.contexts().discrete)
        doc["contexts"] = {{"type", "discrete"}, {"queries", market.contexts().query_count}};
    else
        doc["contexts"] = {{"type", "continuous"}, {"dimension", market.contexts().dimension}};

    json arrivals = json::array();
    for (const ArrivalSpec& a : market.arrivals()) {
        switch (a.kind) {
            case ArrivalSpec::kConstantQuery:
                arrivals.push_back({{"kind", "constant_query"}, {"query", a.query}});
                break;
            case ArrivalSpec::kUniformQuery:
                arrivals.push_back({{"kind", "uniform_query"}});
                break;
            case ArrivalSpec::kUniformBox:
                arrivals.push_back({{"kind", "uniform_box"}});
                break;
        }
    }
    doc["arrivals"] = arrivals;

    if (!graph.is_complete()) {
        json edges = json::array();
        for (AgentId a = 0; a < graph.agent_count(); ++a)
            for (AgentId b = a + 1; b < graph.agent_count(); ++b)
                if (graph.has_edge(a, b)) edges.push_back({a, b});
        doc["topology"] = {{"edges", edges}};
    }
    return doc.dump(2);
}

void save_market(const MarketModel& market, const TopologyGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << market_json(market, graph) << "\n";
}

ExperimentConfig parse_experiment(const std::string& text, const std::string& origin) {
    const json doc = parse_text(text, origin);
    const std::string schema = need<std::string>(doc, "schema", origin);
    if (schema != "cbmr-experiment/1") fail(origin, "unsupported schema '" + schema + "'");
    ExperimentConfig config;
    if (doc.contains("policy")) config.policies = {doc.at("policy").get<std::string>()};
    if (doc.contains("policies"))
        config.policies = doc.at("policies").get<std::vector<std::string>>();
    config.horizon = opt<Time>(doc, "horizon", config.horizon);
    config.replications = opt<int>(doc, "replications", config.replications);
    config.seed = opt<std::uint64_t>(doc, "seed", config.seed);
    config.out_dir = opt<std::string>(doc, "out_dir", config.out_dir);
    config.write_traces = opt<bool>(doc, "write_traces", config.write_traces);
    config.trace_stride = opt<int>(doc, "trace_stride", config.trace_stride);
    config.epsilon = opt<double>(doc, "epsilon", config.epsilon);
    config.flags.known_inventory = opt<bool>(doc, "known_inventory", false);
    config.flags.network_base_thresholds = opt<bool>(doc, "network_base_thresholds", false);
    return config;
}

ExperimentConfig load_experiment(const std::string& path) {
    return parse_experiment(read_file(path), path);
}

}  // namespace cbmr
