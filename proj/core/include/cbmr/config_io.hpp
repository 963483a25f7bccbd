#pragma once

#include <optional>
#include <string>
#include <utility>

#include "cbmr/market.hpp"
#include "cbmr/network.hpp"
#include "cbmr/sim.hpp"

namespace cbmr {

// Market configuration documents, schema "cbmr-market/1". The topology
// section is optional; its absence means a complete graph.
struct LoadedMarket {
    MarketModel market;
    TopologyGraph graph;
};

LoadedMarket load_market(const std::string& path);
LoadedMarket parse_market(const std::string& json_text, const std::string& origin = "<string>");
std::string market_json(const MarketModel& market, const TopologyGraph& graph);
void save_market(const MarketModel& market, const TopologyGraph& graph, const std::string& path);

// Experiment documents, schema "cbmr-experiment/1"; any field may be
// overridden from the command line.
ExperimentConfig parse_experiment(const std::string& json_text,
                                  const std::string& origin = "<string>");
ExperimentConfig load_experiment(const std::string& path);

}  // namespace cbmr
