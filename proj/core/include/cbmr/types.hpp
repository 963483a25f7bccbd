#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbmr {

using AgentId = int;
using ItemId = int;    // global item id, unique across all inventories
using ActionId = int;  // index into an agent's canonical action list
using ArmId = int;     // index into an agent's canonical arm list
using CellId = int;    // partition cell id, 1-based
using Time = long long;

// A user context: either a point in [0,1]^d or a discrete search-query id.
struct Context {
    std::vector<double> coords;
    int query = -1;

    bool is_discrete() const { return query >= 0; }

    static Context make_query(int q) {
        Context c;
        c.query = q;
        return c;
    }
    static Context make_point(std::vector<double> p) {
        Context c;
        c.coords = std::move(p);
        return c;
    }
};

enum class Phase { kTrain, kExplore, kExploit };

inline const char* phase_name(Phase p) {
    switch (p) {
        case Phase::kTrain: return "train";
        case Phase::kExplore: return "explore";
        default: return "exploit";
    }
}

// Protocol violations between agents (e.g. a responder returning a
// wrong-sized item set) abort the replication.
class ProtocolError : public std::runtime_error {
   public:
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
   public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Running mean stored as (count, mean); no sample list is kept.
struct MeanAcc {
    long long count = 0;
    double mean = 0.0;

    void add(double x) {
        mean = (static_cast<double>(count) * mean + x) / static_cast<double>(count + 1);
        ++count;
    }
};

}  // namespace cbmr
