#pragma once

#include "mbmp/bandwidth.hpp"
#include "mbmp/geometry.hpp"
#include "mbmp/protocol.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbmp
{
    /// Malformed or inconsistent scenario input. The message lists every offending key.
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct EstimatorSettings
    {
        double alpha = 0.5;
        double period = 1.0;
        int warmup_periods = 20; // idle-channel periods simulated before t = 0
        int settle_periods = 5;  // reservations are held until the estimator has absorbed the flow
        std::map<NodeId, double> background_bps; // constant external load sensed at a node

        bool operator==(const EstimatorSettings &) const = default;
    };

    struct RandomFlows
    {
        int count = 0;
        double rate_min = 10.0, rate_max = 50.0;   // packets/s
        double size_min = 100.0, size_max = 1000.0; // bytes
        double start_min = 0.0;
        double start_max = -1.0; // negative: half the duration

        bool operator==(const RandomFlows &) const = default;
    };

    struct MoveEvent
    {
        double time = 0.0;
        NodeId node = 0;
        Position pos;

        bool operator==(const MoveEvent &) const = default;
    };

    struct Scenario
    {
        Arena arena;
        RadioConfig radio;
        MacTimingConfig mac;
        EstimatorSettings estimator;
        CNeighborConfig cneighbor;
        MobilityConfig mobility;
        ProtocolConfig protocol;

        std::vector<NodeInfo> nodes; // explicit placement; empty when node_count is used
        int node_count = 0;          // random uniform placement, drawn from the seed
        std::vector<FlowSpec> flows;
        std::optional<RandomFlows> random_flows;
        std::vector<MoveEvent> events;
        std::vector<NodeId> sample_nodes;

        double duration = 200.0;
        std::uint64_t seed = 1;

        void validate() const;
        bool operator==(const Scenario &) const = default;
    };

    /// Concrete nodes and flows for one seed.
    struct Materialized
    {
        std::vector<NodeInfo> nodes;
        std::vector<FlowSpec> flows;
    };

    Materialized materialize(const Scenario &sc, std::uint64_t seed);

    Scenario scenario_from_json(const nlohmann::json &j);
    nlohmann::json scenario_to_json(const Scenario &sc);
    /// Reads and validates a scenario file. Throws ConfigError naming the path on I/O failure.
    Scenario load_scenario(const std::string &path);

    struct SweepSpec
    {
        Scenario base;
        std::vector<int> node_counts;
        int replicates = 1;
        std::vector<ProtocolVariant> variants;
        std::uint64_t base_seed = 1;

        void validate() const;
    };

    SweepSpec sweep_from_json(const nlohmann::json &j, const std::string &base_dir);
    SweepSpec load_sweep(const std::string &path);

} // namespace mbmp
