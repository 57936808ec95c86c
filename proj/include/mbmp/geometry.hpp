#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mbmp
{
    using NodeId = std::uint32_t;

    struct Position
    {
        double x = 0.0;
        double y = 0.0;

        bool operator==(const Position &) const = default;
    };

    double distance(const Position &a, const Position &b) noexcept;

    struct Arena
    {
        double width = 1000.0;
        double height = 1000.0;

        bool contains(const Position &p) const noexcept;
        Position clamp(const Position &p) const noexcept;
        double area() const noexcept { return width * height; }
        void validate() const;

        bool operator==(const Arena &) const = default;
    };

    struct RadioConfig
    {
        double tx_range = 250.0;
        double cs_range = 550.0;
        // Neighbor-carrier-sensing radius; 2 x cs_range covers every c-neighbor's own sensing disc.
        double ncs_range = 1100.0;
        double channel_capacity = 2.0e6; // bits/s

        void validate() const;
        bool operator==(const RadioConfig &) const = default;
    };

    enum class NeighborClass
    {
        Disconnected,
        TxNeighbor,
        CsNeighbor,
        NcsNeighbor,
    };

    const char *to_string(NeighborClass c) noexcept;

    struct NodeInfo
    {
        NodeId id = 0;
        std::string name;
        Position pos;

        bool operator==(const NodeInfo &) const = default;
    };

    class Topology
    {
    public:
        Topology() = default;
        Topology(std::vector<NodeInfo> nodes, RadioConfig radio, Arena arena);

        std::size_t size() const noexcept { return nodes_.size(); }
        const std::vector<NodeInfo> &nodes() const noexcept { return nodes_; }
        const RadioConfig &radio() const noexcept { return radio_; }
        const Arena &arena() const noexcept { return arena_; }

        const Position &position(NodeId id) const;
        void set_position(NodeId id, Position p);
        const std::string &name(NodeId id) const;
        bool contains(NodeId id) const noexcept { return id < nodes_.size(); }

        double distance(NodeId a, NodeId b) const;

        /// Ring of `b` as seen from `a`. A distance exactly on a boundary falls into the inner ring.
        NeighborClass classify(NodeId a, NodeId b) const;

        /// Ground-truth c-neighbors of `a`: every other node within cs_range.
        std::vector<NodeId> cneighbors(NodeId a) const;

        /// Nodes other than `a` within `radius` of `a`, ascending id.
        std::vector<NodeId> within(NodeId a, double radius) const;

        bool operator==(const Topology &) const = default;

    private:
        void check(NodeId id) const;

        std::vector<NodeInfo> nodes_;
        RadioConfig radio_;
        Arena arena_;
    };

    struct MobilityConfig
    {
        bool enabled = false;
        double min_speed = 0.0; // m/s
        double max_speed = 5.0; // m/s
        double pause = 20.0;    // s
        double tick = 0.1;      // s

        void validate() const;
        bool operator==(const MobilityConfig &) const = default;
    };

    struct WaypointState
    {
        Position waypoint;
        double speed = 0.0;
        double pause_remaining = 0.0;

        bool operator==(const WaypointState &) const = default;
    };

    /// Random-waypoint mobility over a Topology. One instance per simulation.
    class RandomWaypoint
    {
    public:
        RandomWaypoint(MobilityConfig cfg, std::vector<WaypointState> states);

        /// Draws an initial waypoint and speed for every node.
        static RandomWaypoint initial(const Topology &topo, MobilityConfig cfg, std::mt19937_64 &rng);

        void step(Topology &topo, double dt, std::mt19937_64 &rng);

        const std::vector<WaypointState> &states() const noexcept { return states_; }

    private:
        void redraw(WaypointState &s, const Arena &arena, std::mt19937_64 &rng) const;

        MobilityConfig cfg_;
        std::vector<WaypointState> states_;
    };

} // namespace mbmp
