#pragma once

#include "mbmp/geometry.hpp"

#include <limits>
#include <map>
#include <vector>

namespace mbmp
{
    /// Source route carried by control and data messages. A partial route is the
    /// hop sequence accumulated by a route request; a full route ends at the destination.
    struct RouteRecord
    {
        std::vector<NodeId> hops;
        bool complete = false;

        bool contains(NodeId n) const noexcept;
        /// Index of `n` in hops, or -1.
        int index_of(NodeId n) const noexcept;
        /// True when no node id repeats.
        bool loop_free() const;
        /// Nodes that transmit the flow's data: every hop except the destination of a full route.
        std::vector<NodeId> transmitters() const;

        bool operator==(const RouteRecord &) const = default;
    };

    struct CNeighborEntry
    {
        int hops = 0;
        double last_updated = 0.0;

        bool operator==(const CNeighborEntry &) const = default;
    };

    /// A node's learned view of its contending neighbors.
    class CNeighborSet
    {
    public:
        explicit CNeighborSet(NodeId owner = 0) : owner_(owner) {}

        NodeId owner() const noexcept { return owner_; }
        const std::map<NodeId, CNeighborEntry> &entries() const noexcept { return entries_; }

        /// Min-merge insert; refreshes the timestamp. Ignores the owner itself.
        void learn(NodeId n, int hops, double now);
        bool knows(NodeId n, int max_hops = std::numeric_limits<int>::max()) const;
        int hops_to(NodeId n) const; // 0 when unknown

        /// Drops entries not refreshed within `ttl` seconds of `now`.
        void expire(double now, double ttl);

        bool operator==(const CNeighborSet &) const = default;

    private:
        NodeId owner_;
        std::map<NodeId, CNeighborEntry> entries_;
    };

    /// Number of the route's transmitting nodes that contend at `q`, counting `q`
    /// itself when it transmits. Only entries within `k_cs` hops participate.
    int contention_count(const RouteRecord &route, NodeId q, const CNeighborSet &s, int k_cs = 2);

    /// Bandwidth a flow of channel bandwidth `w` consumes at `q`.
    double consumed_bandwidth(const RouteRecord &route, NodeId q, const CNeighborSet &s, double w, int k_cs = 2);

    struct HelloMessage
    {
        NodeId initiator = 0;
        std::map<NodeId, int> k_hop_table;
    };

    void learn_from_hello(CNeighborSet &s, const HelloMessage &hello, double now);

    /// Learning from an overheard source-routed message sent by `sender`.
    void learn_passively(CNeighborSet &s, NodeId sender, const RouteRecord &source_route, double now);

} // namespace mbmp
