#pragma once

#include "mbmp/bandwidth.hpp"
#include "mbmp/geometry.hpp"

#include <map>
#include <vector>

namespace mbmp
{
    /// A flow currently putting data on the air.
    struct ActiveFlow
    {
        FlowId id = 0;
        std::vector<NodeId> transmitters; // route minus destination
        double w = 0.0;                   // channel bandwidth per transmitter, bits/s
    };

    struct SensedLoad
    {
        FlowId flow = 0;
        NodeId transmitter = 0;
        double w = 0.0;
    };

    /// Loads each node senses within `radius` of itself.
    struct ChannelLoadMap
    {
        std::vector<std::vector<SensedLoad>> per_node;

        double offered(NodeId n) const;
        double utilization(NodeId n, double capacity) const { return offered(n) / capacity; }
    };

    ChannelLoadMap build_load_map(const Topology &topo, const std::vector<ActiveFlow> &flows, double radius);

    struct FluidState
    {
        std::map<FlowId, double> factor;  // achieved / offered, in (0, 1]
        std::vector<double> achieved_cs;  // achieved load sensed within cs_range, bits/s
        std::vector<double> achieved_ncs; // achieved load sensed within ncs_range, bits/s
        std::map<FlowId, std::vector<double>> hop_utilization; // per transmitter, worst sensing node

        double factor_of(FlowId f) const;
        /// Ground-truth local available bandwidth: capacity minus sensed achieved load, floored at 0.
        double local_available(NodeId n, double capacity) const;
    };

    /// Fluid airtime sharing. A flow is throttled at its own transmitters: each
    /// transmitter t with sensed achieved load L_t above capacity scales the flow by
    /// capacity / L_t, and L_t is evaluated on achieved (already throttled) rates.
    /// The coupled system is solved as a damped fixed point.
    FluidState apply_fluid_contention(const Topology &topo, const std::vector<ActiveFlow> &flows);

    /// Queueing-style per-hop delay: base_airtime / max(eps, 1 - min(u, u_max)).
    double per_hop_delay(double base_airtime, double utilization, double u_max = 0.99);

} // namespace mbmp
