#include "mbmp/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mbmp
{
    double ChannelLoadMap::offered(NodeId n) const
    {
        double sum = 0.0;
        for (const auto &l : per_node.at(n))
            sum += l.w;
        return sum;
    }

    ChannelLoadMap build_load_map(const Topology &topo, const std::vector<ActiveFlow> &flows, double radius)
    {
        ChannelLoadMap map;
        map.per_node.resize(topo.size());
        for (const auto &f : flows)
        {
            for (NodeId t : f.transmitters)
            {
                const Position &pt = topo.position(t);
                for (const auto &n : topo.nodes())
                {
                    if (distance(pt, n.pos) <= radius)
                        map.per_node[n.id].push_back({f.id, t, f.w});
                }
            }
        }
        return map;
    }

    double FluidState::factor_of(FlowId f) const
    {
        const auto it = factor.find(f);
        return it == factor.end() ? 0.0 : it->second;
    }

    double FluidState::local_available(NodeId n, double capacity) const
    {
        return std::max(0.0, capacity - achieved_cs.at(n));
    }

    namespace
    {
        struct TxRef
        {
            std::size_t flow_index;
            NodeId node;
        };
    } // namespace

    FluidState apply_fluid_contention(const Topology &topo, const std::vector<ActiveFlow> &flows)
    {
        const double cap = topo.radio().channel_capacity;
        const double cs = topo.radio().cs_range;
        const double ncs = topo.radio().ncs_range;

        std::vector<TxRef> txs;
        for (std::size_t i = 0; i < flows.size(); ++i)
            for (NodeId t : flows[i].transmitters)
                txs.push_back({i, t});

        // sensed[a] = transmissions within cs of transmission a's transmitter.
        std::vector<std::vector<std::size_t>> sensed(txs.size());
        for (std::size_t a = 0; a < txs.size(); ++a)
            for (std::size_t b = 0; b < txs.size(); ++b)
                if (topo.distance(txs[a].node, txs[b].node) <= cs)
                    sensed[a].push_back(b);

        std::vector<double> f(flows.size(), 1.0);
        auto target = [&](const std::vector<double> &cur) {
            std::vector<double> g(flows.size(), 1.0);
            for (std::size_t a = 0; a < txs.size(); ++a)
            {
                double load = 0.0;
                for (std::size_t b : sensed[a])
                    load += flows[txs[b].flow_index].w * cur[txs[b].flow_index];
                if (load > cap)
                    g[txs[a].flow_index] = std::min(g[txs[a].flow_index], cap / load);
            }
            return g;
        };

        for (int iter = 0; iter < 5000; ++iter)
        {
            const auto g = target(f);
            double delta = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i)
            {
                const double next = 0.5 * f[i] + 0.5 * g[i];
                delta = std::max(delta, std::abs(next - f[i]));
                f[i] = next;
            }
            if (delta < 1e-13)
                break;
        }

        FluidState st;
        st.achieved_cs.assign(topo.size(), 0.0);
        st.achieved_ncs.assign(topo.size(), 0.0);
        for (std::size_t i = 0; i < flows.size(); ++i)
            st.factor[flows[i].id] = std::clamp(f[i], 1e-12, 1.0);

        for (const auto &tx : txs)
        {
            const double achieved = flows[tx.flow_index].w * f[tx.flow_index];
            const Position &pt = topo.position(tx.node);
            for (const auto &n : topo.nodes())
            {
                const double d = distance(pt, n.pos);
                if (d <= cs)
                    st.achieved_cs[n.id] += achieved;
                if (d <= ncs)
                    st.achieved_ncs[n.id] += achieved;
            }
        }

        for (std::size_t i = 0; i < flows.size(); ++i)
        {
            auto &hu = st.hop_utilization[flows[i].id];
            for (NodeId t : flows[i].transmitters)
            {
                double worst = 0.0;
                const Position &pt = topo.position(t);
                for (const auto &n : topo.nodes())
                    if (distance(pt, n.pos) <= cs)
                        worst = std::max(worst, st.achieved_cs[n.id] / cap);
                hu.push_back(worst);
            }
        }
        return st;
    }

    double per_hop_delay(double base_airtime, double utilization, double u_max)
    {
        if (base_airtime < 0.0)
            throw std::invalid_argument("per_hop_delay: negative airtime");
        const double u = std::min(std::max(utilization, 0.0), u_max);
        return base_airtime / std::max(1e-9, 1.0 - u);
    }

} // namespace mbmp
