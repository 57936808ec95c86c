#include "mbmp/contention.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace mbmp
{
    bool RouteRecord::contains(NodeId n) const noexcept
    {
        return index_of(n) >= 0;
    }

    int RouteRecord::index_of(NodeId n) const noexcept
    {
        const auto it = std::find(hops.begin(), hops.end(), n);
        return it == hops.end() ? -1 : static_cast<int>(it - hops.begin());
    }

    bool RouteRecord::loop_free() const
    {
        std::set<NodeId> seen(hops.begin(), hops.end());
        return seen.size() == hops.size();
    }

    std::vector<NodeId> RouteRecord::transmitters() const
    {
        if (!complete || hops.empty())
            return hops;
        return {hops.begin(), hops.end() - 1};
    }

    void CNeighborSet::learn(NodeId n, int hops, double now)
    {
        if (n == owner_)
            return;
        if (hops < 1)
            throw std::invalid_argument("c-neighbor hop estimate must be >= 1");
        auto [it, inserted] = entries_.try_emplace(n, CNeighborEntry{hops, now});
        if (!inserted)
        {
            it->second.hops = std::min(it->second.hops, hops);
            it->second.last_updated = std::max(it->second.last_updated, now);
        }
    }

    bool CNeighborSet::knows(NodeId n, int max_hops) const
    {
        const auto it = entries_.find(n);
        return it != entries_.end() && it->second.hops <= max_hops;
    }

    int CNeighborSet::hops_to(NodeId n) const
    {
        const auto it = entries_.find(n);
        return it == entries_.end() ? 0 : it->second.hops;
    }

    void CNeighborSet::expire(double now, double ttl)
    {
        if (!(ttl > 0.0))
            throw std::invalid_argument("expire: ttl must be positive");
        std::erase_if(entries_, [&](const auto &kv) { return kv.second.last_updated < now - ttl; });
    }

    int contention_count(const RouteRecord &route, NodeId q, const CNeighborSet &s, int k_cs)
    {
        if (route.hops.empty())
            throw std::invalid_argument("contention_count: empty route");
        if (s.owner() != q)
            throw std::invalid_argument("contention_count: c-neighbor set owner mismatch");
        int count = 0;
        bool q_transmits = false;
        for (NodeId t : route.transmitters())
        {
            if (t == q)
                q_transmits = true;
            else if (s.knows(t, k_cs))
                ++count;
        }
        return count + (q_transmits ? 1 : 0);
    }

    double consumed_bandwidth(const RouteRecord &route, NodeId q, const CNeighborSet &s, double w, int k_cs)
    {
        if (w < 0.0)
            throw std::invalid_argument("consumed_bandwidth: negative flow bandwidth");
        return contention_count(route, q, s, k_cs) * w;
    }

    void learn_from_hello(CNeighborSet &s, const HelloMessage &hello, double now)
    {
        s.learn(hello.initiator, 1, now);
        for (const auto &[node, k] : hello.k_hop_table)
            s.learn(node, k + 1, now);
    }

    void learn_passively(CNeighborSet &s, NodeId sender, const RouteRecord &source_route, double now)
    {
        s.learn(sender, 1, now);
        const int at = source_route.index_of(sender);
        if (at < 0)
            return;
        for (int i = 0; i < static_cast<int>(source_route.hops.size()); ++i)
        {
            if (i != at)
                s.learn(source_route.hops[i], 1 + std::abs(i - at), now);
        }
    }

} // namespace mbmp
