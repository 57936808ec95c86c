#include "mbmp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mbmp
{
    double distance(const Position &a, const Position &b) noexcept
    {
        return std::hypot(a.x - b.x, a.y - b.y);
    }

    bool Arena::contains(const Position &p) const noexcept
    {
        return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0.0 && p.x <= width && p.y >= 0.0 &&
               p.y <= height;
    }

    void Arena::validate() const
    {
        if (!(width > 0.0 && height > 0.0))
            throw std::invalid_argument("arena: width and height must be positive");
    }

    Position Arena::clamp(const Position &p) const noexcept
    {
        return {std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)};
    }

    void RadioConfig::validate() const
    {
        if (!(tx_range > 0.0 && tx_range <= cs_range && cs_range <= ncs_range))
            throw std::invalid_argument("radio: require 0 < tx_range <= cs_range <= ncs_range");
        if (!(channel_capacity > 0.0))
            throw std::invalid_argument("radio: channel_capacity must be positive");
    }

    const char *to_string(NeighborClass c) noexcept
    {
        switch (c)
        {
        case NeighborClass::TxNeighbor:
            return "tx";
        case NeighborClass::CsNeighbor:
            return "cs";
        case NeighborClass::NcsNeighbor:
            return "ncs";
        case NeighborClass::Disconnected:
            break;
        }
        return "disconnected";
    }

    Topology::Topology(std::vector<NodeInfo> nodes, RadioConfig radio, Arena arena)
        : nodes_(std::move(nodes)), radio_(radio), arena_(arena)
    {
        radio_.validate();
        for (std::size_t i = 0; i < nodes_.size(); ++i)
        {
            if (nodes_[i].id != i)
                throw std::invalid_argument("topology: node ids must be dense 0..N-1 in order");
            if (!arena_.contains(nodes_[i].pos))
                throw std::invalid_argument("topology: node " + std::to_string(i) + " outside arena");
        }
    }

    void Topology::check(NodeId id) const
    {
        if (!contains(id))
            throw std::invalid_argument("unknown node id " + std::to_string(id));
    }

    const Position &Topology::position(NodeId id) const
    {
        check(id);
        return nodes_[id].pos;
    }

    void Topology::set_position(NodeId id, Position p)
    {
        check(id);
        nodes_[id].pos = arena_.clamp(p);
    }

    const std::string &Topology::name(NodeId id) const
    {
        check(id);
        return nodes_[id].name;
    }

    double Topology::distance(NodeId a, NodeId b) const
    {
        check(a);
        check(b);
        return mbmp::distance(nodes_[a].pos, nodes_[b].pos);
    }

    NeighborClass Topology::classify(NodeId a, NodeId b) const
    {
        if (a == b)
            throw std::invalid_argument("classify: a == b");
        const double d = distance(a, b);
        if (d <= radio_.tx_range)
            return NeighborClass::TxNeighbor;
        if (d <= radio_.cs_range)
            return NeighborClass::CsNeighbor;
        if (d <= radio_.ncs_range)
            return NeighborClass::NcsNeighbor;
        return NeighborClass::Disconnected;
    }

    std::vector<NodeId> Topology::cneighbors(NodeId a) const
    {
        return within(a, radio_.cs_range);
    }

    std::vector<NodeId> Topology::within(NodeId a, double radius) const
    {
        check(a);
        std::vector<NodeId> out;
        const Position &pa = nodes_[a].pos;
        for (const auto &n : nodes_)
        {
            if (n.id != a && mbmp::distance(pa, n.pos) <= radius)
                out.push_back(n.id);
        }
        return out;
    }

    void MobilityConfig::validate() const
    {
        if (!(min_speed >= 0.0 && min_speed <= max_speed))
            throw std::invalid_argument("mobility: require 0 <= min_speed <= max_speed");
        if (!(pause >= 0.0))
            throw std::invalid_argument("mobility: pause must be >= 0");
        if (!(tick > 0.0))
            throw std::invalid_argument("mobility: tick must be > 0");
    }

    RandomWaypoint::RandomWaypoint(MobilityConfig cfg, std::vector<WaypointState> states)
        : cfg_(cfg), states_(std::move(states))
    {
        cfg_.validate();
    }

    RandomWaypoint RandomWaypoint::initial(const Topology &topo, MobilityConfig cfg, std::mt19937_64 &rng)
    {
        RandomWaypoint rw(cfg, std::vector<WaypointState>(topo.size()));
        for (auto &s : rw.states_)
            rw.redraw(s, topo.arena(), rng);
        return rw;
    }

    void RandomWaypoint::redraw(WaypointState &s, const Arena &arena, std::mt19937_64 &rng) const
    {
        std::uniform_real_distribution<double> ux(0.0, arena.width);
        std::uniform_real_distribution<double> uy(0.0, arena.height);
        s.waypoint = {ux(rng), uy(rng)};
        if (cfg_.max_speed > cfg_.min_speed)
            s.speed = std::uniform_real_distribution<double>(cfg_.min_speed, cfg_.max_speed)(rng);
        else
            s.speed = cfg_.max_speed;
        s.pause_remaining = 0.0;
    }

    void RandomWaypoint::step(Topology &topo, double dt, std::mt19937_64 &rng)
    {
        if (!(dt > 0.0))
            throw std::invalid_argument("step_mobility: dt must be > 0");
        if (states_.size() != topo.size())
            throw std::invalid_argument("step_mobility: state/topology size mismatch");

        for (NodeId id = 0; id < topo.size(); ++id)
        {
            WaypointState &s = states_[id];
            Position pos = topo.position(id);
            double remaining = dt;
            // A node may finish a leg, pause and start a new leg within one tick.
            for (int guard = 0; remaining > 0.0 && guard < 64; ++guard)
            {
                if (s.pause_remaining > 0.0)
                {
                    const double used = std::min(s.pause_remaining, remaining);
                    s.pause_remaining -= used;
                    remaining -= used;
                    if (s.pause_remaining <= 0.0)
                        redraw(s, topo.arena(), rng);
                    continue;
                }
                if (s.speed <= 0.0)
                    break;
                const double to_go = distance(pos, s.waypoint);
                const double reach = s.speed * remaining;
                if (reach < to_go)
                {
                    const double k = reach / to_go;
                    pos.x += (s.waypoint.x - pos.x) * k;
                    pos.y += (s.waypoint.y - pos.y) * k;
                    remaining = 0.0;
                }
                else
                {
                    pos = s.waypoint;
                    remaining -= to_go / s.speed;
                    if (cfg_.pause > 0.0)
                        s.pause_remaining = cfg_.pause;
                    else
                        redraw(s, topo.arena(), rng);
                }
            }
            topo.set_position(id, pos);
        }
    }

} // namespace mbmp
