#pragma once

#include "mbmp/geometry.hpp"

#include <random>
#include <string>
#include <vector>

namespace mbmp::test
{
    inline Topology make_topology(const std::vector<Position> &pts, RadioConfig radio = {}, Arena arena = {})
    {
        std::vector<NodeInfo> nodes;
        for (std::size_t i = 0; i < pts.size(); ++i)
            nodes.push_back(NodeInfo{static_cast<NodeId>(i), "n" + std::to_string(i), pts[i]});
        return Topology(std::move(nodes), radio, arena);
    }

    inline std::vector<Position> random_points(std::size_t n, const Arena &arena, std::mt19937_64 &rng)
    {
        std::uniform_real_distribution<double> ux(0.0, arena.width), uy(0.0, arena.height);
        std::vector<Position> pts;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double x = ux(rng);
            pts.push_back({x, uy(rng)});
        }
        return pts;
    }

    // B, A, C, D, E, F on one line, 200 m apart. Ids follow that order.
    inline std::vector<Position> fig1_line()
    {
        return {{0, 50}, {200, 50}, {400, 50}, {600, 50}, {800, 50}, {1000, 50}};
    }

} // namespace mbmp::test
