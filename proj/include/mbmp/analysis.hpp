#pragma once

#include "mbmp/geometry.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace mbmp
{
    /// Node density sampled on a grid of equal cells. A uniform field is a single cell.
    struct DensityField
    {
        std::vector<double> rho; // nodes / m^2 per cell
        double cell_area = 1.0;  // m^2

        static DensityField uniform(double rho);
        double total_nodes() const;
    };

    /// Kernel estimate: at each cell center, nodes within `r` divided by pi r^2.
    /// Cell side defaults to r / 10.
    DensityField empirical_density(const std::vector<Position> &nodes, const Arena &arena, double r,
                                   double cell_side = -1.0);

    /// Expected receptions of two-hop flooding over those of one enlarged (2r) broadcast,
    /// weighted by the request rate of each cell. Throws std::domain_error on an empty field.
    double theta_analytic(const DensityField &field, double r, double request_rate = 1.0);

    /// 1/4 + pi r^2 n / (4 area), with n the node count.
    double theta_lower_bound(double node_count, double arena_area, double r);

    struct MonteCarloResult
    {
        double ratio = 0.0;
        double stderr_ = 0.0; // bootstrap
        std::uint64_t multi_hop_receptions = 0;
        std::uint64_t power_receptions = 0;
        int trials = 0;
        int isolated = 0; // requesters with no neighbor, counted as (0, 0)
    };

    /// Poisson placement at density `rho` around a requester at the origin.
    MonteCarloResult theta_monte_carlo(double rho, double r, int trials, std::mt19937_64 &rng, int bootstrap = 200);

    /// Requesters drawn uniformly from a fixed placement.
    MonteCarloResult theta_monte_carlo(const std::vector<Position> &nodes, double r, int trials,
                                       std::mt19937_64 &rng, int bootstrap = 200);

    /// Reception counts for one admission request issued by `requester`.
    struct ReceptionCount
    {
        std::uint64_t multi_hop = 0; // first ring plus every first-ring rebroadcast (requester excluded)
        std::uint64_t power = 0;     // nodes within 2r
    };
    ReceptionCount count_receptions(const std::vector<Position> &nodes, std::size_t requester, double r);

} // namespace mbmp
