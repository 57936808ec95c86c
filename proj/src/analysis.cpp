#include "mbmp/analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mbmp
{
    DensityField DensityField::uniform(double rho)
    {
        if (rho < 0.0)
            throw std::invalid_argument("density must be >= 0");
        return DensityField{{rho}, 1.0};
    }

    double DensityField::total_nodes() const
    {
        double n = 0.0;
        for (double v : rho)
            n += v * cell_area;
        return n;
    }

    DensityField empirical_density(const std::vector<Position> &nodes, const Arena &arena, double r,
                                   double cell_side)
    {
        if (!(r > 0.0))
            throw std::invalid_argument("empirical_density: r must be positive");
        if (cell_side <= 0.0)
            cell_side = r / 10.0;
        const int nx = std::max(1, static_cast<int>(std::ceil(arena.width / cell_side)));
        const int ny = std::max(1, static_cast<int>(std::ceil(arena.height / cell_side)));
        const double dx = arena.width / nx;
        const double dy = arena.height / ny;
        const double disc = std::numbers::pi * r * r;
        DensityField f;
        f.cell_area = dx * dy;
        f.rho.reserve(static_cast<std::size_t>(nx) * ny);
        for (int i = 0; i < nx; ++i)
            for (int k = 0; k < ny; ++k)
            {
                const Position c{(i + 0.5) * dx, (k + 0.5) * dy};
                int cnt = 0;
                for (const auto &p : nodes)
                    if (distance(c, p) <= r)
                        ++cnt;
                f.rho.push_back(cnt / disc);
            }
        return f;
    }

    double theta_analytic(const DensityField &field, double r, double request_rate)
    {
        if (!(r > 0.0) || !(request_rate > 0.0))
            throw std::invalid_argument("theta_analytic: r and request rate must be positive");
        const double disc = std::numbers::pi * r * r;
        double num = 0.0;
        double den = 0.0;
        for (double rho : field.rho)
        {
            if (rho < 0.0)
                throw std::invalid_argument("theta_analytic: negative density");
            const double m = disc * rho;
            const double requests = request_rate * rho * field.cell_area;
            num += (m + m * m) * requests;
            den += 4.0 * m * requests;
        }
        if (!(den > 0.0))
            throw std::domain_error("theta_analytic: field has zero total density");
        return num / den;
    }

    double theta_lower_bound(double node_count, double arena_area, double r)
    {
        if (!(arena_area > 0.0))
            throw std::invalid_argument("theta_lower_bound: arena area must be positive");
        return 0.25 + std::numbers::pi * r * r * node_count / (4.0 * arena_area);
    }

    ReceptionCount count_receptions(const std::vector<Position> &nodes, std::size_t requester, double r)
    {
        ReceptionCount c;
        const Position &q = nodes.at(requester);
        std::vector<std::size_t> ring;
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            if (i == requester)
                continue;
            const double d = distance(q, nodes[i]);
            if (d <= r)
                ring.push_back(i);
            if (d <= 2.0 * r)
                ++c.power;
        }
        c.multi_hop = ring.size();
        for (std::size_t j : ring)
            for (std::size_t i = 0; i < nodes.size(); ++i)
                if (i != j && i != requester && distance(nodes[j], nodes[i]) <= r)
                    ++c.multi_hop;
        if (ring.empty())
            c.power = 0;
        return c;
    }

    namespace
    {
        MonteCarloResult summarize(const std::vector<ReceptionCount> &samples, std::mt19937_64 &rng, int bootstrap)
        {
            MonteCarloResult res;
            res.trials = static_cast<int>(samples.size());
            for (const auto &s : samples)
            {
                res.multi_hop_receptions += s.multi_hop;
                res.power_receptions += s.power;
                if (s.power == 0 && s.multi_hop == 0)
                    ++res.isolated;
            }
            if (res.power_receptions == 0)
                return res;
            res.ratio = static_cast<double>(res.multi_hop_receptions) / static_cast<double>(res.power_receptions);

            std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
            double sum = 0.0, sum2 = 0.0;
            int used = 0;
            for (int b = 0; b < bootstrap; ++b)
            {
                double m = 0.0, p = 0.0;
                for (std::size_t i = 0; i < samples.size(); ++i)
                {
                    const auto &s = samples[pick(rng)];
                    m += static_cast<double>(s.multi_hop);
                    p += static_cast<double>(s.power);
                }
                if (p <= 0.0)
                    continue;
                const double ratio = m / p;
                sum += ratio;
                sum2 += ratio * ratio;
                ++used;
            }
            if (used > 1)
            {
                const double mean = sum / used;
                res.stderr_ = std::sqrt(std::max(0.0, (sum2 - used * mean * mean) / (used - 1)));
            }
            return res;
        }
    } // namespace

    MonteCarloResult theta_monte_carlo(double rho, double r, int trials, std::mt19937_64 &rng, int bootstrap)
    {
        if (trials < 1)
            throw std::invalid_argument("theta_monte_carlo: trials must be >= 1");
        if (!(rho >= 0.0) || !(r > 0.0))
            throw std::invalid_argument("theta_monte_carlo: bad density or range");
        // Every counted node lies within 2r of the requester; a 4r square holds all of them.
        const double half = 2.0 * r;
        const double area = (2.0 * half) * (2.0 * half);
        std::poisson_distribution<int> count(rho * area);
        std::uniform_real_distribution<double> coord(-half, half);
        std::vector<ReceptionCount> samples;
        samples.reserve(static_cast<std::size_t>(trials));
        std::vector<Position> pts;
        for (int t = 0; t < trials; ++t)
        {
            const int n = count(rng);
            pts.assign(1, Position{0.0, 0.0});
            for (int i = 0; i < n; ++i)
            {
                const double x = coord(rng);
                const double y = coord(rng);
                pts.push_back({x, y});
            }
            samples.push_back(count_receptions(pts, 0, r));
        }
        return summarize(samples, rng, bootstrap);
    }

    MonteCarloResult theta_monte_carlo(const std::vector<Position> &nodes, double r, int trials,
                                       std::mt19937_64 &rng, int bootstrap)
    {
        if (trials < 1)
            throw std::invalid_argument("theta_monte_carlo: trials must be >= 1");
        if (nodes.empty())
            throw std::invalid_argument("theta_monte_carlo: empty topology");
        // Counts depend only on the requester, so cache them per node.
        std::vector<ReceptionCount> per_node(nodes.size());
        std::vector<bool> done(nodes.size(), false);
        std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
        std::vector<ReceptionCount> samples;
        samples.reserve(static_cast<std::size_t>(trials));
        for (int t = 0; t < trials; ++t)
        {
            const std::size_t q = pick(rng);
            if (!done[q])
            {
                per_node[q] = count_receptions(nodes, q, r);
                done[q] = true;
            }
            samples.push_back(per_node[q]);
        }
        return summarize(samples, rng, bootstrap);
    }

} // namespace mbmp
