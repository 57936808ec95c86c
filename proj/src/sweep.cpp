#include "mbmp/sweep.hpp"

#include "mbmp/simulator.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace mbmp
{
    unsigned sweep_threads()
    {
        unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        if (const char *env = std::getenv("MBMP_SIM_THREADS"))
        {
            char *end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && v > 0)
                return static_cast<unsigned>(v);
        }
        return hw;
    }

    std::vector<SweepRow> run_sweep(const SweepSpec &spec, unsigned threads)
    {
        spec.validate();
        std::vector<SweepRow> rows;
        for (int n : spec.node_counts)
            for (int rep = 0; rep < spec.replicates; ++rep)
                for (auto v : spec.variants)
                {
                    SweepRow row;
                    row.variant = v;
                    row.node_count = n;
                    row.replicate = rep;
                    row.seed = spec.base_seed + static_cast<std::uint64_t>(rep);
                    rows.push_back(std::move(row));
                }

        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < rows.size(); i = next++)
            {
                auto &row = rows[i];
                try
                {
                    Scenario sc = spec.base;
                    sc.nodes.clear();
                    sc.node_count = row.node_count;
                    sc.seed = row.seed;
                    row.report = run_scenario(sc, row.variant, row.seed);
                    row.ok = true;
                }
                catch (const std::exception &e)
                {
                    row.ok = false;
                    row.error = e.what();
                }
            }
        };

        if (threads == 0)
            threads = sweep_threads();
        threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, rows.size())));
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < threads; ++t)
            pool.emplace_back(worker);
        worker();
        for (auto &t : pool)
            t.join();
        return rows;
    }

    std::string sweep_csv(const std::vector<SweepRow> &rows)
    {
        std::ostringstream out;
        out << "variant,node_count,replicate,seed,status,n_f_bps,total_throughput_bps,attempted_load_bps,"
               "control_messages,avg_per_hop_delay_us,admitted,rejected,false_admissions\n";
        for (const auto &r : rows)
        {
            out << to_string(r.variant) << ',' << r.node_count << ',' << r.replicate << ',' << r.seed << ',';
            if (!r.ok)
            {
                out << "failed,,,,,,,,\n";
                continue;
            }
            const auto &m = r.report;
            out << "ok," << std::llround(m.n_f) << ',' << std::llround(m.total_throughput) << ','
                << std::llround(m.attempted_load) << ',' << m.control_total() << ','
                << std::llround(m.avg_per_hop_delay * 1e6) << ',' << m.admitted << ',' << m.rejected << ','
                << m.false_admissions << '\n';
        }
        return out.str();
    }

} // namespace mbmp
