#pragma once

#include "mbmp/metrics.hpp"
#include "mbmp/scenario.hpp"

#include <string>
#include <vector>

namespace mbmp
{
    struct SweepRow
    {
        ProtocolVariant variant = ProtocolVariant::MbmpMultiHop;
        int node_count = 0;
        int replicate = 0;
        std::uint64_t seed = 0;
        bool ok = false;
        std::string error;
        MetricsReport report;
    };

    /// Worker count: MBMP_SIM_THREADS if set and positive, else hardware concurrency.
    unsigned sweep_threads();

    /// Runs every (node_count, replicate, variant) cell. Rows come back in that nesting order
    /// whatever the completion order. Replicate i uses seed base_seed + i for all variants.
    std::vector<SweepRow> run_sweep(const SweepSpec &spec, unsigned threads = 0);

    /// Columns: variant,node_count,replicate,seed,status,n_f_bps,total_throughput_bps,attempted_load_bps,
    /// control_messages,avg_per_hop_delay_us,admitted,rejected,false_admissions
    std::string sweep_csv(const std::vector<SweepRow> &rows);

} // namespace mbmp
