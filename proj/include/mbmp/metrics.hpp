#pragma once

#include "mbmp/bandwidth.hpp"
#include "mbmp/contention.hpp"
#include "mbmp/protocol.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mbmp
{
    enum class FlowStatus
    {
        Pending,
        Admitted,
        Rejected,
        Broken,
        Finished,
    };

    std::string_view to_string(FlowStatus s) noexcept;

    /// One flow over one sampling window.
    struct WindowSample
    {
        double start = 0.0;        // s
        double length = 1.0;       // s
        double carried = 0.0;      // s during which the flow had a route and sent data
        double offered_bps = 0.0;  // application rate while carried
        double achieved_bps = 0.0; // delivered application bits / window length
        double delay_s = 0.0;      // mean per-hop delay while carried
        int hops = 0;

        bool full() const noexcept { return carried >= length - 1e-9; }
        bool operator==(const WindowSample &) const = default;
    };

    struct FlowResult
    {
        FlowSpec spec;
        double w = 0.0; // channel bandwidth per transmitter
        FlowStatus status = FlowStatus::Pending;
        bool ever_admitted = false;
        double admitted_at = -1.0;
        RouteRecord route;
        std::string reason;
        std::vector<WindowSample> windows;

        /// Mean achieved / offered over windows the flow carried data throughout; -1 when none.
        double steady_ratio() const;
        double steady_throughput() const;
        bool operator==(const FlowResult &) const = default;
    };

    struct BandwidthSample
    {
        double t = 0.0;
        NodeId node = 0;
        double local_truth = 0.0;     // capacity minus sensed achieved load
        double local_estimate = 0.0;  // idle-time estimator, cs range
        double neighbor_estimate = 0.0; // idle-time estimator, ncs range
        bool congested = false;

        bool operator==(const BandwidthSample &) const = default;
    };

    using MessageCounts = std::array<std::uint64_t, kMessageKinds>;

    struct MetricsReport
    {
        ProtocolVariant variant = ProtocolVariant::MbmpMultiHop;
        std::uint64_t seed = 0;
        double duration = 0.0;
        std::vector<std::string> node_names;
        std::vector<FlowResult> flows;
        std::vector<BandwidthSample> samples;
        MessageCounts control{};

        double n_f = 0.0;              // sum over admitted flows of (throughput - offered), bits/s
        double total_throughput = 0.0; // sum of admitted flows' steady throughput, bits/s
        double attempted_load = 0.0;   // sum of offered rates of all flows that started
        double avg_per_hop_delay = 0.0;
        int admitted = 0;
        int rejected = 0;
        int broken = 0;
        int false_admissions = 0;

        std::uint64_t control_total() const;
    };

    /// Fills the aggregate fields of `r` from its flows.
    void compute_metrics(MetricsReport &r);

    /// Stable column set: flow,window_start_us,status,carried_us,offered_bps,achieved_bps,delay_us,hops
    std::string windows_csv(const MetricsReport &r);
    std::string windows_csv_header();
    nlohmann::json summary_json(const MetricsReport &r);

} // namespace mbmp
