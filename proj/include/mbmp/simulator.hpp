#pragma once

#include "mbmp/bandwidth.hpp"
#include "mbmp/event_queue.hpp"
#include "mbmp/fluid.hpp"
#include "mbmp/geometry.hpp"
#include "mbmp/metrics.hpp"
#include "mbmp/protocol.hpp"
#include "mbmp/scenario.hpp"

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>

namespace mbmp
{
    /// One simulation run: event engine, fluid channel, CBR traffic and metric collection.
    class Simulator : public ProtocolHost
    {
    public:
        Simulator(const Scenario &sc, ProtocolVariant variant, std::uint64_t seed, std::ostream *trace = nullptr);

        /// Runs to the scenario duration and returns the metrics. Call once.
        MetricsReport run();

        double now() const override { return queue_.now(); }
        void schedule(double delay, std::function<void()> action) override;
        const Topology &topology() const override { return topo_; }
        double local_estimate(NodeId n) const override { return local_est_.at(n).current_estimate; }
        double neighbor_estimate(NodeId n) const override { return ncs_est_.at(n).current_estimate; }
        double settle_time() const override;
        void on_admitted(FlowId flow, const RouteRecord &route) override;
        void on_rejected(FlowId flow, std::string_view reason) override;
        void on_route_lost(FlowId flow) override;
        void on_broken(FlowId flow) override;
        void on_message_sent(NodeId from, MessageKind kind) override;
        bool tracing() const override { return trace_ != nullptr; }
        void trace(nlohmann::json record) override;

        const Protocol &protocol() const { return *proto_; }
        const FluidState &fluid() const { return fluid_; }
        /// Fluid ground truth: capacity minus achieved load sensed within cs_range.
        double sample_local_bandwidth(NodeId n) const;

    private:
        struct Accumulator
        {
            double bits = 0.0;
            double carried = 0.0;
            double delay = 0.0; // delay x time
        };

        struct FlowRuntime
        {
            FlowResult res;
            double airtime = 0.0;
            bool started = false;
            bool carrying = false;
            Accumulator acc;
        };

        FlowRuntime &flow(FlowId id);
        void accumulate();
        void recompute();
        void close_window(double length);
        void take_samples();
        void check_links();
        double hop_delay(const FlowRuntime &f) const;
        double background(NodeId n) const;

        Scenario sc_;
        ProtocolVariant variant_;
        std::uint64_t seed_;
        std::ostream *trace_;

        Topology topo_;
        EventQueue queue_;
        std::unique_ptr<Protocol> proto_;
        std::vector<BandwidthEstimator> local_est_;
        std::vector<BandwidthEstimator> ncs_est_;
        std::vector<double> control_busy_cs_;  // control airtime sensed since the last accumulate, s
        std::vector<double> control_busy_ncs_;
        FluidState fluid_;
        std::vector<FlowRuntime> flows_;
        std::map<FlowId, std::size_t> flow_index_;
        MessageCounts counts_{};
        std::vector<BandwidthSample> samples_;
        std::mt19937_64 mobility_rng_;
        std::optional<RandomWaypoint> mobility_;
        double last_accum_ = 0.0;
        double window_start_ = 0.0;
        bool ran_ = false;
    };

    MetricsReport run_scenario(const Scenario &sc, ProtocolVariant variant, std::uint64_t seed,
                               std::ostream *trace = nullptr);

} // namespace mbmp
