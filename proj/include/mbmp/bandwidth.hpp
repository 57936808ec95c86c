#pragma once

#include "mbmp/geometry.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace mbmp
{
    using FlowId = std::uint32_t;

    /// 802.11 DCF timing used to turn an application rate into channel bandwidth.
    /// Defaults are DSSS-class constants at 2 Mb/s; mean_backoff absorbs contention
    /// and retry overhead so that 133 pkt/s of 512 B maps to about 930 kb/s.
    struct MacTimingConfig
    {
        double t_difs = 50e-6;
        double t_sifs = 10e-6;
        double t_rts = 272e-6;
        double t_cts = 248e-6;
        double t_ack = 248e-6;
        double header_bits = 384.0; // IP (20 B) + MAC (28 B)
        double mean_backoff = 410e-6;
        double channel_capacity = 2.0e6;

        void validate() const;
        bool operator==(const MacTimingConfig &) const = default;

        /// All overhead terms zeroed; airtime is pure payload.
        static MacTimingConfig zero_overhead(double capacity);
    };

    struct FlowSpec
    {
        FlowId id = 0;
        NodeId src = 0;
        NodeId dst = 0;
        double rate = 0.0;        // packets/s
        double packet_size = 0.0; // bytes
        double start_time = 0.0;  // s
        double stop_time = -1.0;  // s; negative runs to the end of the simulation

        void validate() const;
        /// Application rate in bits/s (R * L * 8).
        double offered_bps() const noexcept { return rate * packet_size * 8.0; }
        bool operator==(const FlowSpec &) const = default;
    };

    /// Channel time consumed by one data packet including the RTS/CTS/DATA/ACK exchange.
    double packet_airtime(const MacTimingConfig &cfg, double packet_size_bytes);

    /// Channel bandwidth W a flow occupies at a single transmitter.
    double flow_bandwidth(const MacTimingConfig &cfg, const FlowSpec &spec);

    /// Exponentially weighted idle-time estimator. The same type serves the local
    /// (carrier-sense range) and the c-neighborhood (neighbor-carrier-sense range)
    /// estimate; only the busy trace feeding it differs.
    struct BandwidthEstimator
    {
        double alpha = 0.5;
        double period = 1.0;            // s
        double channel_capacity = 2.0e6; // bits/s
        double current_estimate = 0.0;  // bits/s, starts at zero
        double idle_accumulator = 0.0;  // s within the open period
        double period_elapsed = 0.0;    // s within the open period

        void validate() const;
        bool operator==(const BandwidthEstimator &) const = default;
    };

    /// Closes one period with the given idle time; resets the accumulator.
    BandwidthEstimator update_estimator(BandwidthEstimator est, double idle_time_in_period);

    using Interval = std::pair<double, double>;

    /// Accumulates the idle part of [t0, t1) given sorted, non-overlapping busy intervals.
    /// Every period boundary crossed closes the period through update_estimator.
    /// The estimator's open period is assumed to begin where the previous call ended.
    BandwidthEstimator observe_channel(BandwidthEstimator est, Interval interval, const std::vector<Interval> &busy);

    /// Advances an estimator by `dt` seconds during which the channel was busy a
    /// fraction `busy_fraction` of the time (fluid channel). Closes periods as needed.
    BandwidthEstimator advance_fluid(BandwidthEstimator est, double dt, double busy_fraction);

} // namespace mbmp
