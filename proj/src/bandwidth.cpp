#include "mbmp/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mbmp
{
    namespace
    {
        // Period closure tolerance; fluid advances are sums of floating-point deltas.
        constexpr double kEps = 1e-12;
    } // namespace

    void MacTimingConfig::validate() const
    {
        for (double v : {t_difs, t_sifs, t_rts, t_cts, t_ack, mean_backoff, header_bits})
        {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("mac: timing fields and header_bits must be finite and >= 0");
        }
        if (!(channel_capacity > 0.0))
            throw std::invalid_argument("mac: channel_capacity must be positive");
    }

    MacTimingConfig MacTimingConfig::zero_overhead(double capacity)
    {
        MacTimingConfig c;
        c.t_difs = c.t_sifs = c.t_rts = c.t_cts = c.t_ack = 0.0;
        c.header_bits = 0.0;
        c.mean_backoff = 0.0;
        c.channel_capacity = capacity;
        return c;
    }

    void FlowSpec::validate() const
    {
        if (!(rate > 0.0))
            throw std::invalid_argument("flow " + std::to_string(id) + ": rate must be positive");
        if (!(packet_size > 0.0))
            throw std::invalid_argument("flow " + std::to_string(id) + ": packet_size must be positive");
        if (src == dst)
            throw std::invalid_argument("flow " + std::to_string(id) + ": src == dst");
        if (!(start_time >= 0.0))
            throw std::invalid_argument("flow " + std::to_string(id) + ": start_time must be >= 0");
    }

    double packet_airtime(const MacTimingConfig &cfg, double packet_size_bytes)
    {
        if (!(packet_size_bytes > 0.0))
            throw std::invalid_argument("packet_airtime: packet size must be positive");
        const double payload = (packet_size_bytes * 8.0 + cfg.header_bits) / cfg.channel_capacity;
        return cfg.t_difs + cfg.t_rts + cfg.t_cts + payload + cfg.t_ack + 3.0 * cfg.t_sifs + cfg.mean_backoff;
    }

    double flow_bandwidth(const MacTimingConfig &cfg, const FlowSpec &spec)
    {
        return spec.rate * packet_airtime(cfg, spec.packet_size) * cfg.channel_capacity;
    }

    void BandwidthEstimator::validate() const
    {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::invalid_argument("estimator: alpha must lie in [0,1]");
        if (!(period > 0.0))
            throw std::invalid_argument("estimator: period must be positive");
        if (!(channel_capacity > 0.0))
            throw std::invalid_argument("estimator: channel_capacity must be positive");
    }

    BandwidthEstimator update_estimator(BandwidthEstimator est, double idle_time_in_period)
    {
        if (idle_time_in_period < 0.0 || idle_time_in_period > est.period * (1.0 + 1e-9))
            throw std::invalid_argument("update_estimator: idle time outside [0, period]");
        const double idle = std::min(idle_time_in_period, est.period);
        const double sample = idle / est.period * est.channel_capacity;
        est.current_estimate = est.alpha * est.current_estimate + (1.0 - est.alpha) * sample;
        est.current_estimate = std::clamp(est.current_estimate, 0.0, est.channel_capacity);
        est.idle_accumulator = 0.0;
        est.period_elapsed = 0.0;
        return est;
    }

    BandwidthEstimator observe_channel(BandwidthEstimator est, Interval interval, const std::vector<Interval> &busy)
    {
        const auto [t0, t1] = interval;
        if (!(t1 >= t0))
            throw std::invalid_argument("observe_channel: interval end before start");
        double prev_end = t0;
        for (const auto &[b0, b1] : busy)
        {
            if (b1 < b0 || b0 < t0 - kEps || b1 > t1 + kEps)
                throw std::invalid_argument("observe_channel: busy interval not clipped to the observation window");
            if (b0 < prev_end - kEps)
                throw std::invalid_argument("observe_channel: busy intervals overlap or are unsorted");
            prev_end = b1;
        }

        // Walk the window, splitting at period boundaries relative to the open period.
        double t = t0;
        std::size_t bi = 0;
        while (t < t1 - kEps)
        {
            const double period_end = t + (est.period - est.period_elapsed);
            const double seg_end = std::min(period_end, t1);
            double busy_in_seg = 0.0;
            for (std::size_t j = bi; j < busy.size(); ++j)
            {
                const double lo = std::max(busy[j].first, t);
                const double hi = std::min(busy[j].second, seg_end);
                if (busy[j].first >= seg_end)
                    break;
                if (hi > lo)
                    busy_in_seg += hi - lo;
            }
            while (bi < busy.size() && busy[bi].second <= seg_end)
                ++bi;
            const double len = seg_end - t;
            est.idle_accumulator += std::max(0.0, len - busy_in_seg);
            est.period_elapsed += len;
            t = seg_end;
            if (est.period_elapsed >= est.period - kEps)
                est = update_estimator(est, std::min(est.idle_accumulator, est.period));
        }
        return est;
    }

    BandwidthEstimator advance_fluid(BandwidthEstimator est, double dt, double busy_fraction)
    {
        const double idle_fraction = 1.0 - std::clamp(busy_fraction, 0.0, 1.0);
        while (dt > kEps)
        {
            const double room = est.period - est.period_elapsed;
            const double step = std::min(room, dt);
            est.idle_accumulator += idle_fraction * step;
            est.period_elapsed += step;
            dt -= step;
            if (est.period_elapsed >= est.period - kEps)
                est = update_estimator(est, std::min(est.idle_accumulator, est.period));
        }
        return est;
    }

} // namespace mbmp
