#include "mbmp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mbmp
{
    using nlohmann::json;

    namespace
    {
        constexpr double kWindow = 1.0;
        // Mobility draws come from their own stream so that flows and placement do not shift with it.
        constexpr std::uint64_t kMobilityStream = 0x9e3779b97f4a7c15ULL;
        constexpr double kControlPacketBytes = 64.0;
    } // namespace

    Simulator::Simulator(const Scenario &sc, ProtocolVariant variant, std::uint64_t seed, std::ostream *trace)
        : sc_(sc), variant_(variant), seed_(seed), trace_(trace), mobility_rng_(seed ^ kMobilityStream)
    {
        sc_.validate();
        Materialized m = materialize(sc_, seed);
        topo_ = Topology(std::move(m.nodes), sc_.radio, sc_.arena);
        proto_ = std::make_unique<Protocol>(*this, variant, sc_.protocol, sc_.cneighbor, topo_.size());

        BandwidthEstimator proto_est;
        proto_est.alpha = sc_.estimator.alpha;
        proto_est.period = sc_.estimator.period;
        proto_est.channel_capacity = sc_.radio.channel_capacity;
        local_est_.assign(topo_.size(), proto_est);
        ncs_est_.assign(topo_.size(), proto_est);
        control_busy_cs_.assign(topo_.size(), 0.0);
        control_busy_ncs_.assign(topo_.size(), 0.0);
        const double warm = sc_.estimator.warmup_periods * sc_.estimator.period;
        for (NodeId n = 0; n < topo_.size(); ++n)
        {
            const double busy = std::min(1.0, background(n) / sc_.radio.channel_capacity);
            if (warm > 0.0)
            {
                local_est_[n] = advance_fluid(local_est_[n], warm, busy);
                ncs_est_[n] = advance_fluid(ncs_est_[n], warm, busy);
            }
        }

        for (const auto &spec : m.flows)
        {
            FlowRuntime f;
            f.res.spec = spec;
            f.res.w = flow_bandwidth(sc_.mac, spec);
            f.airtime = packet_airtime(sc_.mac, spec.packet_size);
            flow_index_[spec.id] = flows_.size();
            flows_.push_back(std::move(f));
        }
        if (sc_.mobility.enabled)
            mobility_ = RandomWaypoint::initial(topo_, sc_.mobility, mobility_rng_);
        recompute();
    }

    double Simulator::background(NodeId n) const
    {
        const auto it = sc_.estimator.background_bps.find(n);
        return it == sc_.estimator.background_bps.end() ? 0.0 : it->second;
    }

    double Simulator::settle_time() const
    {
        return sc_.estimator.settle_periods * sc_.estimator.period;
    }

    void Simulator::schedule(double delay, std::function<void()> action)
    {
        queue_.schedule_in(delay, std::move(action));
    }

    void Simulator::trace(json record)
    {
        if (!trace_)
            return;
        if (record.contains("node") && record["node"].is_number_unsigned())
            record["name"] = topo_.name(record["node"].get<NodeId>());
        *trace_ << record.dump() << '\n';
    }

    void Simulator::on_message_sent(NodeId from, MessageKind kind)
    {
        ++counts_[static_cast<std::size_t>(kind)];
        if (!sc_.protocol.control_consumes_airtime)
            return;
        const double air = packet_airtime(sc_.mac, kControlPacketBytes);
        const Position &p = topo_.position(from);
        for (const auto &n : topo_.nodes())
        {
            const double d = distance(p, n.pos);
            if (d <= topo_.radio().cs_range)
                control_busy_cs_[n.id] += air;
            if (d <= topo_.radio().ncs_range)
                control_busy_ncs_[n.id] += air;
        }
    }

    Simulator::FlowRuntime &Simulator::flow(FlowId id)
    {
        return flows_.at(flow_index_.at(id));
    }

    double Simulator::sample_local_bandwidth(NodeId n) const
    {
        return std::max(0.0, fluid_.local_available(n, sc_.radio.channel_capacity) - background(n));
    }

    double Simulator::hop_delay(const FlowRuntime &f) const
    {
        const auto it = fluid_.hop_utilization.find(f.res.spec.id);
        if (it == fluid_.hop_utilization.end() || it->second.empty())
            return 0.0;
        double sum = 0.0;
        for (double u : it->second)
            sum += per_hop_delay(f.airtime, u);
        return sum / static_cast<double>(it->second.size());
    }

    void Simulator::accumulate()
    {
        const double t = queue_.now();
        const double dt = t - last_accum_;
        if (dt <= 0.0)
            return;
        const double cap = sc_.radio.channel_capacity;
        for (NodeId n = 0; n < topo_.size(); ++n)
        {
            const double bg = background(n);
            const double cs_busy = (fluid_.achieved_cs[n] + bg) / cap + control_busy_cs_[n] / dt;
            const double ncs_busy = (fluid_.achieved_ncs[n] + bg) / cap + control_busy_ncs_[n] / dt;
            local_est_[n] = advance_fluid(local_est_[n], dt, std::min(1.0, cs_busy));
            ncs_est_[n] = advance_fluid(ncs_est_[n], dt, std::min(1.0, ncs_busy));
            control_busy_cs_[n] = 0.0;
            control_busy_ncs_[n] = 0.0;
        }
        for (auto &f : flows_)
        {
            if (!f.carrying)
                continue;
            f.acc.bits += f.res.spec.offered_bps() * fluid_.factor_of(f.res.spec.id) * dt;
            f.acc.carried += dt;
            f.acc.delay += hop_delay(f) * dt;
        }
        last_accum_ = t;
    }

    void Simulator::recompute()
    {
        std::vector<ActiveFlow> active;
        for (const auto &f : flows_)
            if (f.carrying)
                active.push_back({f.res.spec.id, f.res.route.transmitters(), f.res.w});
        fluid_ = apply_fluid_contention(topo_, active);
    }

    void Simulator::on_admitted(FlowId id, const RouteRecord &route)
    {
        accumulate();
        auto &f = flow(id);
        f.res.status = FlowStatus::Admitted;
        f.res.route = route;
        if (!f.res.ever_admitted)
            f.res.admitted_at = now();
        f.res.ever_admitted = true;
        f.carrying = true;
        recompute();
    }

    void Simulator::on_rejected(FlowId id, std::string_view reason)
    {
        auto &f = flow(id);
        f.res.status = FlowStatus::Rejected;
        f.res.reason = std::string(reason);
    }

    void Simulator::on_route_lost(FlowId id)
    {
        accumulate();
        auto &f = flow(id);
        f.res.status = FlowStatus::Pending;
        if (f.carrying)
        {
            f.carrying = false;
            recompute();
        }
    }

    void Simulator::on_broken(FlowId id)
    {
        accumulate();
        auto &f = flow(id);
        f.res.status = FlowStatus::Broken;
        f.res.reason = "route lost";
        if (f.carrying)
        {
            f.carrying = false;
            recompute();
        }
    }

    void Simulator::check_links()
    {
        std::vector<std::pair<FlowId, std::size_t>> breaks;
        for (auto &f : flows_)
        {
            if (!f.carrying)
                continue;
            const auto &hops = f.res.route.hops;
            for (std::size_t i = 0; i + 1 < hops.size(); ++i)
                if (topo_.distance(hops[i], hops[i + 1]) > topo_.radio().tx_range)
                {
                    f.carrying = false;
                    breaks.emplace_back(f.res.spec.id, i);
                    break;
                }
        }
        if (breaks.empty())
            return;
        recompute();
        for (const auto &[id, hop] : breaks)
            proto_->on_mobility_break(id, hop);
    }

    void Simulator::take_samples()
    {
        for (NodeId n : sc_.sample_nodes)
        {
            BandwidthSample s;
            s.t = now();
            s.node = n;
            s.local_truth = sample_local_bandwidth(n);
            s.local_estimate = local_est_[n].current_estimate;
            s.neighbor_estimate = ncs_est_[n].current_estimate;
            double offered = background(n);
            for (const auto &f : flows_)
                if (f.carrying)
                    for (NodeId t : f.res.route.transmitters())
                        if (topo_.distance(t, n) <= topo_.radio().cs_range)
                            offered += f.res.w;
            s.congested = offered > sc_.radio.channel_capacity * (1.0 + 1e-9);
            samples_.push_back(s);
        }
    }

    void Simulator::close_window(double length)
    {
        accumulate();
        std::vector<FlowId> overloaded;
        for (auto &f : flows_)
        {
            const bool live = f.started && (f.res.status == FlowStatus::Pending || f.res.status == FlowStatus::Admitted);
            if (f.acc.carried > 0.0 || live)
            {
                WindowSample w;
                w.start = window_start_;
                w.length = length;
                w.carried = f.acc.carried;
                w.offered_bps = f.acc.carried > 0.0 ? f.res.spec.offered_bps() : 0.0;
                w.achieved_bps = f.acc.bits / length;
                w.delay_s = f.acc.carried > 0.0 ? f.acc.delay / f.acc.carried : 0.0;
                w.hops = f.acc.carried > 0.0 ? static_cast<int>(f.res.route.hops.size()) - 1 : 0;
                if (f.carrying && w.full() && w.achieved_bps < sc_.protocol.overload_ratio * w.offered_bps)
                    overloaded.push_back(f.res.spec.id);
                f.res.windows.push_back(w);
            }
            f.acc = {};
        }
        window_start_ = now();
        take_samples();
        for (const auto &f : flows_)
            if (f.carrying)
                for (NodeId t : f.res.route.transmitters())
                    proto_->overhear_data(f.res.route, t);
        proto_->expire_cneighbors();
        recompute();
        for (FlowId id : overloaded)
            proto_->on_overload(id);
    }

    MetricsReport Simulator::run()
    {
        if (ran_)
            throw std::logic_error("Simulator::run called twice");
        ran_ = true;
        const double end = sc_.duration;

        take_samples();
        for (std::size_t i = 0; i < flows_.size(); ++i)
        {
            const FlowSpec spec = flows_[i].res.spec;
            if (spec.start_time >= end)
                continue;
            queue_.schedule_at(spec.start_time, [this, i] {
                accumulate();
                auto &f = flows_[i];
                f.started = true;
                f.res.status = FlowStatus::Pending;
                proto_->start_flow(f.res.spec, f.res.w);
            });
            if (spec.stop_time > spec.start_time && spec.stop_time < end)
                queue_.schedule_at(spec.stop_time, [this, i] {
                    accumulate();
                    auto &f = flows_[i];
                    proto_->finish_flow(f.res.spec.id);
                    if (f.res.status == FlowStatus::Admitted || f.res.status == FlowStatus::Pending)
                        f.res.status = f.res.ever_admitted ? FlowStatus::Finished : FlowStatus::Rejected;
                    if (f.carrying)
                    {
                        f.carrying = false;
                        recompute();
                    }
                });
        }
        for (const auto &e : sc_.events)
        {
            if (e.time >= end)
                continue;
            queue_.schedule_at(e.time, [this, e] {
                accumulate();
                topo_.set_position(e.node, e.pos);
                recompute();
                check_links();
            });
        }

        for (double t = kWindow; t <= end + 1e-9; t += kWindow)
            queue_.schedule_at(std::min(t, end), [this] { close_window(kWindow); });

        // Recurring actions capture themselves by reference; they live until run_until returns.
        std::function<void()> move, hello;
        if (mobility_)
        {
            const double tick = sc_.mobility.tick;
            move = [this, tick, &move] {
                accumulate();
                mobility_->step(topo_, tick, mobility_rng_);
                check_links();
                if (now() + tick < sc_.duration)
                    queue_.schedule_in(tick, move);
            };
            queue_.schedule_at(tick, move);
        }
        if (sc_.cneighbor.mode != CNeighborMode::Passive)
        {
            const double period = sc_.cneighbor.hello_period;
            hello = [this, period, &hello] {
                proto_->send_hellos();
                if (now() + period < sc_.duration)
                    queue_.schedule_in(period, hello);
            };
            queue_.schedule_at(0.0, hello);
        }
        queue_.run_until(end);

        const double tail = end - window_start_;
        if (tail > 1e-9)
            close_window(tail);

        MetricsReport r;
        r.variant = variant_;
        r.seed = seed_;
        r.duration = end;
        for (const auto &n : topo_.nodes())
            r.node_names.push_back(n.name);
        for (auto &f : flows_)
        {
            if (f.res.status == FlowStatus::Admitted)
                f.res.status = FlowStatus::Finished;
            else if (f.res.status == FlowStatus::Pending && f.started)
            {
                f.res.status = f.res.ever_admitted ? FlowStatus::Broken : FlowStatus::Rejected;
                if (f.res.reason.empty())
                    f.res.reason = "undecided at end of run";
            }
            r.flows.push_back(f.res);
        }
        r.samples = samples_;
        r.control = counts_;
        compute_metrics(r);
        return r;
    }

    MetricsReport run_scenario(const Scenario &sc, ProtocolVariant variant, std::uint64_t seed, std::ostream *trace)
    {
        Simulator sim(sc, variant, seed, trace);
        return sim.run();
    }

} // namespace mbmp
