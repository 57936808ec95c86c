#include "mbmp/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mbmp
{
    using nlohmann::json;

    namespace
    {
        // Slack on bandwidth comparisons; values are O(1e6) bits/s.
        constexpr double kTolBps = 1e-6;

        std::int64_t to_us(double t)
        {
            return std::llround(t * 1e6);
        }
    } // namespace

    std::string_view to_string(ProtocolVariant v) noexcept
    {
        switch (v)
        {
        case ProtocolVariant::MbmpMultiHop:
            return "mbmp-multihop";
        case ProtocolVariant::MbmpPower:
            return "mbmp-power";
        case ProtocolVariant::MbmpCs:
            return "mbmp-cs";
        case ProtocolVariant::DsrBaseline:
            return "dsr";
        case ProtocolVariant::LocalOnlyBaseline:
            return "local-only";
        }
        return "?";
    }

    std::optional<ProtocolVariant> parse_variant(std::string_view s)
    {
        for (auto v : kAllVariants)
            if (to_string(v) == s)
                return v;
        if (s == "swan")
            return ProtocolVariant::LocalOnlyBaseline;
        return std::nullopt;
    }

    std::string valid_variant_names()
    {
        std::string out;
        for (auto v : kAllVariants)
        {
            if (!out.empty())
                out += ", ";
            out += to_string(v);
        }
        return out;
    }

    bool is_mbmp(ProtocolVariant v) noexcept
    {
        return v == ProtocolVariant::MbmpMultiHop || v == ProtocolVariant::MbmpPower || v == ProtocolVariant::MbmpCs;
    }

    std::string_view to_string(MessageKind k) noexcept
    {
        switch (k)
        {
        case MessageKind::RouteRequest:
            return "RouteRequest";
        case MessageKind::RouteReply:
            return "RouteReply";
        case MessageKind::AdmissionRequest:
            return "AdmissionRequest";
        case MessageKind::AdmissionReject:
            return "AdmissionReject";
        case MessageKind::AdmissionFailure:
            return "AdmissionFailure";
        case MessageKind::RouteError:
            return "RouteError";
        case MessageKind::Hello:
            return "Hello";
        }
        return "?";
    }

    std::string_view to_string(CNeighborMode m) noexcept
    {
        switch (m)
        {
        case CNeighborMode::Passive:
            return "passive";
        case CNeighborMode::Active:
            return "active";
        case CNeighborMode::Both:
            return "both";
        }
        return "?";
    }

    std::optional<CNeighborMode> parse_cneighbor_mode(std::string_view s)
    {
        for (auto m : {CNeighborMode::Passive, CNeighborMode::Active, CNeighborMode::Both})
            if (to_string(m) == s)
                return m;
        return std::nullopt;
    }

    void CNeighborConfig::validate() const
    {
        if (!(ttl > 0.0))
            throw std::invalid_argument("cneighbor.ttl must be positive");
        if (!(hello_period > 0.0))
            throw std::invalid_argument("cneighbor.hello_period must be positive");
        if (k_cs < 1)
            throw std::invalid_argument("cneighbor.k_cs must be >= 1");
    }

    void ProtocolConfig::validate() const
    {
        if (!(admission_timeout > 0.0))
            throw std::invalid_argument("protocol.admission_timeout must be positive");
        if (!(soft_ttl > 0.0))
            throw std::invalid_argument("protocol.soft_ttl must be positive");
        if (max_backups < 0)
            throw std::invalid_argument("protocol.max_backups must be >= 0");
        if (!(control_hop_delay >= 0.0))
            throw std::invalid_argument("protocol.control_hop_delay must be >= 0");
        if (!(discovery_timeout > 0.0))
            throw std::invalid_argument("protocol.discovery_timeout must be positive");
        if (retry_budget < 0)
            throw std::invalid_argument("protocol.retry_budget must be >= 0");
        if (!(retry_interval > 0.0))
            throw std::invalid_argument("protocol.retry_interval must be positive");
        if (!(overload_ratio >= 0.0 && overload_ratio <= 1.0))
            throw std::invalid_argument("protocol.overload_ratio must lie in [0,1]");
    }

    Protocol::Protocol(ProtocolHost &host, ProtocolVariant variant, ProtocolConfig cfg, CNeighborConfig cnb_cfg,
                       std::size_t node_count)
        : host_(host), variant_(variant), cfg_(cfg), cnb_cfg_(cnb_cfg)
    {
        cfg_.validate();
        cnb_cfg_.validate();
        nodes_.reserve(node_count);
        for (std::size_t i = 0; i < node_count; ++i)
            nodes_.push_back(NodeState{CNeighborSet(static_cast<NodeId>(i)), {}, {}, {}, {}, {}});
    }

    // ---------------------------------------------------------------- bandwidth views

    double Protocol::local_available(NodeId n, std::optional<FlowId> exclude) const
    {
        const double now = host_.now();
        double held = 0.0;
        for (const auto &[flow, r] : nodes_.at(n).reservations)
        {
            if (exclude && *exclude == flow)
                continue;
            if (r.state == ReservationState::Soft || now < r.settles_at)
                held += r.reserved;
        }
        return std::max(0.0, host_.local_estimate(n) - held);
    }

    double Protocol::neighbor_available(NodeId n, std::optional<FlowId> exclude) const
    {
        const double now = host_.now();
        double held = 0.0;
        for (const auto &[flow, r] : nodes_.at(n).reservations)
        {
            if (exclude && *exclude == flow)
                continue;
            if (r.state == ReservationState::Soft || now < r.settles_at)
                held += r.reserved;
        }
        return std::max(0.0, host_.neighbor_estimate(n) - held);
    }

    double Protocol::reserved_total(FlowId flow) const
    {
        double sum = 0.0;
        for (const auto &n : nodes_)
        {
            const auto it = n.reservations.find(flow);
            if (it != n.reservations.end())
                sum += it->second.reserved;
        }
        return sum;
    }

    Protocol::Check Protocol::partial_admission(NodeId n, const RouteRecord &route, double w, FlowId flow)
    {
        Check c;
        c.nct = contention_count(route, n, nodes_[n].cnb, cnb_cfg_.k_cs);
        c.bc = c.nct * w;
        switch (variant_)
        {
        case ProtocolVariant::MbmpMultiHop:
        case ProtocolVariant::MbmpPower:
            c.available = local_available(n, flow);
            c.pass = c.bc <= c.available + kTolBps;
            break;
        case ProtocolVariant::MbmpCs:
            c.available = std::min(local_available(n, flow), neighbor_available(n, flow));
            c.pass = c.bc <= c.available + kTolBps;
            break;
        case ProtocolVariant::DsrBaseline:
            c.available = local_available(n, flow);
            c.pass = true;
            break;
        case ProtocolVariant::LocalOnlyBaseline:
            c.available = local_available(n, flow);
            c.pass = w <= c.available + kTolBps;
            break;
        }
        return c;
    }

    Protocol::Check Protocol::full_local_check(NodeId n, const RouteRecord &route, double w, FlowId flow)
    {
        Check c;
        c.nct = contention_count(route, n, nodes_[n].cnb, cnb_cfg_.k_cs);
        c.bc = c.nct * w;
        c.available = local_available(n, flow);
        switch (variant_)
        {
        case ProtocolVariant::MbmpMultiHop:
        case ProtocolVariant::MbmpPower:
        case ProtocolVariant::MbmpCs:
            c.pass = c.bc <= c.available + kTolBps;
            break;
        case ProtocolVariant::DsrBaseline:
            c.pass = true;
            break;
        case ProtocolVariant::LocalOnlyBaseline:
            c.pass = w <= c.available + kTolBps;
            break;
        }
        return c;
    }

    // ---------------------------------------------------------------- transport

    void Protocol::broadcast(NodeId from, ControlMessage msg, double radius)
    {
        if (msg.msg_id == 0)
            msg.msg_id = next_msg_id_++;
        if (!msg.route.loop_free())
            throw std::logic_error("protocol emitted a looping route");
        host_.on_message_sent(from, msg.kind);
        trace_message("send", from, from, msg);
        for (NodeId r : host_.topology().within(from, radius))
            host_.schedule(cfg_.control_hop_delay, [this, r, from, msg] { receive(r, from, msg); });
    }

    bool Protocol::unicast(NodeId from, NodeId to, ControlMessage msg)
    {
        if (msg.msg_id == 0)
            msg.msg_id = next_msg_id_++;
        if (!msg.route.loop_free())
            throw std::logic_error("protocol emitted a looping route");
        const double reach = msg.kind == MessageKind::AdmissionReject && variant_ == ProtocolVariant::MbmpPower
                                 ? host_.topology().radio().cs_range
                                 : host_.topology().radio().tx_range;
        if (host_.topology().distance(from, to) > reach)
        {
            trace_message("send-failed", from, to, msg);
            return false;
        }
        host_.on_message_sent(from, msg.kind);
        trace_message("send", from, to, msg);
        host_.schedule(cfg_.control_hop_delay, [this, to, from, msg] { receive(to, from, msg); });
        return true;
    }

    void Protocol::receive(NodeId at, NodeId sender, const ControlMessage &msg)
    {
        trace_message("recv", at, sender, msg);
        switch (msg.kind)
        {
        case MessageKind::RouteRequest:
            on_route_request(at, sender, msg);
            break;
        case MessageKind::RouteReply:
            on_route_reply(at, sender, msg);
            break;
        case MessageKind::AdmissionRequest:
            on_admission_request(at, sender, msg);
            break;
        case MessageKind::AdmissionReject:
            on_admission_reject(at, msg);
            break;
        case MessageKind::AdmissionFailure:
            on_admission_failure(at, msg);
            break;
        case MessageKind::RouteError:
            on_route_error(at, msg);
            break;
        case MessageKind::Hello:
            learn_from_hello(nodes_[at].cnb, HelloMessage{sender, msg.hello_table}, host_.now());
            break;
        }
    }

    void Protocol::learn_from_message(NodeId n, NodeId sender, const ControlMessage &msg)
    {
        if (cnb_cfg_.mode == CNeighborMode::Active)
            return;
        auto &cnb = nodes_[n].cnb;
        const double now = host_.now();
        learn_passively(cnb, sender, msg.route, now);
        if (msg.kind == MessageKind::AdmissionRequest && msg.originator != sender)
            cnb.learn(msg.originator, std::max(1, msg.hops_traveled), now);
    }

    // ---------------------------------------------------------------- route discovery

    void Protocol::start_flow(const FlowSpec &spec, double w)
    {
        auto &src = sources_[spec.id];
        src.spec = spec;
        src.w = w;
        const NodeId s = spec.src;

        if (w > host_.topology().radio().channel_capacity)
        {
            src.phase = SourcePhase::Done;
            trace_flow(spec.id, "rejected", "infeasible bandwidth requirement");
            if (src.ever_admitted)
                host_.on_broken(spec.id);
            else
                host_.on_rejected(spec.id, "infeasible bandwidth requirement");
            return;
        }

        RouteRecord route{{s}, false};
        const Check c = partial_admission(s, route, w, spec.id);
        trace_decision(s, spec.id, "partial", c);
        if (!c.pass)
        {
            src.phase = SourcePhase::Done;
            trace_flow(spec.id, "rejected", "source partial admission");
            if (src.ever_admitted)
                host_.on_broken(spec.id);
            else
                host_.on_rejected(spec.id, "source partial admission");
            return;
        }

        src.phase = SourcePhase::Discovering;
        src.request_id = next_msg_id_++;
        nodes_[s].forwarded_requests.insert({spec.id, src.request_id});

        ControlMessage msg;
        msg.kind = MessageKind::RouteRequest;
        msg.flow = spec.id;
        msg.w = w;
        msg.route = route;
        msg.originator = s;
        msg.request_id = src.request_id;
        broadcast(s, msg, host_.topology().radio().tx_range);

        const FlowId flow = spec.id;
        const std::uint64_t req = src.request_id;
        host_.schedule(cfg_.discovery_timeout, [this, flow, req] { discovery_timeout(flow, req); });
    }

    void Protocol::discovery_timeout(FlowId flow, std::uint64_t request_id)
    {
        auto &src = sources_.at(flow);
        if (src.phase != SourcePhase::Discovering || src.request_id != request_id)
            return;
        src.phase = SourcePhase::Done;
        release(flow);
        trace_flow(flow, src.ever_admitted ? "broken" : "rejected", "no admissible route");
        if (src.ever_admitted)
            host_.on_broken(flow);
        else
            host_.on_rejected(flow, "no admissible route");
    }

    void Protocol::on_route_request(NodeId n, NodeId sender, const ControlMessage &msg)
    {
        // The sender is heard directly and counts at once; the rest of the carried
        // route is recorded after the partial check so it shapes later decisions only.
        if (cnb_cfg_.mode != CNeighborMode::Active)
            nodes_[n].cnb.learn(sender, 1, host_.now());
        handle_route_request(n, msg);
        learn_from_message(n, sender, msg);
    }

    void Protocol::handle_route_request(NodeId n, const ControlMessage &msg)
    {
        const auto &src = sources_.at(msg.flow);

        if (msg.route.contains(n))
        {
            if (host_.tracing())
                host_.trace({{"t_us", to_us(host_.now())}, {"event", "drop"}, {"node", n}, {"flow", msg.flow},
                             {"reason", "loop"}});
            return;
        }

        RouteRecord route = msg.route;
        route.hops.push_back(n);

        if (n == src.spec.dst)
        {
            route.complete = true;
            auto &ds = nodes_[n].dest[msg.flow];
            if (ds.request_id != msg.request_id)
                ds = DestState{msg.request_id, false, {}};
            const Check c = partial_admission(n, route, msg.w, msg.flow);
            trace_decision(n, msg.flow, "partial", c);
            if (!c.pass)
                return;
            if (!ds.replied)
            {
                ds.replied = true;
                send_reply(n, msg.flow, route);
            }
            else if (static_cast<int>(ds.backups.size()) < cfg_.max_backups)
            {
                ds.backups.push_back(route);
            }
            return;
        }

        auto &node = nodes_[n];
        if (node.forwarded_requests.contains({msg.flow, msg.request_id}))
        {
            if (host_.tracing())
                host_.trace({{"t_us", to_us(host_.now())}, {"event", "drop"}, {"node", n}, {"flow", msg.flow},
                             {"reason", "duplicate"}});
            return;
        }

        const Check c = partial_admission(n, route, msg.w, msg.flow);
        trace_decision(n, msg.flow, "partial", c);
        if (!c.pass)
            return;
        node.forwarded_requests.insert({msg.flow, msg.request_id});

        ControlMessage fwd = msg;
        fwd.msg_id = 0;
        fwd.route = std::move(route);
        broadcast(n, fwd, host_.topology().radio().tx_range);
    }

    void Protocol::send_reply(NodeId dest, FlowId flow, RouteRecord route)
    {
        const auto &src = sources_.at(flow);
        ControlMessage msg;
        msg.kind = MessageKind::RouteReply;
        msg.flow = flow;
        msg.w = src.w;
        msg.originator = dest;
        msg.request_id = nodes_[dest].dest[flow].request_id;
        msg.attempt = next_attempt_++;
        const int at = route.index_of(dest);
        msg.route = std::move(route);
        if (at <= 0)
            return;
        const NodeId next = msg.route.hops[static_cast<std::size_t>(at - 1)];
        if (!unicast(dest, next, msg))
            try_next_backup(dest, flow);
    }

    void Protocol::try_next_backup(NodeId dest, FlowId flow)
    {
        auto &ds = nodes_[dest].dest[flow];
        if (ds.backups.empty())
        {
            if (host_.tracing())
                host_.trace({{"t_us", to_us(host_.now())}, {"event", "decision"}, {"phase", "backup"},
                             {"node", dest}, {"flow", flow}, {"result", "exhausted"}});
            return;
        }
        RouteRecord next = std::move(ds.backups.front());
        ds.backups.pop_front();
        if (host_.tracing())
            host_.trace({{"t_us", to_us(host_.now())}, {"event", "decision"}, {"phase", "backup"}, {"node", dest},
                         {"flow", flow}, {"result", "retry"}, {"route", next.hops}});
        send_reply(dest, flow, std::move(next));
    }

    // ---------------------------------------------------------------- full admission

    void Protocol::on_route_reply(NodeId n, NodeId sender, const ControlMessage &msg)
    {
        learn_from_message(n, sender, msg);
        const auto &src = sources_.at(msg.flow);
        if (n == src.spec.src && (src.phase != SourcePhase::Discovering || src.request_id != msg.request_id))
        {
            full_admission_failed(n, msg, "stale reply");
            return;
        }

        const Check local = full_local_check(n, msg.route, msg.w, msg.flow);
        trace_decision(n, msg.flow, "full", local);
        if (!local.pass)
        {
            full_admission_failed(n, msg, "local bandwidth");
            return;
        }
        cneighborhood_check(n, msg, local);
    }

    void Protocol::cneighborhood_check(NodeId n, const ControlMessage &reply, const Check &local)
    {
        switch (variant_)
        {
        case ProtocolVariant::MbmpMultiHop:
        case ProtocolVariant::MbmpPower: {
            const bool multihop = variant_ == ProtocolVariant::MbmpMultiHop;
            ControlMessage req;
            req.kind = MessageKind::AdmissionRequest;
            req.msg_id = next_msg_id_++;
            req.flow = reply.flow;
            req.w = reply.w;
            req.route = reply.route;
            req.originator = n;
            req.hop_budget = multihop ? 2 : 1;
            req.hops_traveled = 1;
            req.request_id = reply.request_id;
            req.attempt = reply.attempt;
            req.path = {n};

            auto &node = nodes_[n];
            node.seen_admission_requests.insert(req.msg_id);
            node.pending[req.msg_id] = PendingCheck{reply, local.bc, false};
            const std::uint64_t id = req.msg_id;
            const auto &radio = host_.topology().radio();
            broadcast(n, req, multihop ? radio.tx_range : radio.cs_range);
            host_.schedule(cfg_.admission_timeout, [this, n, id] {
                auto &pend = nodes_[n].pending;
                const auto it = pend.find(id);
                if (it == pend.end() || it->second.decided)
                    return;
                it->second.decided = true;
                PendingCheck done = std::move(it->second);
                pend.erase(it);
                if (host_.tracing())
                    host_.trace({{"t_us", to_us(host_.now())}, {"event", "decision"}, {"phase", "cneighbor"},
                                 {"node", n}, {"flow", done.reply.flow}, {"result", "pass"}, {"why", "timeout"}});
                full_admission_passed(n, done.reply, done.bc);
            });
            return;
        }
        case ProtocolVariant::MbmpCs: {
            Check c = local;
            c.available = neighbor_available(n, reply.flow);
            c.pass = c.bc <= c.available + kTolBps;
            trace_decision(n, reply.flow, "cneighbor", c);
            if (c.pass)
                full_admission_passed(n, reply, c.bc);
            else
                full_admission_failed(n, reply, "c-neighborhood bandwidth");
            return;
        }
        case ProtocolVariant::LocalOnlyBaseline:
            full_admission_passed(n, reply, reply.w);
            return;
        case ProtocolVariant::DsrBaseline:
            full_admission_passed(n, reply, 0.0);
            return;
        }
    }

    void Protocol::on_admission_request(NodeId n, NodeId sender, const ControlMessage &msg)
    {
        learn_from_message(n, sender, msg);
        if (n == msg.originator)
            return;
        auto &node = nodes_[n];
        if (!node.seen_admission_requests.insert(msg.msg_id).second)
            return;

        Check c;
        c.nct = contention_count(msg.route, n, node.cnb, cnb_cfg_.k_cs);
        c.bc = c.nct * msg.w;
        c.available = local_available(n, msg.flow);
        c.pass = c.bc <= c.available + kTolBps;
        trace_decision(n, msg.flow, "cneighbor-eval", c);

        if (!c.pass)
        {
            ControlMessage rej;
            rej.kind = MessageKind::AdmissionReject;
            rej.msg_id = msg.msg_id;
            rej.flow = msg.flow;
            rej.w = msg.w;
            rej.originator = msg.originator;
            rej.request_id = msg.request_id;
            rej.attempt = msg.attempt;
            if (variant_ == ProtocolVariant::MbmpPower)
                rej.path = {msg.originator};
            else
                rej.path.assign(msg.path.rbegin(), msg.path.rend());
            const NodeId next = rej.path.front();
            unicast(n, next, rej);
        }

        if (variant_ == ProtocolVariant::MbmpMultiHop && msg.hop_budget > 1)
        {
            ControlMessage fwd = msg;
            fwd.hop_budget -= 1;
            fwd.hops_traveled += 1;
            fwd.path.push_back(n);
            broadcast(n, fwd, host_.topology().radio().tx_range);
        }
    }

    void Protocol::on_admission_reject(NodeId n, const ControlMessage &msg)
    {
        ControlMessage cur = msg;
        if (!cur.path.empty() && cur.path.front() == n)
            cur.path.erase(cur.path.begin());
        if (n != cur.originator)
        {
            if (!cur.path.empty())
                unicast(n, cur.path.front(), cur);
            return;
        }

        auto &pend = nodes_[n].pending;
        const auto it = pend.find(msg.msg_id);
        if (it == pend.end() || it->second.decided)
        {
            if (host_.tracing())
                host_.trace({{"t_us", to_us(host_.now())}, {"event", "drop"}, {"node", n}, {"flow", msg.flow},
                             {"reason", "reject after decision"}});
            return;
        }
        it->second.decided = true;
        PendingCheck done = std::move(it->second);
        pend.erase(it);
        if (host_.tracing())
            host_.trace({{"t_us", to_us(host_.now())}, {"event", "decision"}, {"phase", "cneighbor"}, {"node", n},
                         {"flow", msg.flow}, {"result", "fail"}, {"why", "reject"}});
        full_admission_failed(n, done.reply, "c-neighbor reject");
    }

    void Protocol::full_admission_passed(NodeId n, const ControlMessage &reply, double reserve)
    {
        auto &src = sources_.at(reply.flow);
        const double now = host_.now();
        if (reserve > 0.0)
        {
            Reservation r;
            r.flow = reply.flow;
            r.node = n;
            r.reserved = reserve;
            r.state = ReservationState::Soft;
            r.expires_at = now + cfg_.soft_ttl;
            r.settles_at = std::numeric_limits<double>::infinity();
            r.attempt = reply.attempt;
            nodes_[n].reservations[reply.flow] = r;
            const FlowId flow = reply.flow;
            const std::uint64_t attempt = reply.attempt;
            host_.schedule(cfg_.soft_ttl, [this, n, flow, attempt] {
                auto &res = nodes_[n].reservations;
                const auto it = res.find(flow);
                if (it != res.end() && it->second.state == ReservationState::Soft && it->second.attempt == attempt)
                {
                    res.erase(it);
                    if (host_.tracing())
                        host_.trace({{"t_us", to_us(host_.now())}, {"event", "reservation"}, {"node", n},
                                     {"flow", flow}, {"state", "expired"}});
                }
            });
        }

        if (n == src.spec.src)
        {
            src.phase = SourcePhase::Admitted;
            src.ever_admitted = true;
            src.route = reply.route;
            for (NodeId hop : reply.route.hops)
            {
                auto &res = nodes_[hop].reservations;
                const auto it = res.find(reply.flow);
                if (it != res.end() && it->second.attempt == reply.attempt)
                {
                    it->second.state = ReservationState::Confirmed;
                    it->second.settles_at = now + host_.settle_time();
                }
            }
            trace_flow(reply.flow, "admitted");
            host_.on_admitted(reply.flow, reply.route);
            return;
        }

        const int at = reply.route.index_of(n);
        const NodeId next = reply.route.hops[static_cast<std::size_t>(at - 1)];
        ControlMessage fwd = reply;
        fwd.msg_id = 0;
        if (!unicast(n, next, fwd))
            full_admission_failed(n, reply, "next hop unreachable");
    }

    void Protocol::full_admission_failed(NodeId n, const ControlMessage &reply, std::string_view why)
    {
        auto &res = nodes_[n].reservations;
        const auto it = res.find(reply.flow);
        if (it != res.end() && it->second.attempt == reply.attempt)
            res.erase(it);
        if (host_.tracing())
            host_.trace({{"t_us", to_us(host_.now())}, {"event", "decision"}, {"phase", "admission"}, {"node", n},
                         {"flow", reply.flow}, {"result", "fail"}, {"why", std::string(why)}});

        const int at = reply.route.index_of(n);
        if (at < 0 || at + 1 >= static_cast<int>(reply.route.hops.size()))
            return;
        ControlMessage fail;
        fail.kind = MessageKind::AdmissionFailure;
        fail.flow = reply.flow;
        fail.w = reply.w;
        fail.route = reply.route;
        fail.originator = n;
        fail.request_id = reply.request_id;
        fail.attempt = reply.attempt;
        unicast(n, reply.route.hops[static_cast<std::size_t>(at + 1)], fail);
    }

    void Protocol::on_admission_failure(NodeId n, const ControlMessage &msg)
    {
        auto &res = nodes_[n].reservations;
        const auto it = res.find(msg.flow);
        if (it != res.end() && it->second.attempt == msg.attempt)
        {
            res.erase(it);
            if (host_.tracing())
                host_.trace({{"t_us", to_us(host_.now())}, {"event", "reservation"}, {"node", n},
                             {"flow", msg.flow}, {"state", "dropped"}});
        }
        if (n == msg.route.hops.back())
        {
            if (nodes_[n].dest[msg.flow].request_id == msg.request_id)
                try_next_backup(n, msg.flow);
            return;
        }
        const int at = msg.route.index_of(n);
        if (at < 0)
            return;
        ControlMessage fwd = msg;
        fwd.msg_id = 0;
        unicast(n, msg.route.hops[static_cast<std::size_t>(at + 1)], fwd);
    }

    // ---------------------------------------------------------------- maintenance

    void Protocol::on_mobility_break(FlowId flow, std::size_t hop_index)
    {
        auto it = sources_.find(flow);
        if (it == sources_.end() || it->second.phase != SourcePhase::Admitted)
            return;
        auto &src = it->second;
        if (hop_index + 1 >= src.route.hops.size())
            return;
        if (host_.tracing())
            host_.trace({{"t_us", to_us(host_.now())}, {"event", "link-break"}, {"flow", flow},
                         {"node", src.route.hops[hop_index]}, {"next", src.route.hops[hop_index + 1]}});
        if (hop_index == 0)
        {
            restart_discovery(flow, "link break at source");
            return;
        }
        send_route_error(src.route.hops[hop_index], flow, src.generation, hop_index, 0);
    }

    void Protocol::send_route_error(NodeId from, FlowId flow, std::uint64_t generation, std::size_t hop_index,
                                    int tries)
    {
        auto &src = sources_.at(flow);
        if (src.generation != generation || src.phase != SourcePhase::Admitted)
            return;
        ControlMessage err;
        err.kind = MessageKind::RouteError;
        err.flow = flow;
        err.route = src.route;
        err.originator = from;
        err.attempt = generation;
        for (std::size_t i = hop_index; i-- > 0;)
            err.path.push_back(src.route.hops[i]);
        if (unicast(from, err.path.front(), err))
            return;
        if (tries < cfg_.retry_budget)
        {
            host_.schedule(cfg_.retry_interval, [this, from, flow, generation, hop_index, tries] {
                send_route_error(from, flow, generation, hop_index, tries + 1);
            });
            return;
        }
        src.phase = SourcePhase::Done;
        src.generation++;
        release(flow);
        trace_flow(flow, "broken", "source unreachable");
        host_.on_broken(flow);
    }

    void Protocol::on_route_error(NodeId n, const ControlMessage &msg)
    {
        auto &src = sources_.at(msg.flow);
        if (n == src.spec.src)
        {
            if (src.generation == msg.attempt && src.phase == SourcePhase::Admitted)
                restart_discovery(msg.flow, "route error");
            return;
        }
        const int at = src.route.index_of(n);
        if (at < 0 || src.generation != msg.attempt)
            return;
        send_route_error(n, msg.flow, msg.attempt, static_cast<std::size_t>(at), 0);
    }

    void Protocol::on_overload(FlowId flow)
    {
        auto it = sources_.find(flow);
        if (it == sources_.end() || it->second.phase != SourcePhase::Admitted)
            return;
        restart_discovery(flow, "overload");
    }

    void Protocol::restart_discovery(FlowId flow, std::string_view why)
    {
        auto &src = sources_.at(flow);
        src.generation++;
        release(flow);
        trace_flow(flow, "rediscover", why);
        host_.on_route_lost(flow);
        start_flow(src.spec, src.w);
    }

    void Protocol::finish_flow(FlowId flow)
    {
        auto it = sources_.find(flow);
        if (it != sources_.end())
        {
            it->second.phase = SourcePhase::Done;
            it->second.generation++;
        }
        release(flow);
    }

    void Protocol::release(FlowId flow)
    {
        for (auto &n : nodes_)
            n.reservations.erase(flow);
    }

    void Protocol::overhear_data(const RouteRecord &route, NodeId transmitter)
    {
        if (cnb_cfg_.mode == CNeighborMode::Active)
            return;
        const double now = host_.now();
        for (NodeId n : host_.topology().within(transmitter, host_.topology().radio().cs_range))
            learn_passively(nodes_[n].cnb, transmitter, route, now);
    }

    void Protocol::send_hellos()
    {
        if (cnb_cfg_.mode == CNeighborMode::Passive)
            return;
        for (NodeId n = 0; n < nodes_.size(); ++n)
        {
            ControlMessage hello;
            hello.kind = MessageKind::Hello;
            hello.originator = n;
            for (const auto &[id, e] : nodes_[n].cnb.entries())
                if (e.hops == 1)
                    hello.hello_table[id] = 1;
            broadcast(n, hello, host_.topology().radio().tx_range);
        }
    }

    void Protocol::expire_cneighbors()
    {
        const double now = host_.now();
        for (auto &n : nodes_)
            n.cnb.expire(now, cnb_cfg_.ttl);
    }

    // ---------------------------------------------------------------- tracing

    void Protocol::trace_decision(NodeId n, FlowId flow, std::string_view phase, const Check &c)
    {
        if (!host_.tracing())
            return;
        host_.trace({{"t_us", to_us(host_.now())},
                     {"event", "decision"},
                     {"phase", std::string(phase)},
                     {"node", n},
                     {"flow", flow},
                     {"nct", c.nct},
                     {"bc_bps", std::llround(c.bc)},
                     {"avail_bps", std::llround(c.available)},
                     {"result", c.pass ? "pass" : "fail"}});
    }

    void Protocol::trace_message(std::string_view event, NodeId node, NodeId peer, const ControlMessage &msg)
    {
        if (!host_.tracing())
            return;
        json rec = {{"t_us", to_us(host_.now())},
                    {"event", std::string(event)},
                    {"kind", std::string(to_string(msg.kind))},
                    {"node", node},
                    {"msg", msg.msg_id}};
        if (peer != node)
            rec["peer"] = peer;
        if (msg.kind != MessageKind::Hello)
        {
            rec["flow"] = msg.flow;
            rec["originator"] = msg.originator;
            rec["route"] = msg.route.hops;
        }
        host_.trace(std::move(rec));
    }

    void Protocol::trace_flow(FlowId flow, std::string_view state, std::string_view reason)
    {
        if (!host_.tracing())
            return;
        json rec = {{"t_us", to_us(host_.now())}, {"event", "flow"}, {"flow", flow}, {"state", std::string(state)}};
        if (!reason.empty())
            rec["reason"] = std::string(reason);
        host_.trace(std::move(rec));
    }

} // namespace mbmp
