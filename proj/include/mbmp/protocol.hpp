#pragma once

#include "mbmp/bandwidth.hpp"
#include "mbmp/contention.hpp"
#include "mbmp/geometry.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mbmp
{
    enum class ProtocolVariant
    {
        MbmpMultiHop,
        MbmpPower,
        MbmpCs,
        DsrBaseline,
        LocalOnlyBaseline,
    };

    inline constexpr std::array<ProtocolVariant, 5> kAllVariants = {
        ProtocolVariant::MbmpMultiHop, ProtocolVariant::MbmpPower, ProtocolVariant::MbmpCs,
        ProtocolVariant::DsrBaseline, ProtocolVariant::LocalOnlyBaseline};

    std::string_view to_string(ProtocolVariant v) noexcept;
    /// Accepts the canonical names (mbmp-multihop, mbmp-power, mbmp-cs, dsr, local-only) and `swan`.
    std::optional<ProtocolVariant> parse_variant(std::string_view s);
    std::string valid_variant_names();
    bool is_mbmp(ProtocolVariant v) noexcept;

    enum class MessageKind
    {
        RouteRequest,
        RouteReply,
        AdmissionRequest,
        AdmissionReject,
        AdmissionFailure,
        RouteError,
        Hello,
    };
    inline constexpr std::size_t kMessageKinds = 7;

    std::string_view to_string(MessageKind k) noexcept;

    struct ControlMessage
    {
        MessageKind kind = MessageKind::RouteRequest;
        std::uint64_t msg_id = 0;
        FlowId flow = 0;
        double w = 0.0;
        RouteRecord route;
        NodeId originator = 0;
        int hop_budget = 0;
        int hops_traveled = 0;
        std::uint64_t request_id = 0; // route discovery round
        std::uint64_t attempt = 0;    // route reply attempt (per destination choice)
        std::vector<NodeId> path;     // forwarding path of an admission request / return path of a reject
        std::map<NodeId, int> hello_table;
    };

    enum class ReservationState
    {
        Soft,
        Confirmed,
    };

    struct Reservation
    {
        FlowId flow = 0;
        NodeId node = 0;
        double reserved = 0.0; // bits/s
        ReservationState state = ReservationState::Soft;
        double expires_at = 0.0;
        double settles_at = 0.0; // estimator has absorbed the flow's traffic from here on
        std::uint64_t attempt = 0;
    };

    enum class CNeighborMode
    {
        Passive,
        Active,
        Both,
    };

    std::string_view to_string(CNeighborMode m) noexcept;
    std::optional<CNeighborMode> parse_cneighbor_mode(std::string_view s);

    struct CNeighborConfig
    {
        double ttl = 30.0;
        double hello_period = 1.0;
        CNeighborMode mode = CNeighborMode::Passive;
        int k_cs = 2;

        void validate() const;
        bool operator==(const CNeighborConfig &) const = default;
    };

    struct ProtocolConfig
    {
        double admission_timeout = 0.05; // s
        double soft_ttl = 2.0;           // s
        int max_backups = 3;
        double control_hop_delay = 0.001; // s per transmission
        double discovery_timeout = 2.0;   // s
        int retry_budget = 3;
        double retry_interval = 0.2;  // s between route-error retransmissions
        double overload_ratio = 0.5;  // achieved/offered below this is treated as a broken route
        bool control_consumes_airtime = false;

        void validate() const;
        bool operator==(const ProtocolConfig &) const = default;
    };

    /// Services the protocol needs from the simulation it runs in.
    class ProtocolHost
    {
    public:
        virtual ~ProtocolHost() = default;

        virtual double now() const = 0;
        virtual void schedule(double delay, std::function<void()> action) = 0;
        virtual const Topology &topology() const = 0;

        /// Estimated local (Eq.-1 style) and c-neighborhood (Eq.-2 style) available bandwidth.
        virtual double local_estimate(NodeId n) const = 0;
        virtual double neighbor_estimate(NodeId n) const = 0;
        /// Time after admission at which the estimators have absorbed a new flow.
        virtual double settle_time() const = 0;

        virtual void on_admitted(FlowId flow, const RouteRecord &route) = 0;
        virtual void on_rejected(FlowId flow, std::string_view reason) = 0;
        /// The flow stopped carrying data (route error, overload) and is being re-discovered.
        virtual void on_route_lost(FlowId flow) = 0;
        virtual void on_broken(FlowId flow) = 0;

        virtual void on_message_sent(NodeId from, MessageKind kind) = 0;
        virtual bool tracing() const = 0;
        virtual void trace(nlohmann::json record) = 0;
    };

    /// Per-node MBMP state machines and the two baselines, driven by a ProtocolHost.
    class Protocol
    {
    public:
        Protocol(ProtocolHost &host, ProtocolVariant variant, ProtocolConfig cfg, CNeighborConfig cnb_cfg,
                 std::size_t node_count);

        ProtocolVariant variant() const noexcept { return variant_; }

        /// Begins route discovery for a new flow (or re-discovery of an existing one).
        void start_flow(const FlowSpec &spec, double w);

        /// A hop of an admitted flow left transmission range; `hop_index` is the upstream node's index.
        void on_mobility_break(FlowId flow, std::size_t hop_index);
        /// The source measured its flow far below its offered rate.
        void on_overload(FlowId flow);
        /// The flow ended; release everything held for it.
        void finish_flow(FlowId flow);

        /// Passive learning by every node within cs_range of `transmitter` overhearing a data packet.
        void overhear_data(const RouteRecord &route, NodeId transmitter);
        void send_hellos();
        void expire_cneighbors();

        const CNeighborSet &cneighbors(NodeId n) const { return nodes_.at(n).cnb; }
        CNeighborSet &cneighbors(NodeId n) { return nodes_.at(n).cnb; }
        const std::map<FlowId, Reservation> &reservations(NodeId n) const { return nodes_.at(n).reservations; }
        double reserved_total(FlowId flow) const;

        /// Local available bandwidth used for admission: the estimate minus reservations
        /// the estimator has not absorbed yet (excluding `exclude`).
        double local_available(NodeId n, std::optional<FlowId> exclude = std::nullopt) const;
        double neighbor_available(NodeId n, std::optional<FlowId> exclude = std::nullopt) const;

    private:
        struct DestState
        {
            std::uint64_t request_id = 0;
            bool replied = false;
            std::deque<RouteRecord> backups;
        };

        struct PendingCheck
        {
            ControlMessage reply; // route reply being processed
            double bc = 0.0;
            bool decided = false;
        };

        struct NodeState
        {
            CNeighborSet cnb;
            std::set<std::pair<FlowId, std::uint64_t>> forwarded_requests;
            std::set<std::uint64_t> seen_admission_requests;
            std::map<FlowId, Reservation> reservations;
            std::map<FlowId, DestState> dest;
            std::map<std::uint64_t, PendingCheck> pending; // keyed by admission-request msg id
        };

        enum class SourcePhase
        {
            Idle,
            Discovering,
            Admitted,
            Done,
        };

        struct SourceState
        {
            FlowSpec spec;
            double w = 0.0;
            std::uint64_t request_id = 0;
            SourcePhase phase = SourcePhase::Idle;
            std::uint64_t generation = 0;
            bool ever_admitted = false;
            RouteRecord route;
        };

        struct Check
        {
            bool pass = false;
            int nct = 0;
            double bc = 0.0;
            double available = 0.0;
        };

        void broadcast(NodeId from, ControlMessage msg, double radius);
        bool unicast(NodeId from, NodeId to, ControlMessage msg);
        void receive(NodeId at, NodeId sender, const ControlMessage &msg);

        void on_route_request(NodeId n, NodeId sender, const ControlMessage &msg);
        void handle_route_request(NodeId n, const ControlMessage &msg);
        void on_route_reply(NodeId n, NodeId sender, const ControlMessage &msg);
        void on_admission_request(NodeId n, NodeId sender, const ControlMessage &msg);
        void on_admission_reject(NodeId n, const ControlMessage &msg);
        void on_admission_failure(NodeId n, const ControlMessage &msg);
        void on_route_error(NodeId n, const ControlMessage &msg);

        Check partial_admission(NodeId n, const RouteRecord &route, double w, FlowId flow);
        Check full_local_check(NodeId n, const RouteRecord &route, double w, FlowId flow);
        void cneighborhood_check(NodeId n, const ControlMessage &reply, const Check &local);
        void full_admission_passed(NodeId n, const ControlMessage &reply, double reserve);
        void full_admission_failed(NodeId n, const ControlMessage &reply, std::string_view why);
        void send_reply(NodeId dest, FlowId flow, RouteRecord route);
        void try_next_backup(NodeId dest, FlowId flow);
        void send_route_error(NodeId from, FlowId flow, std::uint64_t generation, std::size_t hop_index, int tries);
        void restart_discovery(FlowId flow, std::string_view why);
        void release(FlowId flow);
        void discovery_timeout(FlowId flow, std::uint64_t request_id);

        void learn_from_message(NodeId n, NodeId sender, const ControlMessage &msg);
        void trace_decision(NodeId n, FlowId flow, std::string_view phase, const Check &c);
        void trace_message(std::string_view event, NodeId node, NodeId peer, const ControlMessage &msg);
        void trace_flow(FlowId flow, std::string_view state, std::string_view reason = {});

        ProtocolHost &host_;
        ProtocolVariant variant_;
        ProtocolConfig cfg_;
        CNeighborConfig cnb_cfg_;
        std::vector<NodeState> nodes_;
        std::map<FlowId, SourceState> sources_;
        std::uint64_t next_msg_id_ = 1;
        std::uint64_t next_attempt_ = 1;
    };

} // namespace mbmp
