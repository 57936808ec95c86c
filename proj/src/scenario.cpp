#include "mbmp/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace mbmp
{
    using nlohmann::json;

    namespace
    {
        class Reader
        {
        public:
            std::vector<std::string> errors;

            void keys(const json &j, const std::string &path, std::initializer_list<const char *> allowed)
            {
                if (!j.is_object())
                {
                    errors.push_back(path + ": expected an object");
                    return;
                }
                const std::set<std::string> ok(allowed.begin(), allowed.end());
                for (const auto &[k, v] : j.items())
                    if (!ok.contains(k))
                        errors.push_back(join(path, k) + ": unknown key");
            }

            void num(const json &j, const char *key, double &out, const std::string &path)
            {
                if (!j.is_object() || !j.contains(key))
                    return;
                if (!j[key].is_number())
                    errors.push_back(join(path, key) + ": expected a number");
                else
                    out = j[key].get<double>();
            }

            void integer(const json &j, const char *key, int &out, const std::string &path)
            {
                if (!j.is_object() || !j.contains(key))
                    return;
                if (!j[key].is_number_integer())
                    errors.push_back(join(path, key) + ": expected an integer");
                else
                    out = j[key].get<int>();
            }

            void boolean(const json &j, const char *key, bool &out, const std::string &path)
            {
                if (!j.is_object() || !j.contains(key))
                    return;
                if (!j[key].is_boolean())
                    errors.push_back(join(path, key) + ": expected true or false");
                else
                    out = j[key].get<bool>();
            }

            const json *object(const json &j, const char *key, const std::string &path)
            {
                if (!j.contains(key))
                    return nullptr;
                if (!j[key].is_object())
                {
                    errors.push_back(join(path, key) + ": expected an object");
                    return nullptr;
                }
                return &j[key];
            }

            const json *array(const json &j, const char *key, const std::string &path)
            {
                if (!j.contains(key))
                    return nullptr;
                if (!j[key].is_array())
                {
                    errors.push_back(join(path, key) + ": expected an array");
                    return nullptr;
                }
                return &j[key];
            }

            static std::string join(const std::string &path, const std::string &key)
            {
                return path.empty() ? key : path + "." + key;
            }

            template <class F>
            void guard(const std::string &path, F &&f)
            {
                try
                {
                    f();
                }
                catch (const std::invalid_argument &e)
                {
                    errors.push_back(path + ": " + e.what());
                }
            }

            void finish() const
            {
                if (errors.empty())
                    return;
                std::string msg = "invalid scenario:";
                for (const auto &e : errors)
                    msg += "\n  " + e;
                throw ConfigError(msg);
            }
        };

        std::vector<std::string> node_names(const Scenario &sc)
        {
            std::vector<std::string> names;
            if (!sc.nodes.empty())
                for (const auto &n : sc.nodes)
                    names.push_back(n.name);
            else
                for (int i = 0; i < sc.node_count; ++i)
                    names.push_back("n" + std::to_string(i));
            return names;
        }

        std::optional<NodeId> resolve(const json &ref, const std::vector<std::string> &names)
        {
            if (ref.is_number_integer())
            {
                const auto id = ref.get<std::int64_t>();
                if (id >= 0 && static_cast<std::uint64_t>(id) < names.size())
                    return static_cast<NodeId>(id);
                return std::nullopt;
            }
            if (ref.is_string())
            {
                const auto s = ref.get<std::string>();
                for (std::size_t i = 0; i < names.size(); ++i)
                    if (names[i] == s)
                        return static_cast<NodeId>(i);
            }
            return std::nullopt;
        }

        NodeId node_ref(Reader &rd, const json &j, const char *key, const std::string &path,
                        const std::vector<std::string> &names)
        {
            if (!j.contains(key))
            {
                rd.errors.push_back(Reader::join(path, key) + ": required");
                return 0;
            }
            const auto id = resolve(j[key], names);
            if (!id)
            {
                rd.errors.push_back(Reader::join(path, key) + ": unknown node " + j[key].dump());
                return 0;
            }
            return *id;
        }
    } // namespace

    void Scenario::validate() const
    {
        arena.validate();
        radio.validate();
        mac.validate();
        cneighbor.validate();
        mobility.validate();
        protocol.validate();
        if (mac.channel_capacity != radio.channel_capacity)
            throw std::invalid_argument("mac.channel_capacity must equal radio.channel_capacity");
        BandwidthEstimator{estimator.alpha, estimator.period, radio.channel_capacity}.validate();
        if (estimator.warmup_periods < 0 || estimator.settle_periods < 0)
            throw std::invalid_argument("estimator: warmup_periods and settle_periods must be >= 0");
        if (!nodes.empty() && node_count != 0)
            throw std::invalid_argument("give either nodes or node_count, not both");
        const std::size_t n = nodes.empty() ? static_cast<std::size_t>(std::max(node_count, 0)) : nodes.size();
        if (n < 1)
            throw std::invalid_argument("scenario needs at least one node");
        if (!nodes.empty())
            Topology(nodes, radio, arena);
        if (!(duration > 0.0))
            throw std::invalid_argument("duration must be positive");
        std::set<FlowId> ids;
        for (const auto &f : flows)
        {
            f.validate();
            if (f.src >= n || f.dst >= n)
                throw std::invalid_argument("flow " + std::to_string(f.id) + ": unknown endpoint");
            if (!ids.insert(f.id).second)
                throw std::invalid_argument("duplicate flow id " + std::to_string(f.id));
        }
        if (random_flows)
        {
            const auto &r = *random_flows;
            if (r.count < 0)
                throw std::invalid_argument("random_flows.count must be >= 0");
            if (!(r.rate_min > 0.0 && r.rate_min <= r.rate_max))
                throw std::invalid_argument("random_flows: need 0 < rate_min <= rate_max");
            if (!(r.size_min > 0.0 && r.size_min <= r.size_max))
                throw std::invalid_argument("random_flows: need 0 < size_min <= size_max");
            if (r.start_min < 0.0 || (r.start_max >= 0.0 && r.start_max < r.start_min))
                throw std::invalid_argument("random_flows: bad start window");
            if (n < 2 && r.count > 0)
                throw std::invalid_argument("random_flows needs at least two nodes");
        }
        for (const auto &e : events)
        {
            if (e.node >= n)
                throw std::invalid_argument("event: unknown node");
            if (e.time < 0.0 || !arena.contains(e.pos))
                throw std::invalid_argument("event: time must be >= 0 and position inside the arena");
        }
        for (const auto &[id, load] : estimator.background_bps)
            if (id >= n || load < 0.0)
                throw std::invalid_argument("estimator.background: unknown node or negative load");
        for (NodeId s : sample_nodes)
            if (s >= n)
                throw std::invalid_argument("sample_nodes: unknown node");
    }

    Materialized materialize(const Scenario &sc, std::uint64_t seed)
    {
        Materialized m;
        std::mt19937_64 rng(seed);
        if (!sc.nodes.empty())
        {
            m.nodes = sc.nodes;
        }
        else
        {
            std::uniform_real_distribution<double> ux(0.0, sc.arena.width), uy(0.0, sc.arena.height);
            for (int i = 0; i < sc.node_count; ++i)
            {
                const double x = ux(rng);
                const double y = uy(rng);
                m.nodes.push_back({static_cast<NodeId>(i), "n" + std::to_string(i), {x, y}});
            }
        }
        m.flows = sc.flows;
        if (sc.random_flows && sc.random_flows->count > 0)
        {
            const auto &r = *sc.random_flows;
            FlowId next = 0;
            for (const auto &f : m.flows)
                next = std::max(next, f.id + 1);
            const double smax = r.start_max < 0.0 ? sc.duration / 2.0 : r.start_max;
            std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(m.nodes.size() - 1));
            std::uniform_real_distribution<double> rate(r.rate_min, r.rate_max), size(r.size_min, r.size_max),
                start(r.start_min, smax);
            for (int i = 0; i < r.count; ++i)
            {
                FlowSpec f;
                f.id = next++;
                f.src = pick(rng);
                do
                    f.dst = pick(rng);
                while (f.dst == f.src);
                f.rate = rate(rng);
                f.packet_size = std::round(size(rng));
                f.start_time = start(rng);
                m.flows.push_back(f);
            }
        }
        return m;
    }

    Scenario scenario_from_json(const json &j)
    {
        Reader rd;
        Scenario sc;
        rd.keys(j, "", {"arena", "radio", "mac", "estimator", "cneighbor", "mobility", "protocol", "nodes",
                        "node_count", "flows", "random_flows", "events", "sample_nodes", "duration", "seed",
                        "description"});
        if (!j.is_object())
            rd.finish();

        if (const json *a = rd.object(j, "arena", ""))
        {
            rd.keys(*a, "arena", {"width", "height"});
            rd.num(*a, "width", sc.arena.width, "arena");
            rd.num(*a, "height", sc.arena.height, "arena");
        }
        if (const json *r = rd.object(j, "radio", ""))
        {
            rd.keys(*r, "radio", {"tx_range", "cs_range", "ncs_range", "channel_capacity"});
            rd.num(*r, "tx_range", sc.radio.tx_range, "radio");
            rd.num(*r, "cs_range", sc.radio.cs_range, "radio");
            sc.radio.ncs_range = 2.0 * sc.radio.cs_range;
            rd.num(*r, "ncs_range", sc.radio.ncs_range, "radio");
            rd.num(*r, "channel_capacity", sc.radio.channel_capacity, "radio");
        }
        sc.mac.channel_capacity = sc.radio.channel_capacity;
        if (const json *m = rd.object(j, "mac", ""))
        {
            rd.keys(*m, "mac",
                    {"difs", "sifs", "rts", "cts", "ack", "header_bits", "mean_backoff", "channel_capacity"});
            rd.num(*m, "difs", sc.mac.t_difs, "mac");
            rd.num(*m, "sifs", sc.mac.t_sifs, "mac");
            rd.num(*m, "rts", sc.mac.t_rts, "mac");
            rd.num(*m, "cts", sc.mac.t_cts, "mac");
            rd.num(*m, "ack", sc.mac.t_ack, "mac");
            rd.num(*m, "header_bits", sc.mac.header_bits, "mac");
            rd.num(*m, "mean_backoff", sc.mac.mean_backoff, "mac");
            rd.num(*m, "channel_capacity", sc.mac.channel_capacity, "mac");
        }
        if (const json *c = rd.object(j, "cneighbor", ""))
        {
            rd.keys(*c, "cneighbor", {"ttl", "hello_period", "mode", "k_cs"});
            rd.num(*c, "ttl", sc.cneighbor.ttl, "cneighbor");
            rd.num(*c, "hello_period", sc.cneighbor.hello_period, "cneighbor");
            rd.integer(*c, "k_cs", sc.cneighbor.k_cs, "cneighbor");
            if (c->contains("mode"))
            {
                const auto mode =
                    (*c)["mode"].is_string() ? parse_cneighbor_mode((*c)["mode"].get<std::string>()) : std::nullopt;
                if (mode)
                    sc.cneighbor.mode = *mode;
                else
                    rd.errors.push_back("cneighbor.mode: expected passive, active or both");
            }
        }
        if (const json *m = rd.object(j, "mobility", ""))
        {
            rd.keys(*m, "mobility", {"enabled", "min_speed", "max_speed", "pause", "tick"});
            rd.boolean(*m, "enabled", sc.mobility.enabled, "mobility");
            rd.num(*m, "min_speed", sc.mobility.min_speed, "mobility");
            rd.num(*m, "max_speed", sc.mobility.max_speed, "mobility");
            rd.num(*m, "pause", sc.mobility.pause, "mobility");
            rd.num(*m, "tick", sc.mobility.tick, "mobility");
        }
        if (const json *p = rd.object(j, "protocol", ""))
        {
            rd.keys(*p, "protocol",
                    {"admission_timeout", "soft_ttl", "max_backups", "control_hop_delay", "discovery_timeout",
                     "retry_budget", "retry_interval", "overload_ratio", "control_consumes_airtime"});
            auto &pc = sc.protocol;
            rd.num(*p, "admission_timeout", pc.admission_timeout, "protocol");
            rd.num(*p, "soft_ttl", pc.soft_ttl, "protocol");
            rd.integer(*p, "max_backups", pc.max_backups, "protocol");
            rd.num(*p, "control_hop_delay", pc.control_hop_delay, "protocol");
            rd.num(*p, "discovery_timeout", pc.discovery_timeout, "protocol");
            rd.integer(*p, "retry_budget", pc.retry_budget, "protocol");
            rd.num(*p, "retry_interval", pc.retry_interval, "protocol");
            rd.num(*p, "overload_ratio", pc.overload_ratio, "protocol");
            rd.boolean(*p, "control_consumes_airtime", pc.control_consumes_airtime, "protocol");
        }

        if (const json *ns = rd.array(j, "nodes", ""))
        {
            for (std::size_t i = 0; i < ns->size(); ++i)
            {
                const json &n = (*ns)[i];
                const std::string path = "nodes[" + std::to_string(i) + "]";
                rd.keys(n, path, {"id", "name", "x", "y"});
                NodeInfo info;
                info.id = static_cast<NodeId>(i);
                int id = static_cast<int>(i);
                rd.integer(n, "id", id, path);
                if (id != static_cast<int>(i))
                    rd.errors.push_back(path + ".id: ids must be 0..N-1 in order");
                info.name = std::to_string(i);
                if (n.is_object() && n.contains("name"))
                {
                    if (n["name"].is_string())
                        info.name = n["name"].get<std::string>();
                    else
                        rd.errors.push_back(path + ".name: expected a string");
                }
                if (!n.is_object() || !n.contains("x") || !n.contains("y"))
                    rd.errors.push_back(path + ": x and y are required");
                rd.num(n, "x", info.pos.x, path);
                rd.num(n, "y", info.pos.y, path);
                sc.nodes.push_back(info);
            }
        }
        rd.integer(j, "node_count", sc.node_count, "");
        rd.num(j, "duration", sc.duration, "");
        if (j.contains("seed"))
        {
            if (j["seed"].is_number_unsigned())
                sc.seed = j["seed"].get<std::uint64_t>();
            else
                rd.errors.push_back("seed: expected a non-negative integer");
        }

        const auto names = node_names(sc);

        if (const json *e = rd.object(j, "estimator", ""))
        {
            rd.keys(*e, "estimator", {"alpha", "period", "warmup_periods", "settle_periods", "background"});
            rd.num(*e, "alpha", sc.estimator.alpha, "estimator");
            rd.num(*e, "period", sc.estimator.period, "estimator");
            rd.integer(*e, "warmup_periods", sc.estimator.warmup_periods, "estimator");
            rd.integer(*e, "settle_periods", sc.estimator.settle_periods, "estimator");
            if (const json *bg = rd.object(*e, "background", "estimator"))
            {
                for (const auto &[name, v] : bg->items())
                {
                    const auto id = resolve(json(name), names);
                    if (!id)
                        rd.errors.push_back("estimator.background." + name + ": unknown node");
                    else if (!v.is_number())
                        rd.errors.push_back("estimator.background." + name + ": expected a number");
                    else
                        sc.estimator.background_bps[*id] = v.get<double>();
                }
            }
        }

        if (const json *fs = rd.array(j, "flows", ""))
        {
            for (std::size_t i = 0; i < fs->size(); ++i)
            {
                const json &f = (*fs)[i];
                const std::string path = "flows[" + std::to_string(i) + "]";
                rd.keys(f, path, {"id", "src", "dst", "rate", "packet_size", "start", "stop"});
                if (!f.is_object())
                    continue;
                FlowSpec spec;
                int id = static_cast<int>(i);
                rd.integer(f, "id", id, path);
                spec.id = static_cast<FlowId>(id);
                spec.src = node_ref(rd, f, "src", path, names);
                spec.dst = node_ref(rd, f, "dst", path, names);
                if (!f.contains("rate") || !f.contains("packet_size"))
                    rd.errors.push_back(path + ": rate and packet_size are required");
                rd.num(f, "rate", spec.rate, path);
                rd.num(f, "packet_size", spec.packet_size, path);
                rd.num(f, "start", spec.start_time, path);
                rd.num(f, "stop", spec.stop_time, path);
                sc.flows.push_back(spec);
            }
        }
        if (const json *r = rd.object(j, "random_flows", ""))
        {
            rd.keys(*r, "random_flows", {"count", "rate_min", "rate_max", "size_min", "size_max", "start_min",
                                         "start_max"});
            RandomFlows rf;
            rd.integer(*r, "count", rf.count, "random_flows");
            rd.num(*r, "rate_min", rf.rate_min, "random_flows");
            rd.num(*r, "rate_max", rf.rate_max, "random_flows");
            rd.num(*r, "size_min", rf.size_min, "random_flows");
            rd.num(*r, "size_max", rf.size_max, "random_flows");
            rd.num(*r, "start_min", rf.start_min, "random_flows");
            rd.num(*r, "start_max", rf.start_max, "random_flows");
            sc.random_flows = rf;
        }
        if (const json *es = rd.array(j, "events", ""))
        {
            for (std::size_t i = 0; i < es->size(); ++i)
            {
                const json &e = (*es)[i];
                const std::string path = "events[" + std::to_string(i) + "]";
                rd.keys(e, path, {"time", "type", "node", "x", "y"});
                if (!e.is_object())
                    continue;
                if (e.contains("type") && e["type"] != "move")
                    rd.errors.push_back(path + ".type: only \"move\" is supported");
                MoveEvent ev;
                rd.num(e, "time", ev.time, path);
                ev.node = node_ref(rd, e, "node", path, names);
                rd.num(e, "x", ev.pos.x, path);
                rd.num(e, "y", ev.pos.y, path);
                sc.events.push_back(ev);
            }
        }
        if (const json *ss = rd.array(j, "sample_nodes", ""))
        {
            for (const auto &s : *ss)
            {
                const auto id = resolve(s, names);
                if (!id)
                    rd.errors.push_back("sample_nodes: unknown node " + s.dump());
                else
                    sc.sample_nodes.push_back(*id);
            }
        }

        rd.finish();
        rd.guard("scenario", [&] { sc.validate(); });
        rd.finish();
        return sc;
    }

    json scenario_to_json(const Scenario &sc)
    {
        const auto names = node_names(sc);
        json j;
        j["arena"] = {{"width", sc.arena.width}, {"height", sc.arena.height}};
        j["radio"] = {{"tx_range", sc.radio.tx_range},
                      {"cs_range", sc.radio.cs_range},
                      {"ncs_range", sc.radio.ncs_range},
                      {"channel_capacity", sc.radio.channel_capacity}};
        j["mac"] = {{"difs", sc.mac.t_difs},
                    {"sifs", sc.mac.t_sifs},
                    {"rts", sc.mac.t_rts},
                    {"cts", sc.mac.t_cts},
                    {"ack", sc.mac.t_ack},
                    {"header_bits", sc.mac.header_bits},
                    {"mean_backoff", sc.mac.mean_backoff},
                    {"channel_capacity", sc.mac.channel_capacity}};
        json bg = json::object();
        for (const auto &[id, v] : sc.estimator.background_bps)
            bg[names.at(id)] = v;
        j["estimator"] = {{"alpha", sc.estimator.alpha},
                          {"period", sc.estimator.period},
                          {"warmup_periods", sc.estimator.warmup_periods},
                          {"settle_periods", sc.estimator.settle_periods},
                          {"background", bg}};
        j["cneighbor"] = {{"ttl", sc.cneighbor.ttl},
                          {"hello_period", sc.cneighbor.hello_period},
                          {"mode", std::string(to_string(sc.cneighbor.mode))},
                          {"k_cs", sc.cneighbor.k_cs}};
        j["mobility"] = {{"enabled", sc.mobility.enabled},
                         {"min_speed", sc.mobility.min_speed},
                         {"max_speed", sc.mobility.max_speed},
                         {"pause", sc.mobility.pause},
                         {"tick", sc.mobility.tick}};
        const auto &p = sc.protocol;
        j["protocol"] = {{"admission_timeout", p.admission_timeout},
                         {"soft_ttl", p.soft_ttl},
                         {"max_backups", p.max_backups},
                         {"control_hop_delay", p.control_hop_delay},
                         {"discovery_timeout", p.discovery_timeout},
                         {"retry_budget", p.retry_budget},
                         {"retry_interval", p.retry_interval},
                         {"overload_ratio", p.overload_ratio},
                         {"control_consumes_airtime", p.control_consumes_airtime}};
        if (!sc.nodes.empty())
        {
            j["nodes"] = json::array();
            for (const auto &n : sc.nodes)
                j["nodes"].push_back({{"id", n.id}, {"name", n.name}, {"x", n.pos.x}, {"y", n.pos.y}});
        }
        else
        {
            j["node_count"] = sc.node_count;
        }
        j["flows"] = json::array();
        for (const auto &f : sc.flows)
            j["flows"].push_back({{"id", f.id},
                                  {"src", names.at(f.src)},
                                  {"dst", names.at(f.dst)},
                                  {"rate", f.rate},
                                  {"packet_size", f.packet_size},
                                  {"start", f.start_time},
                                  {"stop", f.stop_time}});
        if (sc.random_flows)
        {
            const auto &r = *sc.random_flows;
            j["random_flows"] = {{"count", r.count},         {"rate_min", r.rate_min},   {"rate_max", r.rate_max},
                                 {"size_min", r.size_min},   {"size_max", r.size_max},   {"start_min", r.start_min},
                                 {"start_max", r.start_max}};
        }
        j["events"] = json::array();
        for (const auto &e : sc.events)
            j["events"].push_back(
                {{"time", e.time}, {"type", "move"}, {"node", names.at(e.node)}, {"x", e.pos.x}, {"y", e.pos.y}});
        j["sample_nodes"] = json::array();
        for (NodeId s : sc.sample_nodes)
            j["sample_nodes"].push_back(names.at(s));
        j["duration"] = sc.duration;
        j["seed"] = sc.seed;
        return j;
    }

    namespace
    {
        json read_json_file(const std::string &path)
        {
            std::ifstream in(path);
            if (!in)
                throw ConfigError("cannot open scenario file: " + path);
            try
            {
                return json::parse(in);
            }
            catch (const json::parse_error &e)
            {
                throw ConfigError(path + ": " + e.what());
            }
        }
    } // namespace

    Scenario load_scenario(const std::string &path)
    {
        const json j = read_json_file(path);
        try
        {
            return scenario_from_json(j);
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(path + ": " + e.what());
        }
    }

    void SweepSpec::validate() const
    {
        if (node_counts.empty())
            throw ConfigError("sweep: node_counts must have at least one point");
        if (replicates < 1)
            throw ConfigError("sweep: replicates must be >= 1");
        if (variants.empty())
            throw ConfigError("sweep: at least one variant is required");
        for (int n : node_counts)
            if (n < 2)
                throw ConfigError("sweep: node counts must be >= 2");
    }

    SweepSpec sweep_from_json(const json &j, const std::string &base_dir)
    {
        Reader rd;
        SweepSpec sp;
        rd.keys(j, "sweep", {"scenario", "node_counts", "replicates", "variants", "base_seed", "duration"});
        rd.finish();

        if (!j.contains("scenario"))
            throw ConfigError("sweep.scenario: required");
        if (j["scenario"].is_string())
        {
            std::filesystem::path p = j["scenario"].get<std::string>();
            if (p.is_relative())
                p = std::filesystem::path(base_dir) / p;
            sp.base = load_scenario(p.string());
        }
        else
        {
            sp.base = scenario_from_json(j["scenario"]);
        }
        if (const json *nc = rd.array(j, "node_counts", "sweep"))
            for (const auto &v : *nc)
            {
                if (v.is_number_integer())
                    sp.node_counts.push_back(v.get<int>());
                else
                    rd.errors.push_back("sweep.node_counts: expected integers");
            }
        rd.integer(j, "replicates", sp.replicates, "sweep");
        if (const json *vs = rd.array(j, "variants", "sweep"))
            for (const auto &v : *vs)
            {
                const auto var = v.is_string() ? parse_variant(v.get<std::string>()) : std::nullopt;
                if (var)
                    sp.variants.push_back(*var);
                else
                    rd.errors.push_back("sweep.variants: unknown variant " + v.dump() + " (valid: " +
                                        valid_variant_names() + ")");
            }
        else
            sp.variants.assign(kAllVariants.begin(), kAllVariants.end());
        if (j.contains("base_seed"))
        {
            if (j["base_seed"].is_number_unsigned())
                sp.base_seed = j["base_seed"].get<std::uint64_t>();
            else
                rd.errors.push_back("sweep.base_seed: expected a non-negative integer");
        }
        else
        {
            sp.base_seed = sp.base.seed;
        }
        rd.num(j, "duration", sp.base.duration, "sweep");
        rd.finish();
        sp.validate();
        return sp;
    }

    SweepSpec load_sweep(const std::string &path)
    {
        const json j = read_json_file(path);
        return sweep_from_json(j, std::filesystem::path(path).parent_path().string());
    }

} // namespace mbmp
