// Acceptance checks 1-9. Usage: mbmp_acceptance [criterion...]; no argument runs all.

#include "mbmp/analysis.hpp"
#include "mbmp/contention.hpp"
#include "mbmp/scenario.hpp"
#include "mbmp/simulator.hpp"
#include "mbmp/sweep.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace mbmp;
using nlohmann::json;

namespace
{
    const std::string kDir = MBMP_SCENARIO_DIR;

    // Collects sub-check results for one criterion.
    struct Report
    {
        bool ok = true;
        std::vector<std::string> lines;

        void check(bool cond, const std::string &what)
        {
            ok = ok && cond;
            lines.push_back(std::string(cond ? "  ok   " : "  FAIL ") + what);
        }
    };

    std::string fmt(const char *f, double a)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, f, a);
        return buf;
    }

    NodeId node_named(const MetricsReport &r, const std::string &name)
    {
        for (std::size_t i = 0; i < r.node_names.size(); ++i)
            if (r.node_names[i] == name)
                return static_cast<NodeId>(i);
        throw std::runtime_error("no node named " + name);
    }

    const FlowResult &flow_of(const MetricsReport &r, FlowId id)
    {
        for (const auto &f : r.flows)
            if (f.spec.id == id)
                return f;
        throw std::runtime_error("no flow " + std::to_string(id));
    }

    // Mean achieved/offered over full windows starting at or after `from`.
    double ratio_since(const FlowResult &f, double from)
    {
        double achieved = 0.0, offered = 0.0;
        for (const auto &w : f.windows)
            if (w.full() && w.start >= from - 1e-9)
            {
                achieved += w.achieved_bps;
                offered += w.offered_bps;
            }
        return offered > 0.0 ? achieved / offered : 0.0;
    }

    std::vector<json> parse_trace(const std::string &text)
    {
        std::vector<json> out;
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);)
            if (!line.empty())
                out.push_back(json::parse(line));
        return out;
    }

    // ------------------------------------------------------------------ 1
    Report fig3_table()
    {
        Report rep;
        const Scenario sc = load_scenario(kDir + "/fig3.json");
        const MetricsReport r = run_scenario(sc, ProtocolVariant::DsrBaseline, sc.seed);
        const NodeId a = node_named(r, "A"), c = node_named(r, "C"), e = node_named(r, "E");

        auto at = [&](NodeId n, double t) -> const BandwidthSample & {
            const BandwidthSample *best = nullptr;
            for (const auto &s : r.samples)
                if (s.node == n && s.t <= t + 1e-9 && (!best || s.t > best->t))
                    best = &s;
            if (!best)
                throw std::runtime_error("no sample");
            return *best;
        };
        auto near = [&](NodeId n, double t, double mbps, const std::string &label) {
            const double got = at(n, t).local_estimate / 1e6;
            rep.check(std::abs(got - mbps) <= 0.05,
                      label + fmt(" = %.3f Mb/s", got) + fmt(" (expect %.2f +- 0.05)", mbps));
        };
        // Epochs: before Flow 1 traffic settles in, then just before Flow 2, Flow 3 and the end.
        near(a, 0.0, 2.0, "t=0 A");
        near(c, 0.0, 2.0, "t=0 C");
        near(e, 0.0, 2.0, "t=0 E");
        near(a, 39.0, 1.07, "t=39 A");
        near(c, 39.0, 1.07, "t=39 C");
        near(e, 39.0, 2.0, "t=39 E");
        near(a, 79.0, 0.14, "t=79 A");
        near(c, 79.0, 0.14, "t=79 C");
        near(e, 79.0, 1.07, "t=79 E");
        near(a, 119.0, 0.34, "t=119 A");
        near(e, 119.0, 0.34, "t=119 E");
        const auto &cs = at(c, 119.0);
        rep.check(cs.congested && cs.local_estimate <= 0.05e6,
                  "t=119 C congested" + fmt(" (%.3f Mb/s)", cs.local_estimate / 1e6));
        return rep;
    }

    // ------------------------------------------------------------------ 2
    Report admission_divergence()
    {
        Report rep;
        const Scenario sc = load_scenario(kDir + "/fig3.json");
        const double flow3_start = sc.flows.at(2).start_time;

        const MetricsReport lo = run_scenario(sc, ProtocolVariant::LocalOnlyBaseline, sc.seed);
        rep.check(flow_of(lo, 3).ever_admitted, "local-only admits Flow 3");
        rep.check(lo.n_f < 0.0, "local-only N_f" + fmt(" = %.0f b/s < 0", lo.n_f));
        const double f2 = ratio_since(flow_of(lo, 2), flow3_start);
        rep.check(f2 <= 0.85, "local-only Flow 2 ratio after Flow 3 starts" + fmt(" = %.3f <= 0.85", f2));

        for (auto v : {ProtocolVariant::MbmpMultiHop, ProtocolVariant::MbmpPower, ProtocolVariant::MbmpCs})
        {
            const MetricsReport r = run_scenario(sc, v, sc.seed);
            const std::string name(to_string(v));
            rep.check(!flow_of(r, 3).ever_admitted, name + " rejects Flow 3");
            for (FlowId f : {1u, 2u})
            {
                const double ratio = flow_of(r, f).steady_ratio();
                rep.check(ratio >= 0.99,
                          name + " Flow " + std::to_string(f) + fmt(" ratio = %.4f >= 0.99", ratio));
            }
            rep.check(std::abs(r.n_f) <= 1000.0, name + fmt(" N_f = %.0f b/s (|N_f| <= 1 kb/s)", r.n_f));
        }
        return rep;
    }

    // ------------------------------------------------------------------ 3
    Report bandwidth_anchor()
    {
        Report rep;
        FlowSpec f;
        f.rate = 133;
        f.packet_size = 512;
        f.dst = 1;
        const double w = flow_bandwidth(MacTimingConfig{}, f);
        rep.check(w >= 837e3 && w <= 1023e3, fmt("W(133 pkt/s, 512 B) = %.0f b/s in [837k, 1023k]", w));
        return rep;
    }

    // ------------------------------------------------------------------ 4
    Report golden_trace()
    {
        Report rep;
        {
            const Scenario sc = load_scenario(kDir + "/walkthrough.json");
            std::ostringstream trace;
            const MetricsReport r = run_scenario(sc, ProtocolVariant::MbmpMultiHop, sc.seed, &trace);
            const double w = flow_bandwidth(sc.mac, sc.flows.at(0));
            const auto recs = parse_trace(trace.str());
            const NodeId A = node_named(r, "A"), B = node_named(r, "B"), C = node_named(r, "C");

            std::vector<std::pair<NodeId, double>> partial, full;
            std::size_t last_partial = 0, first_full = recs.size();
            std::map<NodeId, int> originated;
            bool admitted = false;
            for (std::size_t i = 0; i < recs.size(); ++i)
            {
                const auto &x = recs[i];
                if (x["event"] == "decision" && x["phase"] == "partial")
                {
                    partial.push_back({x["node"], x["bc_bps"].get<double>() / w});
                    last_partial = i;
                }
                if (x["event"] == "decision" && x["phase"] == "full")
                {
                    full.push_back({x["node"], x["bc_bps"].get<double>() / w});
                    first_full = std::min(first_full, i);
                }
                if (x["event"] == "send" && x["kind"] == "AdmissionRequest" && x["node"] == x["originator"])
                    ++originated[x["node"].get<NodeId>()];
                if (x["event"] == "flow" && x["state"] == "admitted")
                    admitted = true;
            }
            auto multiples = [](const std::vector<std::pair<NodeId, double>> &v, std::size_t n) {
                std::ostringstream s;
                for (std::size_t i = 0; i < std::min(n, v.size()); ++i)
                    s << (i ? " " : "") << v[i].first << ':' << fmt("%.3fW", v[i].second);
                return s.str();
            };
            auto is = [](const std::pair<NodeId, double> &p, NodeId n, double k) {
                return p.first == n && std::abs(p.second - k) < 1e-4;
            };
            rep.check(partial.size() >= 3 && is(partial[0], A, 1) && is(partial[1], B, 2) && is(partial[2], C, 2),
                      "partial B_c A:1W B:2W C:2W (got " + multiples(partial, 3) + ")");
            rep.check(full.size() == 3 && is(full[0], C, 3) && is(full[1], B, 3) && is(full[2], A, 3),
                      "full B_c C:3W B:3W A:3W (got " + multiples(full, 3) + ")");
            rep.check(last_partial < first_full, "partial decisions precede full decisions");
            rep.check(originated == std::map<NodeId, int>{{A, 1}, {B, 1}, {C, 1}},
                      "one AdmissionRequest originated by each of C, B, A");
            rep.check(admitted && flow_of(r, 1).ever_admitted, "terminal state admitted");
        }
        {
            const Scenario sc = load_scenario(kDir + "/walkthrough_reject.json");
            std::ostringstream trace;
            const MetricsReport r = run_scenario(sc, ProtocolVariant::MbmpMultiHop, sc.seed, &trace);
            const NodeId A = node_named(r, "A"), C = node_named(r, "C"), D = node_named(r, "D");
            bool reject_from_a = false, failure_c_to_d = false;
            for (const auto &x : parse_trace(trace.str()))
            {
                if (x["event"] == "send" && x["kind"] == "AdmissionReject" && x["node"] == A)
                    reject_from_a = true;
                if (x["event"] == "send" && x["kind"] == "AdmissionFailure" && x["node"] == C && x["peer"] == D)
                    failure_c_to_d = true;
            }
            rep.check(reject_from_a, "rejection variant: A rejects C's admission request");
            rep.check(failure_c_to_d, "rejection variant: AdmissionFailure sent C -> D");
            rep.check(!flow_of(r, 1).ever_admitted, "rejection variant: flow never admitted");
        }
        return rep;
    }

    // ------------------------------------------------------------------ 5
    Report overhead_ratio()
    {
        Report rep;
        const double r = 250.0;
        const double rho3 = 3.0 / (std::numbers::pi * r * r);
        const double a = theta_analytic(DensityField::uniform(rho3), r);
        rep.check(std::abs(a - 1.0) <= 1e-9, fmt("(a) analytic, uniform m=3: %.12f", a));

        const double lb = theta_lower_bound(15.3, 1e6, r);
        rep.check(lb >= 0.97 && lb <= 1.03, fmt("(b) lower bound at 15.3 nodes/km^2: %.4f", lb));

        std::mt19937_64 rng(2025);
        const double rho10 = 10.0 / (std::numbers::pi * r * r);
        const auto mc = theta_monte_carlo(rho10, r, 20000, rng);
        const double a10 = theta_analytic(DensityField::uniform(rho10), r);
        rep.check(std::abs(mc.ratio - a10) <= 3 * mc.stderr_,
                  fmt("(c) monte carlo m=10, 20000 trials: %.4f", mc.ratio) + fmt(" vs analytic %.4f", a10) +
                      fmt(" (stderr %.4f)", mc.stderr_));

        int below = 0;
        std::gamma_distribution<double> shape(0.7, 1.0);
        for (int i = 0; i < 20; ++i)
        {
            DensityField f;
            f.cell_area = 50.0 * 50.0;
            for (int c = 0; c < 400; ++c)
                f.rho.push_back(shape(rng) * 20e-6);
            const double area = f.cell_area * static_cast<double>(f.rho.size());
            if (theta_analytic(f, r) < theta_lower_bound(f.total_nodes(), area, r))
                ++below;
        }
        rep.check(below == 0, "(d) 20 random fields, analytic >= lower bound: " + std::to_string(below) + " below");
        return rep;
    }

    // ------------------------------------------------------------------ 6
    Report contention_oracle()
    {
        Report rep;
        std::mt19937_64 rng(6);
        std::uniform_int_distribution<int> size(2, 15);
        std::uniform_real_distribution<double> coord(0.0, 1000.0);
        int mismatches = 0, checks = 0;
        for (int t = 0; t < 200; ++t)
        {
            const int n = size(rng);
            std::vector<NodeInfo> nodes;
            for (int i = 0; i < n; ++i)
            {
                const double x = coord(rng);
                nodes.push_back(NodeInfo{static_cast<NodeId>(i), "n" + std::to_string(i), {x, coord(rng)}});
            }
            const Topology topo(nodes, RadioConfig{}, Arena{});
            std::vector<NodeId> ids(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                ids[static_cast<std::size_t>(i)] = static_cast<NodeId>(i);
            std::shuffle(ids.begin(), ids.end(), rng);
            const std::size_t len = 2 + rng() % static_cast<std::size_t>(n - 1);
            const RouteRecord route{{ids.begin(), ids.begin() + static_cast<long>(len)}, true};
            for (NodeId q = 0; q < topo.size(); ++q)
            {
                CNeighborSet s(q);
                for (NodeId c : topo.cneighbors(q))
                    s.learn(c, 1, 0.0);
                int oracle = 0;
                for (std::size_t i = 0; i + 1 < route.hops.size(); ++i)
                {
                    const NodeId tx = route.hops[i];
                    if (tx == q || topo.distance(tx, q) <= topo.radio().cs_range)
                        ++oracle;
                }
                ++checks;
                if (contention_count(route, q, s) != oracle)
                    ++mismatches;
            }
        }
        rep.check(mismatches == 0,
                  std::to_string(mismatches) + " mismatches over " + std::to_string(checks) + " evaluations");
        return rep;
    }

    // ------------------------------------------------------------------ 7
    Report sweep_properties()
    {
        Report rep;
        const SweepSpec spec = load_sweep(kDir + "/acceptance_sweep.json");
        const auto rows = run_sweep(spec);

        struct Mean
        {
            double n_f = 0, throughput = 0, offered = 0, control = 0, delay = 0;
            int count = 0;
        };
        std::map<std::pair<int, ProtocolVariant>, Mean> m;
        int failed = 0;
        for (const auto &row : rows)
        {
            if (!row.ok)
            {
                ++failed;
                continue;
            }
            auto &x = m[{row.node_count, row.variant}];
            x.n_f += row.report.n_f;
            x.throughput += row.report.total_throughput;
            x.offered += row.report.attempted_load;
            x.control += static_cast<double>(row.report.control_total());
            x.delay += row.report.avg_per_hop_delay;
            ++x.count;
        }
        for (auto &[k, x] : m)
        {
            x.n_f /= x.count;
            x.throughput /= x.count;
            x.offered /= x.count;
            x.control /= x.count;
            x.delay /= x.count;
        }
        rep.check(failed == 0 && rows.size() == 75, std::to_string(rows.size()) + " rows, " +
                                                        std::to_string(failed) + " failed");

        const std::vector<ProtocolVariant> mbmp{ProtocolVariant::MbmpMultiHop, ProtocolVariant::MbmpPower,
                                                ProtocolVariant::MbmpCs};
        const auto dsr = ProtocolVariant::DsrBaseline, lo = ProtocolVariant::LocalOnlyBaseline;

        for (int n : spec.node_counts)
        {
            const Mean &d = m[{n, dsr}], &l = m[{n, lo}];
            for (auto v : mbmp)
            {
                const Mean &x = m[{n, v}];
                const std::string tag = std::to_string(n) + " nodes " + std::string(to_string(v));
                rep.check(x.n_f >= l.n_f && x.n_f >= d.n_f && std::abs(x.n_f) <= 0.02 * x.offered,
                          "(a) " + tag + fmt(": N_f %.0f", x.n_f) + fmt(" vs local-only %.0f", l.n_f) +
                              fmt(", dsr %.0f", d.n_f) + fmt(", 2%% of offered = %.0f", 0.02 * x.offered));
                rep.check(x.throughput >= l.throughput,
                          "(b) " + tag + fmt(": throughput %.0f", x.throughput) +
                              fmt(" vs local-only %.0f", l.throughput));
                rep.check(x.delay <= d.delay && x.delay <= l.delay,
                          "(d) " + tag + fmt(": per-hop delay %.1f ms", x.delay * 1e3) +
                              fmt(" vs dsr %.1f", d.delay * 1e3) + fmt(", local-only %.1f", l.delay * 1e3));
            }
        }
        const int dense = *std::max_element(spec.node_counts.begin(), spec.node_counts.end());
        const double c_dsr = m[{dense, dsr}].control, c_mh = m[{dense, ProtocolVariant::MbmpMultiHop}].control,
                     c_pw = m[{dense, ProtocolVariant::MbmpPower}].control,
                     c_cs = m[{dense, ProtocolVariant::MbmpCs}].control;
        rep.check(c_dsr >= c_mh && c_mh >= c_pw && c_pw >= c_cs,
                  "(c) control messages at " + std::to_string(dense) + fmt(" nodes: dsr %.0f", c_dsr) +
                      fmt(" >= multihop %.0f", c_mh) + fmt(" >= power %.0f", c_pw) + fmt(" >= cs %.0f", c_cs));
        return rep;
    }

    // ------------------------------------------------------------------ 8
    Report estimator_convergence()
    {
        Report rep;
        for (double f : {0.0, 0.25, 0.5, 1.0})
            for (double start : {0.0, 2e6})
            {
                BandwidthEstimator e;
                e.alpha = 0.5;
                e.current_estimate = start;
                for (int i = 0; i < 10; ++i)
                    e = update_estimator(e, f * e.period);
                const double err = std::abs(e.current_estimate - f * e.channel_capacity);
                rep.check(err <= 0.01 * e.channel_capacity,
                          fmt("f=%.2f", f) + fmt(", start %.0f: ", start) +
                              fmt("estimate %.0f", e.current_estimate) + fmt(" (error %.0f)", err));
            }
        return rep;
    }

    // ------------------------------------------------------------------ 9
    Report determinism()
    {
        Report rep;
        std::vector<std::string> files;
        for (const auto &entry : std::filesystem::directory_iterator(kDir))
        {
            const std::string name = entry.path().filename().string();
            if (entry.path().extension() == ".json" && name.find("_sweep") == std::string::npos)
                files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        for (const auto &path : files)
        {
            const Scenario sc = load_scenario(path);
            auto once = [&] {
                std::ostringstream trace;
                const MetricsReport r = run_scenario(sc, ProtocolVariant::MbmpMultiHop, sc.seed, &trace);
                return std::pair{windows_csv(r), trace.str()};
            };
            const auto a = once(), b = once();
            rep.check(a.first == b.first && a.second == b.second && !a.second.empty(),
                      std::filesystem::path(path).filename().string() + ": csv " +
                          std::to_string(a.first.size()) + " B, trace " + std::to_string(a.second.size()) +
                          " B identical");
        }
        return rep;
    }

    struct Criterion
    {
        int id;
        const char *title;
        std::function<Report()> run;
    };

} // namespace

int main(int argc, char **argv)
{
    const std::vector<Criterion> all{
        {1, "fig3 table under dsr", fig3_table},
        {2, "admission divergence on the six-node line", admission_divergence},
        {3, "bandwidth mapping anchor", bandwidth_anchor},
        {4, "four-node golden trace", golden_trace},
        {5, "overhead-ratio mathematics", overhead_ratio},
        {6, "contention-count oracle", contention_oracle},
        {7, "desk-scale sweep properties", sweep_properties},
        {8, "estimator convergence", estimator_convergence},
        {9, "determinism of bundled scenarios", determinism},
    };

    std::set<int> wanted;
    for (int i = 1; i < argc; ++i)
        wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto &c : all)
    {
        if (!wanted.empty() && !wanted.contains(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Report rep;
        try
        {
            rep = c.run();
        }
        catch (const std::exception &e)
        {
            rep.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (rep.ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title
                  << fmt(" (%.2f s)", secs) << "\n";
        for (const auto &l : rep.lines)
            std::cout << l << "\n";
        if (!rep.ok)
            ++failures;
    }
    return failures == 0 ? 0 : 1;
}
