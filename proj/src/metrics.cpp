#include "mbmp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mbmp
{
    using nlohmann::json;

    namespace
    {
        constexpr double kFalseAdmissionRatio = 0.95;

        std::int64_t us(double t)
        {
            return std::llround(t * 1e6);
        }

        std::int64_t bps(double v)
        {
            return std::llround(v);
        }

        /// Mean ratio over full windows inside [t0, t1).
        double ratio_between(const FlowResult &f, double t0, double t1)
        {
            double sum = 0.0;
            int n = 0;
            for (const auto &w : f.windows)
                if (w.full() && w.start >= t0 - 1e-9 && w.start + w.length <= t1 + 1e-9 && w.offered_bps > 0.0)
                {
                    sum += w.achieved_bps / w.offered_bps;
                    ++n;
                }
            return n ? sum / n : -1.0;
        }
    } // namespace

    std::string_view to_string(FlowStatus s) noexcept
    {
        switch (s)
        {
        case FlowStatus::Pending:
            return "pending";
        case FlowStatus::Admitted:
            return "admitted";
        case FlowStatus::Rejected:
            return "rejected";
        case FlowStatus::Broken:
            return "broken";
        case FlowStatus::Finished:
            return "finished";
        }
        return "?";
    }

    double FlowResult::steady_ratio() const
    {
        return ratio_between(*this, -1e300, 1e300);
    }

    double FlowResult::steady_throughput() const
    {
        double sum = 0.0;
        int n = 0;
        for (const auto &w : windows)
            if (w.full())
            {
                sum += w.achieved_bps;
                ++n;
            }
        return n ? sum / n : 0.0;
    }

    std::uint64_t MetricsReport::control_total() const
    {
        std::uint64_t t = 0;
        for (auto c : control)
            t += c;
        return t;
    }

    void compute_metrics(MetricsReport &r)
    {
        r.n_f = 0.0;
        r.total_throughput = 0.0;
        r.attempted_load = 0.0;
        r.admitted = r.rejected = r.broken = r.false_admissions = 0;

        double delay_sum = 0.0;
        double delay_weight = 0.0;
        std::vector<double> admissions;

        for (const auto &f : r.flows)
        {
            if (f.status != FlowStatus::Pending || f.ever_admitted || !f.windows.empty())
                r.attempted_load += f.spec.offered_bps();
            if (f.status == FlowStatus::Rejected)
                ++r.rejected;
            if (f.status == FlowStatus::Broken)
                ++r.broken;
            if (!f.ever_admitted)
                continue;
            ++r.admitted;
            admissions.push_back(f.admitted_at);
            bool any = false;
            for (const auto &w : f.windows)
                if (w.full())
                {
                    any = true;
                    delay_sum += w.delay_s;
                    delay_weight += 1.0;
                }
            if (any)
            {
                const double th = f.steady_throughput();
                r.total_throughput += th;
                r.n_f += th - f.spec.offered_bps();
            }
        }
        r.avg_per_hop_delay = delay_weight > 0.0 ? delay_sum / delay_weight : 0.0;

        std::sort(admissions.begin(), admissions.end());
        for (const auto &x : r.flows)
        {
            if (!x.ever_admitted)
                continue;
            const double own = x.steady_ratio();
            bool is_false = own >= 0.0 && own < kFalseAdmissionRatio;
            if (!is_false)
            {
                // Did admitting x push an earlier admitted flow below the threshold?
                const auto pos = std::upper_bound(admissions.begin(), admissions.end(), x.admitted_at);
                const double next = pos == admissions.end() ? 1e300 : *pos;
                double prev = -1e300;
                for (double t : admissions)
                    if (t < x.admitted_at)
                        prev = t;
                for (const auto &y : r.flows)
                {
                    if (&y == &x || !y.ever_admitted || y.admitted_at >= x.admitted_at)
                        continue;
                    const double before = ratio_between(y, std::max(prev, y.admitted_at), x.admitted_at);
                    const double after = ratio_between(y, x.admitted_at, next);
                    if (before >= kFalseAdmissionRatio && after >= 0.0 && after < kFalseAdmissionRatio)
                        is_false = true;
                }
            }
            if (is_false)
                ++r.false_admissions;
        }
    }

    std::string windows_csv_header()
    {
        return "flow,window_start_us,status,carried_us,offered_bps,achieved_bps,delay_us,hops\n";
    }

    std::string windows_csv(const MetricsReport &r)
    {
        std::ostringstream out;
        out << windows_csv_header();
        for (const auto &f : r.flows)
            for (const auto &w : f.windows)
                out << f.spec.id << ',' << us(w.start) << ',' << to_string(f.status) << ',' << us(w.carried) << ','
                    << bps(w.offered_bps) << ',' << bps(w.achieved_bps) << ',' << us(w.delay_s) << ',' << w.hops
                    << '\n';
        return out.str();
    }

    json summary_json(const MetricsReport &r)
    {
        json j;
        j["variant"] = std::string(to_string(r.variant));
        j["seed"] = r.seed;
        j["duration_us"] = us(r.duration);
        j["n_f_bps"] = bps(r.n_f);
        j["total_throughput_bps"] = bps(r.total_throughput);
        j["attempted_load_bps"] = bps(r.attempted_load);
        j["avg_per_hop_delay_us"] = us(r.avg_per_hop_delay);
        j["admitted"] = r.admitted;
        j["rejected"] = r.rejected;
        j["broken"] = r.broken;
        j["false_admissions"] = r.false_admissions;
        json ctrl = json::object();
        for (std::size_t k = 0; k < kMessageKinds; ++k)
            ctrl[std::string(to_string(static_cast<MessageKind>(k)))] = r.control[k];
        j["control_messages"] = ctrl;
        j["control_total"] = r.control_total();

        json flows = json::array();
        for (const auto &f : r.flows)
        {
            json route = json::array();
            for (NodeId n : f.route.hops)
                route.push_back(r.node_names.at(n));
            json jf = {{"id", f.spec.id},
                       {"src", r.node_names.at(f.spec.src)},
                       {"dst", r.node_names.at(f.spec.dst)},
                       {"status", std::string(to_string(f.status))},
                       {"ever_admitted", f.ever_admitted},
                       {"offered_bps", bps(f.spec.offered_bps())},
                       {"w_bps", bps(f.w)},
                       {"throughput_bps", bps(f.steady_throughput())},
                       {"route", route}};
            const double ratio = f.steady_ratio();
            jf["ratio_ppm"] = ratio < 0.0 ? -1 : std::llround(ratio * 1e6);
            if (f.ever_admitted)
                jf["admitted_at_us"] = us(f.admitted_at);
            if (!f.reason.empty())
                jf["reason"] = f.reason;
            flows.push_back(jf);
        }
        j["flows"] = flows;

        json samples = json::array();
        for (const auto &s : r.samples)
            samples.push_back({{"t_us", us(s.t)},
                               {"node", r.node_names.at(s.node)},
                               {"local_bps", bps(s.local_truth)},
                               {"estimate_bps", bps(s.local_estimate)},
                               {"neighbor_estimate_bps", bps(s.neighbor_estimate)},
                               {"congested", s.congested}});
        j["bandwidth_samples"] = samples;
        return j;
    }

} // namespace mbmp
