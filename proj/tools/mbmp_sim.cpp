#include "mbmp/analysis.hpp"
#include "mbmp/scenario.hpp"
#include "mbmp/simulator.hpp"
#include "mbmp/sweep.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace mbmp;
using nlohmann::json;

namespace
{
    constexpr int kConfigError = 2;

    void write_text(const std::string &path, const std::string &text)
    {
        if (path.empty() || path == "-")
        {
            std::cout << text;
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ConfigError("cannot write " + path);
        out << text;
    }

    ProtocolVariant variant_or_throw(const std::string &name)
    {
        const auto v = parse_variant(name);
        if (!v)
            throw ConfigError("unknown variant '" + name + "'; valid variants: " + valid_variant_names());
        return *v;
    }

    struct RunArgs
    {
        std::string scenario;
        std::string variant = "mbmp-multihop";
        std::optional<std::uint64_t> seed;
        std::string out;
        std::string trace;
        std::string csv;
        std::string format = "json";
    };

    int cmd_run(const RunArgs &a)
    {
        const Scenario sc = load_scenario(a.scenario);
        const ProtocolVariant v = variant_or_throw(a.variant);
        const std::uint64_t seed = a.seed.value_or(sc.seed);

        std::ofstream trace_file;
        std::ostream *trace = nullptr;
        if (!a.trace.empty())
        {
            trace_file.open(a.trace, std::ios::binary);
            if (!trace_file)
                throw ConfigError("cannot write trace file " + a.trace);
            trace = &trace_file;
        }
        const MetricsReport r = run_scenario(sc, v, seed, trace);
        if (!a.csv.empty())
            write_text(a.csv, windows_csv(r));
        if (a.format == "csv")
            write_text(a.out, windows_csv(r));
        else
            write_text(a.out, summary_json(r).dump(2) + "\n");
        return 0;
    }

    struct ThetaArgs
    {
        std::string density;
        double r = 250.0;
        std::string arena = "1000x1000";
        int trials = 10000;
        std::uint64_t seed = 1;
        double q = 1.0;
    };

    Arena parse_arena(const std::string &s)
    {
        const auto x = s.find('x');
        Arena a;
        try
        {
            if (x == std::string::npos)
                throw std::invalid_argument(s);
            std::size_t used = 0;
            a.width = std::stod(s.substr(0, x), &used);
            if (used != x)
                throw std::invalid_argument(s);
            const std::string h = s.substr(x + 1);
            a.height = std::stod(h, &used);
            if (used != h.size())
                throw std::invalid_argument(s);
        }
        catch (const std::exception &)
        {
            throw ConfigError("malformed arena '" + s + "', expected WIDTHxHEIGHT");
        }
        a.validate();
        return a;
    }

    int cmd_theta(const ThetaArgs &a)
    {
        if (!(a.r > 0.0) || a.trials < 1)
            throw ConfigError("--r must be positive and --trials >= 1");
        std::mt19937_64 rng(a.seed);
        json out;
        const std::string prefix = "uniform:";
        if (a.density.rfind(prefix, 0) == 0)
        {
            const std::string num = a.density.substr(prefix.size());
            double rho = 0.0;
            try
            {
                std::size_t used = 0;
                rho = std::stod(num, &used);
                if (used != num.size() || !(rho > 0.0))
                    throw std::invalid_argument(num);
            }
            catch (const std::exception &)
            {
                throw ConfigError("malformed density '" + a.density + "', expected uniform:<nodes per m^2>");
            }
            const Arena arena = parse_arena(a.arena);
            const auto mc = theta_monte_carlo(rho, a.r, a.trials, rng);
            out["analytic"] = theta_analytic(DensityField::uniform(rho), a.r, a.q);
            out["lower_bound"] = theta_lower_bound(rho * arena.area(), arena.area(), a.r);
            out["monte_carlo"] = mc.ratio;
            out["stderr"] = mc.stderr_;
            out["mean_neighbors"] = std::numbers::pi * a.r * a.r * rho;
        }
        else
        {
            const Scenario sc = load_scenario(a.density);
            const Materialized m = materialize(sc, sc.seed);
            std::vector<Position> pts;
            for (const auto &n : m.nodes)
                pts.push_back(n.pos);
            const auto mc = theta_monte_carlo(pts, a.r, a.trials, rng);
            out["analytic"] = theta_analytic(empirical_density(pts, sc.arena, a.r), a.r, a.q);
            out["lower_bound"] = theta_lower_bound(static_cast<double>(pts.size()), sc.arena.area(), a.r);
            out["monte_carlo"] = mc.ratio;
            out["stderr"] = mc.stderr_;
            out["isolated_trials"] = mc.isolated;
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    int cmd_validate(const std::vector<std::string> &paths)
    {
        int bad = 0;
        for (const auto &p : paths)
        {
            try
            {
                const Scenario sc = load_scenario(p);
                const Scenario again = scenario_from_json(scenario_to_json(sc));
                if (!(again == sc))
                    throw ConfigError(p + ": serialization round trip changed the scenario");
                std::cout << p << ": ok\n";
            }
            catch (const ConfigError &e)
            {
                std::cerr << e.what() << "\n";
                ++bad;
            }
        }
        return bad ? kConfigError : 0;
    }

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"MBMP admission-control simulator"};
    app.require_subcommand(1);

    RunArgs run;
    auto *run_cmd = app.add_subcommand("run", "Run one scenario");
    run_cmd->add_option("--scenario", run.scenario, "Scenario JSON file")->required();
    run_cmd->add_option("--variant", run.variant, "mbmp-multihop, mbmp-power, mbmp-cs, dsr or local-only");
    run_cmd->add_option("--seed", run.seed, "Override the scenario seed");
    run_cmd->add_option("--out", run.out, "Output file (default stdout)");
    run_cmd->add_option("--trace", run.trace, "Write a JSONL protocol trace here");
    run_cmd->add_option("--csv", run.csv, "Write the per-window flow CSV here");
    run_cmd->add_option("--format", run.format, "Output format for --out")->check(CLI::IsMember({"csv", "json"}));

    std::string sweep_path, sweep_out;
    unsigned sweep_threads_opt = 0;
    auto *sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
    sweep_cmd->add_option("spec,--spec", sweep_path, "Sweep spec JSON file")->required();
    sweep_cmd->add_option("--out", sweep_out, "CSV output file (default stdout)");
    sweep_cmd->add_option("--threads", sweep_threads_opt, "Worker threads (default MBMP_SIM_THREADS or all cores)");

    ThetaArgs theta;
    auto *analyze_cmd = app.add_subcommand("analyze", "Overhead analysis");
    analyze_cmd->require_subcommand(1);
    auto *theta_cmd = analyze_cmd->add_subcommand("theta", "Overhead ratio of two-hop flooding to a 2r broadcast");
    theta_cmd->add_option("--density", theta.density, "uniform:<nodes/m^2> or a scenario file")->required();
    theta_cmd->add_option("--r", theta.r, "Transmission range in meters");
    theta_cmd->add_option("--arena", theta.arena, "Arena WIDTHxHEIGHT for the uniform lower bound");
    theta_cmd->add_option("--trials", theta.trials, "Monte-Carlo trials");
    theta_cmd->add_option("--seed", theta.seed, "RNG seed");
    theta_cmd->add_option("--q", theta.q, "Request rate per node");

    std::vector<std::string> validate_paths;
    auto *validate_cmd = app.add_subcommand("validate", "Validate scenario files");
    validate_cmd->add_option("--scenario,scenarios", validate_paths, "Scenario files")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return kConfigError;
    }

    try
    {
        if (*run_cmd)
            return cmd_run(run);
        if (*sweep_cmd)
        {
            const SweepSpec spec = load_sweep(sweep_path);
            const auto rows = run_sweep(spec, sweep_threads_opt);
            write_text(sweep_out, sweep_csv(rows));
            return 0;
        }
        if (*theta_cmd)
            return cmd_theta(theta);
        if (*validate_cmd)
            return cmd_validate(validate_paths);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
