// SPDX-License-Identifier: Apache-2.0
//
// faisac run <config.json> | sweep <spec.json> | beampattern <solution.json>
//
// Exit status: 0 when every requested point produced a feasible solution,
// 1 when some point is infeasible, 2 on usage, configuration or I/O errors.

#include "faisac/sweep.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    using namespace faisac;

    // Writes to the given path, or standard output when it is empty.
    void emit(const std::string &path, const std::string &text)
    {
        if (path.empty())
        {
            std::cout << text;
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ConfigError(path + ": cannot open for writing");
        out << text;
        if (!out)
            throw ConfigError(path + ": write failed");
    }

    Json row_to_json(const ResultRow &r)
    {
        auto real = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
        return {{"method", r.method},         {"parameter", r.parameter},   {"value", r.value},
                {"repetition", r.repetition}, {"seed", r.seed},             {"sum_rate", real(r.sum_rate)},
                {"probing", real(r.probing)}, {"power", real(r.power)},     {"wall_ms", r.wall_ms},
                {"iterations", r.iterations}, {"feasible", r.feasible}};
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Joint beamforming and fluid-antenna position optimization for ISAC"};
    app.require_subcommand(1);

    std::string input, out, format;
    std::uint64_t seed = 0;
    int workers = 1;
    double from = 0.0, to = 180.0, step = 0.5;

    auto common = [&](CLI::App *cmd, const std::string &what) {
        cmd->add_option(what, input, what + " file (JSON)")->required();
        cmd->add_option("--out", out, "output path (default: standard output)");
        cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App *run = app.add_subcommand("run", "solve one configuration");
    common(run, "config");
    CLI::Option *run_seed = run->add_option("--seed", seed, "solver seed");
    run->add_option("--workers", workers, "threads for swarm fitness evaluation")->check(CLI::PositiveNumber);

    CLI::App *sweep = app.add_subcommand("sweep", "sweep one scenario parameter over several methods");
    common(sweep, "spec");
    CLI::Option *sweep_seed = sweep->add_option("--seed", seed, "base seed of the repetitions");
    sweep->add_option("--workers", workers, "sweep points solved in parallel")->check(CLI::PositiveNumber);

    CLI::App *pattern = app.add_subcommand("beampattern", "transmit beampattern of a saved solution");
    common(pattern, "solution");
    pattern->add_option("--from", from, "first angle [deg]");
    pattern->add_option("--to", to, "last angle [deg]");
    pattern->add_option("--step", step, "angle step [deg]")->check(CLI::PositiveNumber);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (format.empty())
        format = app.got_subcommand(run) ? "json" : "csv";

    try
    {
        if (app.got_subcommand(run))
        {
            RunConfig cfg = load_run_config(input);
            if (*run_seed)
                cfg.solver.seed = cfg.pso.seed = seed;
            cfg.pso.workers = workers;
            const RunOutcome res = run_single(cfg);
            if (format == "json" || !res.solution)
                emit(out, res.record.dump(2) + "\n");
            else
            {
                std::ostringstream csv;
                write_rows_csv(csv, {row_from_solution(*res.solution, method_name(cfg.method), "none", 0.0, 0,
                                                       cfg.method == Method::pso ? cfg.pso.seed : cfg.solver.seed)});
                emit(out, csv.str());
            }
            if (!res.ok)
            {
                std::cerr << "faisac: " << (res.solution ? "solution is infeasible" : res.record.value("message", ""))
                          << "\n";
                return 1;
            }
            return 0;
        }

        if (app.got_subcommand(sweep))
        {
            SweepSpec spec = parse_sweep_spec(load_json_file(input));
            if (*sweep_seed)
                spec.seed_base = seed;
            const std::string path = out.empty() ? spec.output : out;
            const std::vector<SweepPoint> points = run_sweep(spec, workers);

            bool all_ok = true;
            std::vector<ResultRow> rows;
            for (const SweepPoint &p : points)
            {
                rows.push_back(p.row);
                all_ok = all_ok && p.row.feasible;
                if (!p.error.empty())
                    std::cerr << "faisac: " << p.row.method << " " << p.row.parameter << "=" << format_real(p.row.value)
                              << " rep " << p.row.repetition << ": " << p.error << "\n";
            }
            if (format == "csv")
            {
                std::ostringstream csv;
                write_rows_csv(csv, rows);
                emit(path, csv.str());
            }
            else
            {
                Json arr = Json::array();
                for (const SweepPoint &p : points)
                {
                    Json j = row_to_json(p.row);
                    if (p.solution)
                        j["solution"] = solution_to_json(p.scenario, *p.solution, p.row.method, p.row.seed);
                    else
                        j["error"] = error_to_json("failed", p.error);
                    arr.push_back(j);
                }
                emit(path, arr.dump(2) + "\n");
            }
            return all_ok ? 0 : 1;
        }

        const SolutionRecord rec = solution_from_json(load_json_file(input));
        if (!(to >= from))
            throw ConfigError("--to must not be below --from");
        std::vector<double> grid;
        const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
        for (long i = 0; i <= n; ++i)
            grid.push_back(from + static_cast<double>(i) * step);
        const Eigen::VectorXd gain = export_beampattern(rec, grid);
        if (format == "csv")
        {
            std::ostringstream csv;
            write_beampattern_csv(csv, grid, gain);
            emit(out, csv.str());
        }
        else
        {
            Json j = {{"angle_deg", grid}, {"gain", std::vector<double>(gain.data(), gain.data() + gain.size())}};
            emit(out, j.dump(2) + "\n");
        }
        return 0;
    }
    catch (const std::exception &e)
    {
        std::cerr << "faisac: " << e.what() << "\n";
        return 2;
    }
}
