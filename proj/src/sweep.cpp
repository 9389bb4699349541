// SPDX-License-Identifier: Apache-2.0

#include "faisac/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

namespace faisac
{
    Solution solve_method(Method method, const Scenario &s, const BsumOptions &solver, const PsoOptions &pso,
                          std::uint64_t seed, const std::vector<Initialization> &warm)
    {
        BsumOptions o = solver;
        o.seed = seed;
        o.warm_starts = warm;
        switch (method)
        {
        case Method::bsum:
            return bsum_solve(s, o);
        case Method::fpa:
            return fpa_solve(s, o);
        case Method::pso:
        {
            PsoOptions p = pso;
            p.seed = seed;
            o.warm_starts.clear();
            return pso_solve(s, p, o).solution;
        }
        }
        throw std::invalid_argument("unknown method");
    }

    RunOutcome run_single(const RunConfig &config)
    {
        RunOutcome out;
        const std::uint64_t seed = config.method == Method::pso ? config.pso.seed : config.solver.seed;
        try
        {
            Solution sol = solve_method(config.method, config.scenario, config.solver, config.pso, seed);
            out.record = solution_to_json(config.scenario, sol, method_name(config.method), seed);
            out.ok = sol.feasible;
            out.solution = std::move(sol);
        }
        catch (const InfeasibleError &e)
        {
            out.record = error_to_json("infeasible", e.what());
        }
        return out;
    }

    void SweepSpec::validate() const
    {
        if (parameter != "Pt" && parameter != "M" && parameter != "Pmax")
            throw ConfigError("sweep.parameter: unknown parameter '" + parameter + "' (Pt, M, Pmax)");
        if (values.empty())
            throw ConfigError("sweep.values: must be non-empty");
        if (methods.empty())
            throw ConfigError("sweep.methods: must be non-empty");
        if (repetitions < 1)
            throw ConfigError("sweep.repetitions: must be >= 1");
        for (double v : values)
        {
            if (!std::isfinite(v))
                throw ConfigError("sweep.values: must be finite");
            if (parameter == "M" && (v < 1.0 || v != std::floor(v)))
                throw ConfigError("sweep.values: antenna counts must be positive integers");
        }
    }

    SweepSpec parse_sweep_spec(const Json &j)
    {
        if (!j.is_object())
            throw ConfigError("sweep: expected an object");
        static const std::vector<std::string> known = {"scenario", "parameter", "values", "values_dbm",
                                                       "methods", "repetitions", "seed", "output",
                                                       "solver", "pso"};
        for (const auto &item : j.items())
            if (std::find(known.begin(), known.end(), item.key()) == known.end())
                throw ConfigError("sweep." + item.key() + ": unknown key");

        SweepSpec spec;
        if (!j.contains("scenario"))
            throw ConfigError("sweep.scenario: missing");
        spec.base = parse_scenario(j.at("scenario"), "sweep.scenario");

        if (j.contains("parameter"))
        {
            if (!j.at("parameter").is_string())
                throw ConfigError("sweep.parameter: expected a string");
            spec.parameter = j.at("parameter").get<std::string>();
        }

        const bool in_dbm = j.contains("values_dbm");
        if (in_dbm && j.contains("values"))
            throw ConfigError("sweep.values: given both as 'values' and 'values_dbm'");
        if (in_dbm && spec.parameter == "M")
            throw ConfigError("sweep.values_dbm: not a power parameter");
        const std::string vkey = in_dbm ? "values_dbm" : "values";
        if (!j.contains(vkey))
            throw ConfigError("sweep.values: missing");
        const Json &vals = j.at(vkey);
        if (!vals.is_array())
            throw ConfigError("sweep." + vkey + ": expected an array of numbers");
        for (const Json &v : vals)
        {
            if (!v.is_number())
                throw ConfigError("sweep." + vkey + ": expected an array of numbers");
            spec.values.push_back(in_dbm ? dbm_to_watt(v.get<double>()) : v.get<double>());
        }

        if (!j.contains("methods"))
            throw ConfigError("sweep.methods: missing");
        const Json &ms = j.at("methods");
        if (!ms.is_array())
            throw ConfigError("sweep.methods: expected an array of method names");
        for (const Json &m : ms)
        {
            if (!m.is_string())
                throw ConfigError("sweep.methods: expected an array of method names");
            spec.methods.push_back(parse_method(m.get<std::string>(), "sweep.methods"));
        }

        if (j.contains("repetitions"))
        {
            if (!j.at("repetitions").is_number_integer())
                throw ConfigError("sweep.repetitions: expected an integer");
            spec.repetitions = j.at("repetitions").get<int>();
        }
        if (j.contains("seed"))
        {
            const Json &sd = j.at("seed");
            if (!sd.is_number_integer() || sd.get<long long>() < 0)
                throw ConfigError("sweep.seed: expected a non-negative integer");
            spec.seed_base = sd.get<std::uint64_t>();
        }
        if (j.contains("output"))
        {
            if (!j.at("output").is_string())
                throw ConfigError("sweep.output: expected a string");
            spec.output = j.at("output").get<std::string>();
        }
        if (j.contains("solver"))
            spec.solver = parse_bsum_options(j.at("solver"), "sweep.solver");
        if (j.contains("pso"))
            spec.pso = parse_pso_options(j.at("pso"), "sweep.pso");
        spec.validate();
        return spec;
    }

    Scenario apply_parameter(const Scenario &base, const std::string &parameter, double value)
    {
        Scenario s = base;
        if (parameter == "Pt")
            s.probe_threshold = value;
        else if (parameter == "Pmax")
            s.max_power = value;
        else if (parameter == "M")
            s.num_antennas = static_cast<int>(value);
        else
            throw std::invalid_argument("unknown sweep parameter '" + parameter + "'");
        return s;
    }

    std::vector<SweepPoint> run_sweep(const SweepSpec &spec, int workers)
    {
        spec.validate();
        if (workers < 1)
            throw std::invalid_argument("workers must be >= 1");

        const std::size_t V = spec.values.size();
        const auto R = static_cast<std::size_t>(spec.repetitions);
        std::vector<SweepPoint> points(spec.methods.size() * V * R);
        auto index = [&](std::size_t m, std::size_t v, std::size_t r) { return (m * V + v) * R + r; };

        // Solves one point; returns the solution when it can seed the next one.
        auto solve_point = [&](std::size_t m, std::size_t v, std::size_t r,
                               const std::vector<Initialization> &warm) -> std::optional<Initialization> {
            SweepPoint &p = points[index(m, v, r)];
            const Method method = spec.methods[m];
            const std::uint64_t seed = spec.seed_base + r;
            p.row.method = method_name(method);
            p.row.parameter = spec.parameter;
            p.row.value = spec.values[v];
            p.row.repetition = static_cast<int>(r);
            p.row.seed = seed;
            p.row.sum_rate = p.row.probing = p.row.power = std::nan("");
            try
            {
                p.scenario = apply_parameter(spec.base, spec.parameter, spec.values[v]);
                p.scenario.validate();
                Solution sol = solve_method(method, p.scenario, spec.solver, spec.pso, seed, warm);
                p.row = row_from_solution(sol, p.row.method, spec.parameter, spec.values[v], static_cast<int>(r), seed);
                std::optional<Initialization> next;
                if (sol.feasible)
                    next = Initialization{sol.W, sol.t};
                p.solution = std::move(sol);
                return next;
            }
            catch (const std::exception &e)
            {
                p.error = e.what();
                p.row.feasible = false;
                return std::nullopt;
            }
        };

        // Pt chains: per repetition, fpa then bsum at each threshold, bsum also
        // seeded with the fixed-array solution of the same point.
        const bool chained = spec.parameter == "Pt";
        auto find = [&](Method method) {
            const auto it = std::find(spec.methods.begin(), spec.methods.end(), method);
            return it == spec.methods.end() ? std::optional<std::size_t>{}
                                            : std::optional<std::size_t>(it - spec.methods.begin());
        };
        const std::optional<std::size_t> fa = find(Method::bsum), fixed = find(Method::fpa);

        std::vector<std::function<void()>> tasks;
        for (std::size_t r = 0; r < R; ++r)
        {
            if (chained && (fa || fixed))
            {
                tasks.emplace_back([&, r] {
                    std::vector<std::size_t> order(V);
                    std::iota(order.begin(), order.end(), std::size_t{0});
                    std::stable_sort(order.begin(), order.end(),
                                     [&](std::size_t a, std::size_t b) { return spec.values[a] > spec.values[b]; });
                    std::optional<Initialization> fa_prev, fixed_prev;
                    for (std::size_t v : order)
                    {
                        std::optional<Initialization> fixed_here;
                        if (fixed)
                        {
                            std::vector<Initialization> warm;
                            if (fixed_prev)
                                warm.push_back(*fixed_prev);
                            fixed_here = solve_point(*fixed, v, r, warm);
                            if (fixed_here)
                                fixed_prev = fixed_here;
                        }
                        if (fa)
                        {
                            std::vector<Initialization> warm;
                            if (fa_prev)
                                warm.push_back(*fa_prev);
                            if (fixed_here)
                                warm.push_back(*fixed_here);
                            if (std::optional<Initialization> next = solve_point(*fa, v, r, warm))
                                fa_prev = std::move(next);
                        }
                    }
                });
            }
            for (std::size_t m = 0; m < spec.methods.size(); ++m)
            {
                if (chained && (m == fa || m == fixed))
                    continue;
                for (std::size_t v = 0; v < V; ++v)
                    tasks.emplace_back([&, m, v, r] { solve_point(m, v, r, {}); });
            }
        }

        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < tasks.size(); i = next++)
                tasks[i]();
        };
        const std::size_t n = std::min(static_cast<std::size_t>(workers), tasks.size());
        if (n <= 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < n; ++w)
                pool.emplace_back(worker);
            for (auto &t : pool)
                t.join();
        }
        return points;
    }

    Eigen::VectorXd export_beampattern(const SolutionRecord &record, const std::vector<double> &grid_deg)
    {
        std::vector<double> grid(grid_deg.size());
        std::transform(grid_deg.begin(), grid_deg.end(), grid.begin(), deg_to_rad);
        return beampattern(record.W, record.t, record.scenario.wavelength, grid);
    }

} // namespace faisac
