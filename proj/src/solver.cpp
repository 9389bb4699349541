// SPDX-License-Identifier: Apache-2.0

#include "faisac/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace faisac
{
    void BsumOptions::validate() const
    {
        if (max_outer < 1)
            throw std::invalid_argument("solver.max_outer must be >= 1");
        if (!(outer_tol > 0.0))
            throw std::invalid_argument("solver.outer_tol must be positive");
        if (starts < 1)
            throw std::invalid_argument("solver.starts must be >= 1");
        if (screen_cycles < 0 || finalists < 1)
            throw std::invalid_argument("solver.screen_cycles must be >= 0 and solver.finalists >= 1");
        if (stall_cycles < 1)
            throw std::invalid_argument("solver.stall_cycles must be >= 1");
        pda.validate();
        epg.validate();
    }

    void check_sensing_feasible(const Scenario &s)
    {
        const double ceiling = s.num_antennas * s.max_power;
        if (s.probe_threshold > ceiling)
        {
            std::ostringstream msg;
            msg << "infeasible scenario: Pt = " << s.probe_threshold << " W exceeds the matched-beam ceiling M*Pmax = "
                << ceiling << " W";
            throw InfeasibleError(msg.str());
        }
    }

    Beamformers init_beamformers(const Scenario &s, const Apv &t, std::uint64_t seed)
    {
        const int M = s.num_antennas;
        const int K = s.num_users;
        const ChannelSet ch = build_channels(s, t);

        Beamformers W(M, K);
        for (int k = 0; k < K; ++k)
            W.col(k) = ch.h.col(k).normalized();
        if (seed != 0)
        {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> n(0.0, 1.0);
            Beamformers noise(M, K);
            for (int k = 0; k < K; ++k)
                for (int m = 0; m < M; ++m)
                    noise(m, k) = cplx(n(rng), n(rng));
            W += 0.5 * noise / std::sqrt(2.0 * M);
            for (int k = 0; k < K; ++k)
                W.col(k).normalize();
        }
        W *= std::sqrt(s.max_power / K);

        const Eigen::VectorXcd a = steering_vector(t, s.probe_angle, s.wavelength);
        if (probing_power(W, a) < s.probe_threshold)
        {
            W = project_probe(W, a, s.probe_threshold);
            W = repair_feasibility(W, a, s.max_power, s.probe_threshold);
        }
        return W;
    }

    Initialization init_solution(const Scenario &s, std::uint64_t seed)
    {
        Initialization init;
        init.t = uniform_positions(s.num_antennas, s.aperture);
        init.W = init_beamformers(s, init.t, seed);
        return init;
    }

    void refresh_metrics(const Scenario &s, Solution &sol, double feas_tol)
    {
        const ChannelSet ch = build_channels(s, sol.t);
        sol.sum_rate = sum_rate(ch, sol.W, s.noise_power);
        sol.probing = probing_power(sol.W, sol.t, s.probe_angle, s.wavelength);
        sol.power = total_power(sol.W);
        sol.feasible = sol.power <= s.max_power + feas_tol &&
                       sol.probing >= s.probe_threshold - feas_tol * std::max(1.0, s.probe_threshold) &&
                       positions_feasible(sol.t, s.aperture, s.min_spacing, 1e-9);
    }

    namespace
    {
        std::uint64_t start_seed(std::uint64_t seed, int start)
        {
            if (start == 0)
                return seed;
            std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(start);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            z ^= z >> 31;
            return z == 0 ? 1 : z;
        }

        Apv start_positions(const Scenario &s, const BsumOptions &opts)
        {
            if (opts.initial_positions)
                return *opts.initial_positions;
            return uniform_positions(s.num_antennas, s.aperture);
        }

        bool ranks_above(const Solution &a, const Solution &b)
        {
            return (a.feasible && !b.feasible) || (a.feasible == b.feasible && a.sum_rate > b.sum_rate);
        }

        // Appends a continuation run whose first trace entry repeats the last one of `sol`.
        void extend(Solution &sol, Solution &&more)
        {
            const int done = sol.iterations;
            const double offset = sol.trace.back().wall_ms;
            for (std::size_t i = 1; i < more.trace.size(); ++i)
            {
                TraceEntry e = more.trace[i];
                e.cycle += done;
                e.wall_ms += offset;
                sol.trace.push_back(e);
            }
            sol.W = std::move(more.W);
            sol.t = std::move(more.t);
            sol.aux = std::move(more.aux);
            sol.sum_rate = more.sum_rate;
            sol.probing = more.probing;
            sol.power = more.power;
            sol.iterations = done + more.iterations;
            sol.converged = more.converged;
            sol.feasible = more.feasible;
            sol.inner_converged = sol.inner_converged && more.inner_converged;
        }

        Solution bsum_run(const Scenario &s, const BsumOptions &opts, const Initialization &init, int max_cycles)
        {
            using clock = std::chrono::steady_clock;
            const auto start = clock::now();
            auto elapsed_ms = [&] {
                return std::chrono::duration<double, std::milli>(clock::now() - start).count();
            };

            Solution sol;
            sol.t = init.t;
            sol.W = init.W;

            auto record = [&](int cycle) {
                const ChannelSet ch = build_channels(s, sol.t);
                TraceEntry e;
                e.cycle = cycle;
                e.sum_rate = sum_rate(ch, sol.W, s.noise_power);
                e.objective = objective(ch, sol.W, update_aux(ch, sol.W, s.noise_power), s.noise_power);
                e.probing = probing_power(sol.W, sol.t, s.probe_angle, s.wavelength);
                e.power = total_power(sol.W);
                e.wall_ms = elapsed_ms();
                sol.trace.push_back(e);
            };
            record(0);

            int stalled = 0;
            for (int cycle = 1; cycle <= max_cycles; ++cycle)
            {
                const ChannelSet ch = build_channels(s, sol.t);
                sol.aux = update_aux(ch, sol.W, s.noise_power);

                const QuadraticData quad = assemble_quadratic(ch, sol.aux);
                const Eigen::VectorXcd a = steering_vector(sol.t, s.probe_angle, s.wavelength);
                const PdaResult w_step = pda_solve(quad, a, s.max_power, s.probe_threshold, opts.pda, sol.W);
                sol.W = w_step.W;
                sol.inner_converged = sol.inner_converged && w_step.converged;

                if (opts.enable_apv)
                {
                    const EpgResult t_step = epg_solve(sol.t, sol.W, sol.aux, s, opts.epg);
                    sol.t = t_step.t;
                }

                record(cycle);
                sol.iterations = cycle;

                const double prev = sol.trace[sol.trace.size() - 2].sum_rate;
                const double cur = sol.trace.back().sum_rate;
                stalled = std::abs(cur - prev) < opts.outer_tol * std::max(std::abs(prev), 1e-12) ? stalled + 1 : 0;
                if (stalled >= opts.stall_cycles)
                {
                    sol.converged = true;
                    break;
                }
            }

            sol.aux = update_aux(build_channels(s, sol.t), sol.W, s.noise_power);
            refresh_metrics(s, sol);
            return sol;
        }
    }

    Solution bsum_solve(const Scenario &s, const BsumOptions &opts)
    {
        s.validate();
        opts.validate();
        check_sensing_feasible(s);
        if (opts.initial_positions)
        {
            if (opts.initial_positions->size() != s.num_antennas)
                throw std::invalid_argument("solver.initial_positions: expected M positions");
            if (!positions_feasible(*opts.initial_positions, s.aperture, s.min_spacing, 1e-12))
                throw std::invalid_argument("solver.initial_positions: violates box or spacing constraints");
        }

        const auto start = std::chrono::steady_clock::now();
        std::vector<Initialization> inits;
        for (const Initialization &w : opts.warm_starts)
        {
            if (w.t.size() != s.num_antennas || w.W.rows() != s.num_antennas || w.W.cols() != s.num_users)
                throw std::invalid_argument("solver.warm_starts: dimensions do not match the scenario");
            if (!positions_feasible(w.t, s.aperture, s.min_spacing, 1e-9))
                throw std::invalid_argument("solver.warm_starts: violates box or spacing constraints");
            const Eigen::VectorXcd a = steering_vector(w.t, s.probe_angle, s.wavelength);
            inits.push_back({repair_feasibility(w.W, a, s.max_power, s.probe_threshold), w.t});
        }
        if (opts.enable_apv && !opts.initial_positions)
        {
            const Apv array = half_wavelength_positions(s.num_antennas, s.wavelength);
            if (positions_feasible(array, s.aperture, s.min_spacing, 1e-12))
            {
                BsumOptions fixed = opts;
                fixed.enable_apv = false;
                fixed.initial_positions = array;
                fixed.warm_starts.clear();
                const Solution f = bsum_solve(s, fixed);
                if (f.feasible)
                    inits.push_back({f.W, f.t});
            }
        }
        for (int j = 0; j < opts.starts; ++j)
        {
            Initialization init;
            init.t = start_positions(s, opts);
            init.W = init_beamformers(s, init.t, start_seed(opts.seed, j));
            inits.push_back(std::move(init));
        }

        const bool screening = opts.screen_cycles > 0 && opts.screen_cycles < opts.max_outer;
        std::vector<Solution> runs;
        for (const Initialization &init : inits)
            runs.push_back(bsum_run(s, opts, init, screening ? opts.screen_cycles : opts.max_outer));

        if (screening)
        {
            std::vector<std::size_t> order(runs.size());
            for (std::size_t i = 0; i < order.size(); ++i)
                order[i] = i;
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t x, std::size_t y) { return ranks_above(runs[x], runs[y]); });
            const std::size_t keep = std::min(order.size(), static_cast<std::size_t>(opts.finalists));
            for (std::size_t r = 0; r < keep; ++r)
            {
                Solution &sol = runs[order[r]];
                if (sol.converged)
                    continue;
                extend(sol, bsum_run(s, opts, {sol.W, sol.t}, opts.max_outer - sol.iterations));
            }
        }

        std::size_t best = 0;
        for (std::size_t i = 1; i < runs.size(); ++i)
            if (ranks_above(runs[i], runs[best]))
                best = i;
        Solution out = std::move(runs[best]);
        out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return out;
    }

} // namespace faisac
