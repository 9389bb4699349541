// SPDX-License-Identifier: Apache-2.0

#include "faisac/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <thread>

namespace faisac
{
    Solution fpa_solve(const Scenario &s, const BsumOptions &opts)
    {
        BsumOptions o = opts;
        o.enable_apv = false;
        o.initial_positions = half_wavelength_positions(s.num_antennas, s.wavelength);
        return bsum_solve(s, o);
    }

    void PsoOptions::validate() const
    {
        if (particles < 1 || iterations < 0 || inner_bsum_iters < 1 || workers < 1)
            throw std::invalid_argument("pso: counts must be positive");
        if (!(inertia > 0.0 && inertia <= 1.0))
            throw std::invalid_argument("pso.inertia must lie in (0, 1]");
        if (!(cognitive > 0.0) || !(social > 0.0))
            throw std::invalid_argument("pso: acceleration coefficients must be positive");
        if (!(init_velocity >= 0.0))
            throw std::invalid_argument("pso.init_velocity must be non-negative");
    }

    namespace
    {
        // Evaluates every particle; slot i only ever receives particle i.
        void evaluate(const Scenario &s, const std::vector<Apv> &x, const BsumOptions &o, double penalty,
                      int workers, std::vector<double> &out)
        {
            auto job = [&](std::size_t begin, std::size_t step) {
                for (std::size_t i = begin; i < x.size(); i += step)
                {
                    BsumOptions oi = o;
                    oi.initial_positions = x[i];
                    const Solution sol = bsum_solve(s, oi);
                    out[i] = sol.feasible ? sol.sum_rate : sol.sum_rate - penalty;
                }
            };
            const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(workers), x.size());
            if (n <= 1)
            {
                job(0, 1);
                return;
            }
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < n; ++w)
                pool.emplace_back(job, w, n);
            for (auto &th : pool)
                th.join();
        }
    }

    PsoResult pso_solve(const Scenario &s, const PsoOptions &opts, const BsumOptions &inner,
                        const SwarmObserver &observer)
    {
        s.validate();
        opts.validate();
        check_sensing_feasible(s);

        using clock = std::chrono::steady_clock;
        const auto start = clock::now();

        const int M = s.num_antennas;
        const auto P = static_cast<std::size_t>(opts.particles);
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        BsumOptions fit_opts = inner;
        fit_opts.enable_apv = false;
        fit_opts.max_outer = opts.inner_bsum_iters;
        fit_opts.starts = 1;

        std::vector<Apv> x(P), vel(P);
        const double vmax = opts.init_velocity * s.aperture;
        for (std::size_t p = 0; p < P; ++p)
        {
            if (p == 0)
                x[p] = project_chain(half_wavelength_positions(M, s.wavelength), s.min_spacing, s.aperture);
            else
            {
                Eigen::VectorXd r(M);
                for (int m = 0; m < M; ++m)
                    r[m] = unit(rng) * s.aperture;
                std::sort(r.data(), r.data() + M);
                x[p] = project_chain(r, s.min_spacing, s.aperture);
            }
            vel[p].resize(M);
            for (int m = 0; m < M; ++m)
                vel[p][m] = (2.0 * unit(rng) - 1.0) * vmax;
        }
        if (observer)
            observer(0, x);

        PsoResult res;
        std::vector<double> fit(P);
        evaluate(s, x, fit_opts, opts.infeasible_penalty, opts.workers, fit);
        res.evaluations += static_cast<long>(P);

        std::vector<Apv> pbest = x;
        std::vector<double> pbest_fit = fit;
        std::size_t g = 0;
        for (std::size_t p = 1; p < P; ++p)
            if (fit[p] > fit[g])
                g = p;
        Apv gbest = x[g];
        double gbest_fit = fit[g];
        res.best_fitness.push_back(gbest_fit);

        for (int it = 1; it <= opts.iterations; ++it)
        {
            for (std::size_t p = 0; p < P; ++p)
            {
                for (int m = 0; m < M; ++m)
                {
                    const double r1 = unit(rng), r2 = unit(rng);
                    vel[p][m] = opts.inertia * vel[p][m] + opts.cognitive * r1 * (pbest[p][m] - x[p][m]) +
                                opts.social * r2 * (gbest[m] - x[p][m]);
                }
                x[p] = project_chain(x[p] + vel[p], s.min_spacing, s.aperture);
            }
            if (observer)
                observer(it, x);

            evaluate(s, x, fit_opts, opts.infeasible_penalty, opts.workers, fit);
            res.evaluations += static_cast<long>(P);

            // fixed reduction order keeps the result independent of the worker count
            for (std::size_t p = 0; p < P; ++p)
            {
                if (fit[p] > pbest_fit[p])
                {
                    pbest_fit[p] = fit[p];
                    pbest[p] = x[p];
                }
                if (fit[p] > gbest_fit)
                {
                    gbest_fit = fit[p];
                    gbest = x[p];
                }
            }
            res.best_fitness.push_back(gbest_fit);
        }

        BsumOptions refine = inner;
        refine.enable_apv = false;
        refine.initial_positions = gbest;
        res.solution = bsum_solve(s, refine);
        res.solution.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
        return res;
    }

} // namespace faisac
