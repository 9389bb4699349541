// SPDX-License-Identifier: Apache-2.0
//
// Comparison methods: the fixed half-wavelength array, and particle swarm
// search over antenna positions with the beamformers optimized per particle.
// ------------------------------------------------------------------------

#ifndef FAISAC_BASELINES_HPP
#define FAISAC_BASELINES_HPP

#include "faisac/solver.hpp"

#include <functional>

namespace faisac
{
    // Runs the beamformer-only loop at t_m = (m - 1) lambda / 2.
    Solution fpa_solve(const Scenario &s, const BsumOptions &opts);

    struct PsoOptions
    {
        int particles = 50;
        int iterations = 100;
        double inertia = 0.7;
        double cognitive = 1.5;
        double social = 1.5;
        std::uint64_t seed = 0;
        int inner_bsum_iters = 10;      // (u, rho, w) cycles per fitness evaluation
        double init_velocity = 0.1;     // initial speed range, fraction of the aperture
        double infeasible_penalty = 1e3; // subtracted from the fitness of probing-infeasible particles
        int workers = 1;                // threads for fitness evaluation

        void validate() const;
    };

    struct PsoResult
    {
        Solution solution;                // best particle refined by a full fixed-position solve
        std::vector<double> best_fitness; // global best after initialization and after every iteration
        long evaluations = 0;
    };

    // Called after every position update with the iteration index (0 for the
    // initial swarm) and all particle positions.
    using SwarmObserver = std::function<void(int, const std::vector<Apv> &)>;

    PsoResult pso_solve(const Scenario &s, const PsoOptions &opts, const BsumOptions &inner = {},
                        const SwarmObserver &observer = {});

} // namespace faisac

#endif // FAISAC_BASELINES_HPP
