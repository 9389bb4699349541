// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver: single runs, parameter sweeps over (Pt, M, Pmax) for
// several methods, and beampattern export.
// ------------------------------------------------------------------------

#ifndef FAISAC_SWEEP_HPP
#define FAISAC_SWEEP_HPP

#include "faisac/records.hpp"

#include <optional>

namespace faisac
{
    struct RunOutcome
    {
        bool ok = false;        // a solution was produced and it is feasible
        Json record;            // solution record, or an error record
        std::optional<Solution> solution;
    };

    // Solves one method on one scenario. The warm starts are passed to
    // the beamformer-position solver and ignored by the swarm.
    Solution solve_method(Method method, const Scenario &s, const BsumOptions &solver, const PsoOptions &pso,
                          std::uint64_t seed, const std::vector<Initialization> &warm = {});

    // Infeasible scenarios produce an error record instead of throwing.
    RunOutcome run_single(const RunConfig &config);

    struct SweepSpec
    {
        Scenario base;
        std::string parameter = "Pt";   // Pt [W], M, Pmax [W]
        std::vector<double> values;
        std::vector<Method> methods;
        int repetitions = 1;
        std::uint64_t seed_base = 0;    // repetition r uses seed_base + r
        std::string output;             // empty: standard output
        BsumOptions solver;
        PsoOptions pso;

        void validate() const;
    };

    // Keys: scenario {...}, parameter, values | values_dbm, methods,
    // repetitions, seed, output, solver {...}, pso {...}.
    SweepSpec parse_sweep_spec(const Json &j);

    // Copy of `base` with the swept parameter set to `value`.
    Scenario apply_parameter(const Scenario &base, const std::string &parameter, double value);

    struct SweepPoint
    {
        ResultRow row;
        Scenario scenario;
        std::optional<Solution> solution;
        std::string error;              // non-empty when the point failed
    };

    // One point per (method, value, repetition) in that nesting order. Points
    // run on at most `workers` threads. A Pt sweep of bsum or fpa is solved
    // from the largest threshold down, each point warm-started from the
    // solution of the previous one, which stays feasible for the lower
    // threshold. With both methods present, bsum at each threshold is also
    // warm-started from the fpa solution there.
    std::vector<SweepPoint> run_sweep(const SweepSpec &spec, int workers = 1);

    // P(theta) over a grid in degrees.
    Eigen::VectorXd export_beampattern(const SolutionRecord &record, const std::vector<double> &grid_deg);

} // namespace faisac

#endif // FAISAC_SWEEP_HPP
