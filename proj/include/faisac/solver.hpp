// SPDX-License-Identifier: Apache-2.0
//
// Block successive upper-bound minimization over (u, rho, w, t). Each cycle
// applies, in this order: the closed-form MMSE receivers u, the closed-form
// weights rho, the beamformer block (proximal distance method) and the
// position block (extrapolated projected gradient). Because F evaluated
// right after the (u, rho) update equals K - ln(2) * sum_rate, and neither
// the w- nor the t-block ever increases F, the sum rate is non-decreasing
// from one cycle to the next.
// ------------------------------------------------------------------------

#ifndef FAISAC_SOLVER_HPP
#define FAISAC_SOLVER_HPP

#include "faisac/epg.hpp"
#include "faisac/pda.hpp"

#include <cstdint>
#include <optional>

namespace faisac
{
    struct Initialization
    {
        Beamformers W;
        Apv t;
    };

    struct BsumOptions
    {
        int max_outer = 100;
        double outer_tol = 1e-5;  // relative sum-rate change
        int stall_cycles = 3;     // consecutive cycles below outer_tol before stopping
        std::uint64_t seed = 0;
        int starts = 16;          // independent initializations; the best feasible run is kept
        int screen_cycles = 10;   // cycles every start runs before ranking; 0 runs all to the end
        int finalists = 2;        // best-ranked starts continued to max_outer
        PdaOptions pda;
        EpgOptions epg = default_epg();
        bool enable_apv = true;   // false keeps the positions fixed (FPA mode)
        std::optional<Apv> initial_positions;
        std::vector<Initialization> warm_starts; // extra starts run before the others

        void validate() const;

        // Position steps inside the outer loop need not be solved to high
        // accuracy; each cycle only has to decrease F.
        static EpgOptions default_epg()
        {
            EpgOptions e;
            e.max_iter = 30;
            return e;
        }
    };

    struct TraceEntry
    {
        int cycle = 0;
        double objective = 0.0; // F right after the (u, rho) update of the next cycle
        double sum_rate = 0.0;
        double probing = 0.0;
        double power = 0.0;
        double wall_ms = 0.0;   // cumulative since the start of the solve
    };

    struct Solution
    {
        Beamformers W;
        Apv t;
        AuxState aux;
        double sum_rate = 0.0;
        double probing = 0.0;
        double power = 0.0;
        std::vector<TraceEntry> trace; // entry 0 is the initial point
        int iterations = 0;            // outer cycles run
        bool converged = false;
        bool feasible = false;
        bool inner_converged = true;   // every PDA solve hit its tolerance
        double wall_ms = 0.0;
    };

    // Uniformly spaced positions over [0, D] and per-user matched filters
    // sharing Pmax equally, made probing-feasible when needed. Seed 0 gives
    // the plain matched filters; other seeds mix in a seeded complex
    // Gaussian perturbation before normalization.
    Initialization init_solution(const Scenario &s, std::uint64_t seed);
    Beamformers init_beamformers(const Scenario &s, const Apv &t, std::uint64_t seed);

    // Throws InfeasibleError when Pt exceeds the matched-beam ceiling M * Pmax.
    void check_sensing_feasible(const Scenario &s);

    // Runs the cycle loop from several initializations and keeps the best
    // feasible result. The candidates are: the warm starts, repaired
    // onto the power and probing constraints; with positions free and none
    // given, the fixed half-wavelength solution of the same options; and
    // `starts` runs from initial_positions (or the uniform grid) with
    // beamformer seeds derived from `seed`, start 0 using `seed` itself.
    // Every candidate runs screen_cycles cycles, then the `finalists`
    // best-ranked ones continue to max_outer.
    Solution bsum_solve(const Scenario &s, const BsumOptions &opts);

    // Recompute the reported metrics of a (W, t) pair.
    void refresh_metrics(const Scenario &s, Solution &sol, double feas_tol = 1e-6);

} // namespace faisac

#endif // FAISAC_SOLVER_HPP
