// SPDX-License-Identifier: Apache-2.0
//
// Beamformer block: minimize sum_k [w_k^H A w_k - 2 Re{b_k^H w_k}] subject to
// the power budget sum_k ||w_k||^2 <= Pmax and the probing requirement
// sum_k |a^H w_k|^2 >= Pt, with a proximal distance method. Both squared
// distances to the constraint sets are majorized through their projections,
// so every iteration is one Hermitian linear solve shared by all K users.
// ------------------------------------------------------------------------

#ifndef FAISAC_PDA_HPP
#define FAISAC_PDA_HPP

#include "faisac/wmmse.hpp"

namespace faisac
{
    // The probing projection is undefined when every w_k is orthogonal to a.
    class DegenerateInputError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct PdaOptions
    {
        double penalty0 = 1.0;  // initial penalty weight
        double growth = 1.5;    // penalty multiplier, > 1
        int growth_period = 10; // iterations between penalty increases
        int max_iter = 500;
        double tol = 1e-8;      // relative iterate change
        double feas_tol = 1e-9; // relative constraint slack, scaled by max(1, P)
        bool extrapolate = true;

        void validate() const;
    };

    struct PdaResult
    {
        Beamformers W;
        double value = 0.0;     // quadratic_value at W
        double power = 0.0;     // total transmit power of W
        double probing = 0.0;   // probing power of W
        int iterations = 0;
        bool converged = false; // iterate change reached tol on a feasible iterate
        bool feasible = false;  // W satisfies both constraints within feas_tol
        double raw_power = 0.0;   // diagnostics of the last unrepaired iterate
        double raw_probing = 0.0;
    };

    // Euclidean projection onto the ball sum_k ||w_k||^2 <= Pmax.
    Beamformers project_power(const Beamformers &W, double max_power);

    // Euclidean projection onto sum_k |a^H w_k|^2 >= Pt. The inverse of
    // (I - mu a a^H) is applied through its rank-one Woodbury form.
    // Throws DegenerateInputError when sum_k |a^H w_k|^2 = 0 < Pt.
    Beamformers project_probe(const Beamformers &W, const Eigen::VectorXcd &a, double threshold);

    // Cheap feasible point near W: the component along a is raised to meet
    // Pt, then the orthogonal remainder (and, if needed, the a-component down
    // to Pt) is shrunk to fit Pmax. Returns W untouched when already feasible.
    // Throws InfeasibleError when Pt > ||a||^2 * Pmax.
    Beamformers repair_feasibility(const Beamformers &W, const Eigen::VectorXcd &a, double max_power,
                                   double threshold);

    bool beamformers_feasible(const Beamformers &W, const Eigen::VectorXcd &a, double max_power,
                              double threshold, double feas_tol);

    // Penalized objective of one majorized step at penalty weight `penalty`:
    // quadratic_value(W) + penalty * (dist^2(W, C_BS) + dist^2(W, C_t)).
    double penalized_value(const QuadraticData &quad, const Beamformers &W, const Eigen::VectorXcd &a,
                           double max_power, double threshold, double penalty);

    PdaResult pda_solve(const QuadraticData &quad, const Eigen::VectorXcd &a, double max_power,
                        double threshold, const PdaOptions &opts, const Beamformers &w_init);

} // namespace faisac

#endif // FAISAC_PDA_HPP
