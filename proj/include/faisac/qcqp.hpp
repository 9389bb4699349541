// SPDX-License-Identifier: Apache-2.0
//
// Projection of a position vector onto
//
//   { t : g(t | t~) >= Pt,  t_1 >= 0,  t_M <= D,  t_m - t_{m-1} >= D0 },
//
// where g(t | t~) = t^T Dm t - 2 d^T t + c is a concave quadratic minorizer
// of the probing power a^H(t) R_w a(t), tight at the expansion point t~.
//
// The convex projection is solved through its single multiplier mu >= 0:
// for fixed mu the Lagrangian ||t - kappa||^2 + mu (Pt - g(t)) is a strongly
// convex quadratic over the chain polytope (solved by a small active-set
// method), and g(t(mu)) is nondecreasing in mu, so mu is found by bisection.
// ------------------------------------------------------------------------

#ifndef FAISAC_QCQP_HPP
#define FAISAC_QCQP_HPP

#include "faisac/model.hpp"

namespace faisac
{
    struct Surrogate
    {
        Eigen::MatrixXd Dm;    // negative semidefinite curvature
        Eigen::VectorXd d;     // linear coefficient
        double c = 0.0;        // constant
        Apv expansion;         // t~
        double v = 0.0;        // spatial frequency of the probe direction [rad/m]

        double value(const Apv &t) const;
        Eigen::VectorXd gradient(const Apv &t) const;
    };

    // Minorizer of a^H(t, theta) Rw a(t, theta) built from
    // cos(x) >= cos(x0) - sin(x0) (x - x0) - (x - x0)^2 / 2
    // applied to every entry of the Hermitian form.
    Surrogate build_surrogate(const Apv &t_tilde, const Eigen::MatrixXcd &Rw, double theta, double wavelength);

    // Exact Euclidean projection onto the chain polytope alone (box plus
    // minimum spacing), via pool-adjacent-violators on t_m - (m-1) D0.
    // Requires aperture >= (M-1) * min_spacing.
    Apv project_chain(const Eigen::VectorXd &kappa, double min_spacing, double aperture);

    // min 0.5 t^T Q t - r^T t over the chain polytope, Q symmetric positive
    // definite. Active-set method warm-started at project_chain(start).
    Apv chain_qp(const Eigen::MatrixXd &Q, const Eigen::VectorXd &r, double min_spacing, double aperture,
                 const Eigen::VectorXd &start);

    struct FeasibleProjection
    {
        Apv t;
        bool feasible = false;
        double multiplier = 0.0;     // mu_q of the surrogate constraint
        double surrogate_value = 0.0; // g(t | t~) at the returned point
        int bisections = 0;
    };

    // Euclidean projection onto {g >= Pt} intersected with the chain polytope.
    // When the intersection is empty, feasible = false and surrogate_value is
    // the largest g reached (the point is the chain-feasible maximizer found).
    FeasibleProjection project_feasible(const Eigen::VectorXd &kappa, const Surrogate &sur, double min_spacing,
                                        double aperture, double threshold);

} // namespace faisac

#endif // FAISAC_QCQP_HPP
