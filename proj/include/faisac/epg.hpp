// SPDX-License-Identifier: Apache-2.0
//
// Position block: extrapolated projected gradient on the WMMSE surrogate as
// a function of the antenna positions, with (w, u, rho) held fixed.
//
// Writing w_i = a_i + j b_i and g_k = cos(v_k t), q_k = sin(v_k t), the
// position dependence of F enters through
//
//   f_{k,i} = |a^H(t, theta_k) w_i|^2 = g_k^T C_i g_k + q_k^T C_i q_k + 2 g_k^T D_i q_k
//   a^H(t, theta_k) w_k = (g_k^T a_k + q_k^T b_k) + j (g_k^T b_k - q_k^T a_k)
//
// with C_i = a_i a_i^T + b_i b_i^T and D_i = a_i b_i^T - b_i a_i^T.
// ------------------------------------------------------------------------

#ifndef FAISAC_EPG_HPP
#define FAISAC_EPG_HPP

#include "faisac/qcqp.hpp"
#include "faisac/wmmse.hpp"

namespace faisac
{
    // Real/imaginary split of the beamformers. C_i and D_i are rank-two and
    // applied through their factors.
    struct WSplit
    {
        Eigen::MatrixXd re; // [M, K], a_i
        Eigen::MatrixXd im; // [M, K], b_i

        explicit WSplit(const Beamformers &W);

        Eigen::MatrixXd C(Eigen::Index i) const;
        Eigen::MatrixXd D(Eigen::Index i) const;
        Eigen::VectorXd apply_C(Eigen::Index i, const Eigen::VectorXd &x) const;
        Eigen::VectorXd apply_D(Eigen::Index i, const Eigen::VectorXd &x) const;
    };

    struct TrigState
    {
        Eigen::MatrixXd g; // [M, K], cos(v_k t_m)
        Eigen::MatrixXd q; // [M, K], sin(v_k t_m)

        TrigState(const Apv &t, const Eigen::VectorXd &spatial_freq);
    };

    struct QuadraticForms
    {
        Eigen::MatrixXd f; // [K, K], f(k, i) = |a^H(t, theta_k) w_i|^2
        Eigen::VectorXd h; // [K], Re{a^H(t, theta_k) w_k}
    };

    QuadraticForms quadratic_forms(const Apv &t, const Beamformers &W, const ChannelSet &ch);

    // Gradient of objective() with respect to t. Only the gains and spatial
    // frequencies of `ch` are used; the channel vectors are rebuilt at t.
    Eigen::VectorXd grad_t(const Apv &t, const Beamformers &W, const AuxState &aux, const ChannelSet &ch);

    // objective() evaluated with channels rebuilt at positions t.
    double position_objective(const Scenario &s, const Apv &t, const Beamformers &W, const AuxState &aux);

    struct EpgOptions
    {
        int max_iter = 200;
        double step0 = 0.0;       // initial step; <= 0 selects one wavelength
        double armijo = 1e-4;
        double shrink = 0.5;
        int max_backtracks = 30;
        double tol = 1e-10;       // stop when max |t^{i+1} - t^i| falls below tol [m]
        bool restart = true;      // reset momentum after two consecutive increases

        void validate() const;
    };

    struct EpgResult
    {
        Apv t;
        double value = 0.0;          // objective at t
        double initial_value = 0.0;
        int iterations = 0;
        bool converged = false;
        int projection_failures = 0; // backtracking trials whose surrogate set was empty
        std::vector<double> history; // objective at each accepted iterate
    };

    // Momentum weights: alpha_1 = 0, alpha_{i+1} = (1 + sqrt(1 + 4 alpha_i^2)) / 2,
    // zeta_{i+1} = (alpha_{i+1} - 1) / alpha_{i+1}.
    double next_alpha(double alpha);
    double momentum_weight(double alpha_next);

    // Requires t_init feasible for the box and spacing constraints and, when
    // Pt > 0, a^H(t_init) R_w a(t_init) >= Pt. Returns the best accepted
    // iterate, so value <= initial_value.
    EpgResult epg_solve(const Apv &t_init, const Beamformers &W, const AuxState &aux, const Scenario &s,
                        const EpgOptions &opts);

} // namespace faisac

#endif // FAISAC_EPG_HPP
