// SPDX-License-Identifier: Apache-2.0
//
// Weighted-MMSE surrogate of the sum rate. For fixed positions the sum rate
// is recovered from
//
//   F(w, u, rho) = sum_k [ rho_k e_k - ln rho_k - 1 ] + K,
//   e_k = |1 - u_k^* h_k^H w_k|^2 + sum_{i != k} |u_k|^2 |h_k^H w_i|^2 + |u_k|^2 sigma_k^2,
//
// whose minimum over (u, rho) equals K - ln(2) * sum_rate(w). With (u, rho)
// fixed, F is a convex quadratic in w:
//
//   F = sum_k [ w_k^H A w_k - 2 Re{b_k^H w_k} ] + const,
//   A = sum_k rho_k |u_k|^2 h_k h_k^H,  b_k = rho_k u_k h_k.
//
// The noise contribution rho_k |u_k|^2 sigma_k^2 is constant in w and lives
// in the constant, not in A.
// ------------------------------------------------------------------------

#ifndef FAISAC_WMMSE_HPP
#define FAISAC_WMMSE_HPP

#include "faisac/model.hpp"

namespace faisac
{
    struct AuxState
    {
        Eigen::VectorXcd u;   // MMSE receive coefficients
        Eigen::VectorXd rho;  // MSE weights, strictly positive
    };

    struct QuadraticData
    {
        Eigen::MatrixXcd A; // [M, M] Hermitian PSD
        Eigen::MatrixXcd b; // [M, K], column k = rho_k u_k h_k
    };

    // u_k = h_k^H w_k / (sum_i |h_k^H w_i|^2 + sigma_k^2)
    Eigen::VectorXcd update_u(const ChannelSet &ch, const Beamformers &W, const std::vector<double> &noise_power);

    // rho_k = 1 / (1 - u_k^* h_k^H w_k). Throws std::invalid_argument when the
    // denominator is not a positive real, i.e. u is not the MMSE receiver.
    Eigen::VectorXd update_rho(const ChannelSet &ch, const Beamformers &W, const Eigen::VectorXcd &u);

    // Both closed-form block updates in sequence.
    AuxState update_aux(const ChannelSet &ch, const Beamformers &W, const std::vector<double> &noise_power);

    // Full surrogate value F (natural log), constants included.
    double objective(const ChannelSet &ch, const Beamformers &W, const AuxState &aux,
                     const std::vector<double> &noise_power);

    QuadraticData assemble_quadratic(const ChannelSet &ch, const AuxState &aux);

    // sum_k [ w_k^H A w_k - 2 Re{b_k^H w_k} ]; differs from objective() by a
    // w-independent constant.
    double quadratic_value(const QuadraticData &quad, const Beamformers &W);

} // namespace faisac

#endif // FAISAC_WMMSE_HPP
