// SPDX-License-Identifier: Apache-2.0

#include "faisac/wmmse.hpp"

#include <cmath>

namespace faisac
{
    Eigen::VectorXcd update_u(const ChannelSet &ch, const Beamformers &W, const std::vector<double> &noise_power)
    {
        const Eigen::MatrixXcd G = ch.h.adjoint() * W;
        const Eigen::Index K = G.rows();
        Eigen::VectorXcd u(K);
        for (Eigen::Index k = 0; k < K; ++k)
            u[k] = G(k, k) / (G.row(k).squaredNorm() + noise_power[k]);
        return u;
    }

    Eigen::VectorXd update_rho(const ChannelSet &ch, const Beamformers &W, const Eigen::VectorXcd &u)
    {
        const Eigen::Index K = u.size();
        Eigen::VectorXd rho(K);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const cplx gkk = ch.h.col(k).dot(W.col(k)); // h_k^H w_k
            const cplx den = 1.0 - std::conj(u[k]) * gkk;
            if (!(den.real() > 0.0) || std::abs(den.imag()) > 1e-8 * std::abs(den))
                throw std::invalid_argument("update_rho: 1 - u_k^* h_k^H w_k is not a positive real; "
                                            "u is not the MMSE receiver");
            rho[k] = 1.0 / den.real();
        }
        return rho;
    }

    AuxState update_aux(const ChannelSet &ch, const Beamformers &W, const std::vector<double> &noise_power)
    {
        AuxState aux;
        aux.u = update_u(ch, W, noise_power);
        aux.rho = update_rho(ch, W, aux.u);
        return aux;
    }

    double objective(const ChannelSet &ch, const Beamformers &W, const AuxState &aux,
                     const std::vector<double> &noise_power)
    {
        const Eigen::MatrixXcd G = ch.h.adjoint() * W;
        const Eigen::Index K = G.rows();
        double F = static_cast<double>(K);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const double u2 = std::norm(aux.u[k]);
            const double interference = G.row(k).squaredNorm() - std::norm(G(k, k));
            const double e = std::norm(1.0 - std::conj(aux.u[k]) * G(k, k)) + u2 * interference +
                             u2 * noise_power[static_cast<std::size_t>(k)];
            F += aux.rho[k] * e - std::log(aux.rho[k]) - 1.0;
        }
        return F;
    }

    QuadraticData assemble_quadratic(const ChannelSet &ch, const AuxState &aux)
    {
        const Eigen::Index M = ch.h.rows();
        const Eigen::Index K = ch.h.cols();
        QuadraticData q;
        q.A = Eigen::MatrixXcd::Zero(M, M);
        q.b.resize(M, K);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const double weight = aux.rho[k] * std::norm(aux.u[k]);
            q.A.noalias() += weight * ch.h.col(k) * ch.h.col(k).adjoint();
            q.b.col(k) = aux.rho[k] * aux.u[k] * ch.h.col(k);
        }
        // exact Hermitian symmetry regardless of rounding in the outer products
        q.A = (0.5 * (q.A + q.A.adjoint())).eval();
        return q;
    }

    double quadratic_value(const QuadraticData &quad, const Beamformers &W)
    {
        double v = 0.0;
        for (Eigen::Index k = 0; k < W.cols(); ++k)
        {
            const auto w = W.col(k);
            v += w.dot(quad.A * w).real() - 2.0 * quad.b.col(k).dot(w).real();
        }
        return v;
    }

} // namespace faisac
