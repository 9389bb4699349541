// SPDX-License-Identifier: Apache-2.0

#include "faisac/epg.hpp"

#include <cmath>
#include <limits>

namespace faisac
{
    WSplit::WSplit(const Beamformers &W) : re(W.real()), im(W.imag()) {}

    Eigen::MatrixXd WSplit::C(Eigen::Index i) const
    {
        return re.col(i) * re.col(i).transpose() + im.col(i) * im.col(i).transpose();
    }

    Eigen::MatrixXd WSplit::D(Eigen::Index i) const
    {
        return re.col(i) * im.col(i).transpose() - im.col(i) * re.col(i).transpose();
    }

    Eigen::VectorXd WSplit::apply_C(Eigen::Index i, const Eigen::VectorXd &x) const
    {
        return re.col(i) * re.col(i).dot(x) + im.col(i) * im.col(i).dot(x);
    }

    Eigen::VectorXd WSplit::apply_D(Eigen::Index i, const Eigen::VectorXd &x) const
    {
        return re.col(i) * im.col(i).dot(x) - im.col(i) * re.col(i).dot(x);
    }

    TrigState::TrigState(const Apv &t, const Eigen::VectorXd &spatial_freq)
        : g(t.size(), spatial_freq.size()), q(t.size(), spatial_freq.size())
    {
        for (Eigen::Index k = 0; k < spatial_freq.size(); ++k)
        {
            for (Eigen::Index m = 0; m < t.size(); ++m)
            {
                const double ph = spatial_freq[k] * t[m];
                g(m, k) = std::cos(ph);
                q(m, k) = std::sin(ph);
            }
        }
    }

    QuadraticForms quadratic_forms(const Apv &t, const Beamformers &W, const ChannelSet &ch)
    {
        const WSplit ws(W);
        const TrigState trig(t, ch.spatial_freq);
        const Eigen::Index K = W.cols();

        QuadraticForms out;
        out.f.resize(K, K);
        out.h.resize(K);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const auto g = trig.g.col(k);
            const auto q = trig.q.col(k);
            for (Eigen::Index i = 0; i < K; ++i)
            {
                // g^T C g + q^T C q + 2 g^T D q with the rank-two factors expanded
                const double ga = g.dot(ws.re.col(i)), gb = g.dot(ws.im.col(i));
                const double qa = q.dot(ws.re.col(i)), qb = q.dot(ws.im.col(i));
                out.f(k, i) = ga * ga + gb * gb + qa * qa + qb * qb + 2.0 * (ga * qb - gb * qa);
            }
            out.h[k] = g.dot(ws.re.col(k)) + q.dot(ws.im.col(k));
        }
        return out;
    }

    Eigen::VectorXd grad_t(const Apv &t, const Beamformers &W, const AuxState &aux, const ChannelSet &ch)
    {
        const WSplit ws(W);
        const TrigState trig(t, ch.spatial_freq);
        const Eigen::Index M = t.size();
        const Eigen::Index K = W.cols();

        Eigen::VectorXd grad = Eigen::VectorXd::Zero(M);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const double v = ch.spatial_freq[k];
            if (v == 0.0)
                continue;
            const Eigen::VectorXd g = trig.g.col(k);
            const Eigen::VectorXd q = trig.q.col(k);
            const double delta = ch.gain[k];

            // interference-plus-signal power terms, d f_{k,i} / dt
            const double wf = aux.rho[k] * std::norm(aux.u[k]) * delta * delta;
            if (wf != 0.0)
            {
                Eigen::VectorXd df = Eigen::VectorXd::Zero(M);
                for (Eigen::Index i = 0; i < K; ++i)
                {
                    const Eigen::VectorXd Cq = ws.apply_C(i, q), Cg = ws.apply_C(i, g);
                    const Eigen::VectorXd Dq = ws.apply_D(i, q), Dg = ws.apply_D(i, g);
                    df += g.cwiseProduct(Cq - Dg) - q.cwiseProduct(Cg + Dq);
                }
                grad += wf * 2.0 * v * df;
            }

            // cross term -2 Re{rho_k u_k^* delta_k a^H w_k}; both the real and the
            // imaginary part of a^H w_k depend on t
            const Eigen::VectorXd a = ws.re.col(k), b = ws.im.col(k);
            const Eigen::VectorXd d_re = v * (g.cwiseProduct(b) - q.cwiseProduct(a));
            const Eigen::VectorXd d_im = -v * (q.cwiseProduct(b) + g.cwiseProduct(a));
            grad -= 2.0 * aux.rho[k] * delta * (aux.u[k].real() * d_re + aux.u[k].imag() * d_im);
        }
        return grad;
    }

    double position_objective(const Scenario &s, const Apv &t, const Beamformers &W, const AuxState &aux)
    {
        return objective(build_channels(s, t), W, aux, s.noise_power);
    }

    void EpgOptions::validate() const
    {
        if (max_iter < 1 || max_backtracks < 0)
            throw std::invalid_argument("epg: iteration limits must be positive");
        if (!(armijo > 0.0 && armijo < 1.0))
            throw std::invalid_argument("epg.armijo must lie in (0, 1)");
        if (!(shrink > 0.0 && shrink < 1.0))
            throw std::invalid_argument("epg.shrink must lie in (0, 1)");
        if (!(tol > 0.0))
            throw std::invalid_argument("epg.tol must be positive");
    }

    double next_alpha(double alpha)
    {
        return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * alpha * alpha));
    }

    double momentum_weight(double alpha_next)
    {
        return (alpha_next - 1.0) / alpha_next;
    }

    EpgResult epg_solve(const Apv &t_init, const Beamformers &W, const AuxState &aux, const Scenario &s,
                        const EpgOptions &opts)
    {
        opts.validate();
        const ChannelSet ch0 = build_channels(s, t_init);
        const Eigen::MatrixXcd Rw = covariance(W);
        const bool sensing = s.probe_threshold > 0.0;
        const double step0 = opts.step0 > 0.0 ? opts.step0 : s.wavelength;

        auto F = [&](const Apv &t) { return position_objective(s, t, W, aux); };

        EpgResult res;
        res.t = t_init;
        res.initial_value = F(t_init);
        res.value = res.initial_value;
        res.history.push_back(res.value);

        Apv t = t_init;
        Apv z = t_init;
        double Ft = res.initial_value;
        double alpha = 0.0;
        double eta = step0;
        int increases = 0;

        for (int it = 1; it <= opts.max_iter; ++it)
        {
            res.iterations = it;
            Surrogate sur;
            if (sensing)
                sur = build_surrogate(t, Rw, s.probe_angle, s.wavelength);

            const Eigen::VectorXd grad = grad_t(z, W, aux, ch0);
            const double Fz = F(z);

            bool accepted = false;
            Apv t_new;
            double F_new = 0.0;
            double trial = std::min(2.0 * eta, step0);
            for (int bt = 0; bt <= opts.max_backtracks; ++bt, trial *= opts.shrink)
            {
                const Eigen::VectorXd kappa = z - trial * grad;
                if (sensing)
                {
                    const FeasibleProjection p =
                        project_feasible(kappa, sur, s.min_spacing, s.aperture, s.probe_threshold);
                    if (!p.feasible)
                    {
                        ++res.projection_failures;
                        continue;
                    }
                    t_new = p.t;
                }
                else
                    t_new = project_chain(kappa, s.min_spacing, s.aperture);

                F_new = F(t_new);
                if (F_new <= Fz + opts.armijo * grad.dot(t_new - z))
                {
                    accepted = true;
                    eta = trial;
                    break;
                }
            }

            if (!accepted)
            {
                // retry from the last iterate without momentum before giving up
                if ((z - t).lpNorm<Eigen::Infinity>() > 0.0)
                {
                    z = t;
                    alpha = 0.0;
                    continue;
                }
                break;
            }

            double alpha_next = next_alpha(alpha);
            increases = F_new > Ft ? increases + 1 : 0;
            if (opts.restart && increases >= 2)
            {
                alpha_next = 0.0;
                increases = 0;
            }
            const double zeta = alpha_next > 0.0 ? momentum_weight(alpha_next) : 0.0;

            const double step = (t_new - t).lpNorm<Eigen::Infinity>();
            z = t_new + zeta * (t_new - t);
            t = t_new;
            Ft = F_new;
            alpha = alpha_next;
            res.history.push_back(Ft);

            if (Ft < res.value)
            {
                res.value = Ft;
                res.t = t;
            }
            if (step < opts.tol)
            {
                res.converged = true;
                break;
            }
        }
        return res;
    }

} // namespace faisac
