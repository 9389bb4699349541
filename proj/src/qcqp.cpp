// SPDX-License-Identifier: Apache-2.0

#include "faisac/qcqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace faisac
{
    double Surrogate::value(const Apv &t) const
    {
        return t.dot(Dm * t) - 2.0 * d.dot(t) + c;
    }

    Eigen::VectorXd Surrogate::gradient(const Apv &t) const
    {
        return 2.0 * (Dm * t) - 2.0 * d;
    }

    Surrogate build_surrogate(const Apv &t_tilde, const Eigen::MatrixXcd &Rw, double theta, double wavelength)
    {
        const Eigen::Index M = t_tilde.size();
        Surrogate s;
        s.v = spatial_frequency(theta, wavelength);
        s.expansion = t_tilde;
        const double v = s.v;

        const Eigen::MatrixXd mag = Rw.cwiseAbs();
        // column sums r_n = sum_m |R_mn|
        const Eigen::VectorXd r = mag.colwise().sum().transpose();
        s.Dm = -v * v * (Eigen::MatrixXd(r.asDiagonal()) - mag);

        s.d = Eigen::VectorXd::Zero(M);
        s.c = 0.0;
        for (Eigen::Index n = 0; n < M; ++n)
        {
            for (Eigen::Index m = 0; m < M; ++m)
            {
                const double w = mag(m, n);
                if (w == 0.0)
                    continue; // phase of a zero entry is irrelevant
                const double diff = t_tilde[n] - t_tilde[m];
                const double f = v * diff + std::arg(Rw(m, n));
                const double sf = std::sin(f);
                s.d[n] += v * w * sf - v * v * w * diff;
                s.c += w * (std::cos(f) + v * sf * diff - 0.5 * v * v * diff * diff);
            }
        }
        return s;
    }

    Apv project_chain(const Eigen::VectorXd &kappa, double min_spacing, double aperture)
    {
        const Eigen::Index M = kappa.size();
        const double upper = aperture - (M - 1) * min_spacing;
        if (upper < -1e-12 * std::max(1.0, aperture))
            throw std::invalid_argument("project_chain: aperture shorter than (M-1)*D0");

        // Pool-adjacent-violators on the shifted targets y_m = kappa_m - m*D0.
        std::vector<double> level;
        std::vector<Eigen::Index> count;
        level.reserve(static_cast<std::size_t>(M));
        count.reserve(static_cast<std::size_t>(M));
        for (Eigen::Index m = 0; m < M; ++m)
        {
            level.push_back(kappa[m] - m * min_spacing);
            count.push_back(1);
            while (level.size() > 1 && level[level.size() - 2] > level.back())
            {
                const double n1 = static_cast<double>(count[count.size() - 2]);
                const double n2 = static_cast<double>(count.back());
                const double merged = (n1 * level[level.size() - 2] + n2 * level.back()) / (n1 + n2);
                count[count.size() - 2] += count.back();
                level[level.size() - 2] = merged;
                level.pop_back();
                count.pop_back();
            }
        }

        Apv t(M);
        Eigen::Index m = 0;
        for (std::size_t b = 0; b < level.size(); ++b)
        {
            const double s = std::clamp(level[b], 0.0, std::max(upper, 0.0));
            for (Eigen::Index j = 0; j < count[b]; ++j, ++m)
                t[m] = s + m * min_spacing;
        }
        return t;
    }

    namespace
    {
        // Chain constraints as rows of A t >= e: t_1 >= 0, spacing rows, -t_M >= -D.
        struct ChainConstraints
        {
            Eigen::MatrixXd A;
            Eigen::VectorXd e;
        };

        ChainConstraints chain_constraints(Eigen::Index M, double min_spacing, double aperture)
        {
            ChainConstraints c;
            c.A = Eigen::MatrixXd::Zero(M + 1, M);
            c.e.resize(M + 1);
            c.A(0, 0) = 1.0;
            c.e[0] = 0.0;
            for (Eigen::Index m = 1; m < M; ++m)
            {
                c.A(m, m) = 1.0;
                c.A(m, m - 1) = -1.0;
                c.e[m] = min_spacing;
            }
            c.A(M, M - 1) = -1.0;
            c.e[M] = -aperture;
            return c;
        }
    }

    Apv chain_qp(const Eigen::MatrixXd &Q, const Eigen::VectorXd &r, double min_spacing, double aperture,
                 const Eigen::VectorXd &start)
    {
        const Eigen::Index M = r.size();
        Apv x = project_chain(start, min_spacing, aperture);

        // a zero-width chain admits exactly one point
        if (aperture - (M - 1) * min_spacing <= 1e-15 * std::max(1.0, aperture))
            return x;

        const ChainConstraints cons = chain_constraints(M, min_spacing, aperture);
        const Eigen::Index ncons = M + 1;
        std::vector<Eigen::Index> working;
        std::vector<char> in_working(static_cast<std::size_t>(ncons), 0);

        const double step_eps = 1e-15 * (1.0 + aperture);
        const int max_iter = 50 * static_cast<int>(ncons) + 100;
        for (int it = 0; it < max_iter; ++it)
        {
            const Eigen::VectorXd g = Q * x - r;
            const Eigen::Index nw = static_cast<Eigen::Index>(working.size());

            // [Q  -A_W^T; A_W  0] [p; lambda] = [-g; 0]
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(M + nw, M + nw);
            kkt.topLeftCorner(M, M) = Q;
            for (Eigen::Index j = 0; j < nw; ++j)
            {
                const auto row = cons.A.row(working[static_cast<std::size_t>(j)]);
                kkt.block(0, M + j, M, 1) = -row.transpose();
                kkt.block(M + j, 0, 1, M) = row;
            }
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(M + nw);
            rhs.head(M) = -g;
            const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
            const Eigen::VectorXd p = sol.head(M);

            if (p.lpNorm<Eigen::Infinity>() <= step_eps)
            {
                if (nw == 0)
                    break;
                const Eigen::VectorXd lambda = sol.tail(nw);
                Eigen::Index worst;
                const double lmin = lambda.minCoeff(&worst);
                if (lmin >= -1e-12 * (1.0 + g.lpNorm<Eigen::Infinity>()))
                    break;
                in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(worst)])] = 0;
                working.erase(working.begin() + worst);
                continue;
            }

            double alpha = 1.0;
            Eigen::Index blocking = -1;
            for (Eigen::Index i = 0; i < ncons; ++i)
            {
                if (in_working[static_cast<std::size_t>(i)])
                    continue;
                const double ap = cons.A.row(i).dot(p);
                if (ap >= 0.0)
                    continue;
                const double slack = std::min(0.0, cons.e[i] - cons.A.row(i).dot(x));
                const double a_i = slack / ap;
                if (a_i < alpha)
                {
                    alpha = a_i;
                    blocking = i;
                }
            }
            x += alpha * p;
            if (blocking >= 0)
            {
                working.push_back(blocking);
                in_working[static_cast<std::size_t>(blocking)] = 1;
            }
        }
        // remove rounding-level violations
        return project_chain(x, min_spacing, aperture);
    }

    FeasibleProjection project_feasible(const Eigen::VectorXd &kappa, const Surrogate &sur, double min_spacing,
                                        double aperture, double threshold)
    {
        const Eigen::Index M = kappa.size();
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(M, M);

        FeasibleProjection out;
        out.t = project_chain(kappa, min_spacing, aperture);
        out.surrogate_value = sur.value(out.t);
        if (out.surrogate_value >= threshold)
        {
            out.feasible = true;
            return out;
        }

        // t(mu) minimizes ||t - kappa||^2 + mu (Pt - g(t)) over the chain polytope
        Apv warm = out.t;
        auto solve_at = [&](double mu) {
            warm = chain_qp(I - mu * sur.Dm, kappa - mu * sur.d, min_spacing, aperture, warm);
            return warm;
        };

        const double deficit = threshold - out.surrogate_value;
        const double g2 = sur.gradient(out.t).squaredNorm();
        const double dnorm = std::max(sur.Dm.cwiseAbs().maxCoeff(), 1e-300);
        double lo = 0.0;
        double hi = g2 > 0.0 ? 2.0 * deficit / g2 : 1.0 / dnorm;
        const double cap = 1e14 / dnorm;

        Apv t_hi = solve_at(hi);
        double g_hi = sur.value(t_hi);
        Apv best_t = t_hi;
        double best_g = g_hi;
        while (g_hi < threshold)
        {
            if (g_hi > best_g)
            {
                best_g = g_hi;
                best_t = t_hi;
            }
            if (hi > cap)
            {
                out.t = best_t;
                out.surrogate_value = best_g;
                out.multiplier = hi;
                out.feasible = false;
                return out;
            }
            lo = hi;
            hi *= 4.0;
            t_hi = solve_at(hi);
            g_hi = sur.value(t_hi);
        }

        int bisections = 0;
        while (hi - lo > 1e-10 * hi && bisections < 200)
        {
            const double mid = 0.5 * (lo + hi);
            const Apv t_mid = solve_at(mid);
            const double g_mid = sur.value(t_mid);
            if (g_mid >= threshold)
            {
                hi = mid;
                t_hi = t_mid;
                g_hi = g_mid;
            }
            else
                lo = mid;
            ++bisections;
        }

        out.t = t_hi;
        out.surrogate_value = g_hi;
        out.multiplier = hi;
        out.bisections = bisections;
        out.feasible = true;
        return out;
    }

} // namespace faisac
