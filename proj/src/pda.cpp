// SPDX-License-Identifier: Apache-2.0

#include "faisac/pda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace faisac
{
    void PdaOptions::validate() const
    {
        if (!(penalty0 > 0.0))
            throw std::invalid_argument("pda.penalty0 must be positive");
        if (!(growth > 1.0))
            throw std::invalid_argument("pda.growth must exceed 1");
        if (growth_period < 1)
            throw std::invalid_argument("pda.growth_period must be >= 1");
        if (max_iter < 1)
            throw std::invalid_argument("pda.max_iter must be >= 1");
        if (!(tol > 0.0) || !(feas_tol > 0.0))
            throw std::invalid_argument("pda tolerances must be positive");
    }

    Beamformers project_power(const Beamformers &W, double max_power)
    {
        const double p = W.squaredNorm();
        if (p <= max_power)
            return W;
        return W * std::sqrt(max_power / p);
    }

    Beamformers project_probe(const Beamformers &W, const Eigen::VectorXcd &a, double threshold)
    {
        const Eigen::RowVectorXcd aw = a.adjoint() * W; // a^H w_k per column
        const double S = aw.squaredNorm();
        if (S >= threshold)
            return W;
        if (S <= 0.0)
            throw DegenerateInputError("project_probe: beamformers are orthogonal to the probing direction");

        // KKT multiplier placing the output on sum_k |a^H w_k|^2 = Pt.
        const double n2 = a.squaredNorm();
        const double mu = 1.0 / n2 - std::sqrt(S / (n2 * n2 * threshold));
        // (I - mu a a^H)^{-1} = I + mu a a^H / (1 - mu a^H a)
        const double scale = mu / (1.0 - mu * n2);
        return W + scale * a * aw;
    }

    Beamformers repair_feasibility(const Beamformers &W, const Eigen::VectorXcd &a, double max_power,
                                   double threshold)
    {
        const double n2 = a.squaredNorm();
        if (threshold > n2 * max_power)
            throw InfeasibleError("probing threshold exceeds the matched-beam ceiling ||a||^2 * Pmax");

        Eigen::RowVectorXcd c = (a.adjoint() * W) / n2;
        Beamformers perp = W - a * c;

        // a small inward margin keeps the result feasible after rounding
        const double pt = threshold * (1.0 + 1e-12);
        const double pmax = max_power * (1.0 - 1e-12);

        bool changed = false;
        double probe = n2 * n2 * c.squaredNorm();
        if (threshold > 0.0 && probe < threshold)
        {
            if (probe > 0.0)
                c *= std::sqrt(pt / probe);
            else
                c(0) = std::sqrt(pt) / n2;
            probe = n2 * n2 * c.squaredNorm();
            changed = true;
        }
        const double power = n2 * c.squaredNorm() + perp.squaredNorm();
        if (power > max_power)
        {
            const double shrink = pmax / power;
            if (probe * shrink >= pt || threshold <= 0.0)
            {
                c *= std::sqrt(shrink);
                perp *= std::sqrt(shrink);
            }
            else
            {
                // a-component pinned at the threshold, remainder fills what is left
                c *= std::sqrt(pt / probe);
                const double budget = std::max(0.0, pmax - n2 * c.squaredNorm());
                const double pp = perp.squaredNorm();
                if (pp > budget)
                    perp *= std::sqrt(budget / pp);
            }
            changed = true;
        }
        if (!changed)
            return W;
        return a * c + perp;
    }

    bool beamformers_feasible(const Beamformers &W, const Eigen::VectorXcd &a, double max_power,
                              double threshold, double feas_tol)
    {
        const double power = W.squaredNorm();
        const double probe = probing_power(W, a);
        return power <= max_power + feas_tol * std::max(1.0, max_power) &&
               probe >= threshold - feas_tol * std::max(1.0, threshold);
    }

    namespace
    {
        // Probing projection with the measure-zero orthogonal case nudged along a.
        Beamformers project_probe_safe(const Beamformers &W, const Eigen::VectorXcd &a, double threshold)
        {
            try
            {
                return project_probe(W, a, threshold);
            }
            catch (const DegenerateInputError &)
            {
                Beamformers nudged = W;
                nudged.col(0) += 1e-8 * a;
                return project_probe(nudged, a, threshold);
            }
        }
    }

    double penalized_value(const QuadraticData &quad, const Beamformers &W, const Eigen::VectorXcd &a,
                           double max_power, double threshold, double penalty)
    {
        const double d_bs = (W - project_power(W, max_power)).squaredNorm();
        const double d_t = (W - project_probe_safe(W, a, threshold)).squaredNorm();
        return quadratic_value(quad, W) + penalty * (d_bs + d_t);
    }

    PdaResult pda_solve(const QuadraticData &quad, const Eigen::VectorXcd &a, double max_power,
                        double threshold, const PdaOptions &opts, const Beamformers &w_init)
    {
        opts.validate();
        if (!w_init.allFinite())
            throw std::invalid_argument("pda_solve: initial beamformers are not finite");

        const Eigen::Index M = quad.A.rows();
        const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(M, M);

        PdaResult best;
        best.value = std::numeric_limits<double>::infinity();
        auto consider = [&](const Beamformers &W) {
            if (!beamformers_feasible(W, a, max_power, threshold, opts.feas_tol))
                return;
            const double v = quadratic_value(quad, W);
            if (v < best.value)
            {
                best.W = W;
                best.value = v;
            }
        };
        consider(w_init);

        double penalty = opts.penalty0;
        Eigen::LLT<Eigen::MatrixXcd> llt(quad.A + 2.0 * penalty * I);

        Beamformers w_prev = w_init;
        Beamformers w_cur = w_init;
        int it = 0;
        bool converged = false;
        for (it = 1; it <= opts.max_iter; ++it)
        {
            const double beta = opts.extrapolate ? static_cast<double>(it - 1) / (it + 2) : 0.0;
            const Beamformers z = w_cur + beta * (w_cur - w_prev);
            const Beamformers y = project_power(z, max_power) + project_probe_safe(z, a, threshold);
            Beamformers w_next = llt.solve(penalty * y + quad.b);

            const double change = (w_next - w_cur).norm() / std::max(w_cur.norm(), 1e-300);
            w_prev = std::move(w_cur);
            w_cur = std::move(w_next);

            const bool raw_feasible = beamformers_feasible(w_cur, a, max_power, threshold, opts.feas_tol);
            if (raw_feasible)
                consider(w_cur);
            else if (threshold <= a.squaredNorm() * max_power)
                consider(repair_feasibility(w_cur, a, max_power, threshold));

            if (change < opts.tol && raw_feasible)
            {
                converged = true;
                break;
            }
            if (it % opts.growth_period == 0)
            {
                penalty *= opts.growth;
                llt.compute(quad.A + 2.0 * penalty * I);
            }
        }

        PdaResult out;
        out.iterations = std::min(it, opts.max_iter);
        out.converged = converged;
        out.raw_power = w_cur.squaredNorm();
        out.raw_probing = probing_power(w_cur, a);
        if (std::isfinite(best.value))
        {
            out.W = std::move(best.W);
            out.value = best.value;
            out.feasible = true;
        }
        else
        {
            out.W = w_cur;
            out.value = quadratic_value(quad, w_cur);
            out.feasible = false;
        }
        out.power = out.W.squaredNorm();
        out.probing = probing_power(out.W, a);
        return out;
    }

} // namespace faisac
