// SPDX-License-Identifier: Apache-2.0

#include "faisac/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace faisac
{
    namespace
    {
        void require(bool cond, const std::string &field, const std::string &what)
        {
            if (!cond)
                throw std::invalid_argument("scenario." + field + ": " + what);
        }
    }

    void Scenario::validate() const
    {
        require(num_antennas >= 1, "num_antennas", "need at least one antenna");
        require(num_users >= 1, "num_users", "need at least one user");
        require(std::isfinite(wavelength) && wavelength > 0.0, "wavelength", "must be positive");
        require(std::isfinite(min_spacing) && min_spacing >= 0.0, "min_spacing", "must be non-negative");
        require(std::isfinite(aperture) && aperture >= 0.0, "aperture", "must be non-negative");
        require(aperture >= (num_antennas - 1) * min_spacing * (1.0 - 1e-12), "aperture",
                "aperture shorter than (M-1)*D0, spacing constraints are infeasible");

        const auto K = static_cast<std::size_t>(num_users);
        require(user_angles.size() == K, "user_angles", "expected K angles");
        require(noise_power.size() == K, "noise_power", "expected K noise powers");
        require(user_distances.size() == K, "user_distances", "expected K distances");
        for (std::size_t k = 0; k < K; ++k)
        {
            require(user_angles[k] >= 0.0 && user_angles[k] <= std::numbers::pi, "user_angles",
                    "angles must lie in [0, pi]");
            require(std::isfinite(noise_power[k]) && noise_power[k] > 0.0, "noise_power", "must be positive");
            require(std::isfinite(user_distances[k]) && user_distances[k] > 0.0, "user_distances", "must be positive");
        }
        require(probe_angle >= 0.0 && probe_angle <= std::numbers::pi, "probe_angle", "angle must lie in [0, pi]");
        require(std::isfinite(max_power) && max_power > 0.0, "max_power", "must be positive");
        require(std::isfinite(probe_threshold) && probe_threshold >= 0.0, "probe_threshold", "must be non-negative");
        require(std::isfinite(ref_gain) && ref_gain > 0.0, "ref_gain", "must be positive");
        require(std::isfinite(pathloss_exponent), "pathloss_exponent", "must be finite");
    }

    double spatial_frequency(double theta, double wavelength)
    {
        return 2.0 * std::numbers::pi / wavelength * std::cos(theta);
    }

    double propagation_gain(double ref_gain, double distance, double pathloss_exponent)
    {
        return std::sqrt(ref_gain * std::pow(distance, -pathloss_exponent));
    }

    Eigen::VectorXcd steering_vector(const Apv &t, double theta, double wavelength)
    {
        const double v = spatial_frequency(theta, wavelength);
        Eigen::VectorXcd a(t.size());
        for (Eigen::Index m = 0; m < t.size(); ++m)
            a[m] = std::polar(1.0, v * t[m]);
        return a;
    }

    ChannelSet build_channels(const Scenario &s, const Apv &t)
    {
        const int K = s.num_users;
        ChannelSet ch;
        ch.h.resize(t.size(), K);
        ch.gain.resize(K);
        ch.spatial_freq.resize(K);
        for (int k = 0; k < K; ++k)
        {
            ch.gain[k] = propagation_gain(s.ref_gain, s.user_distances[k], s.pathloss_exponent);
            ch.spatial_freq[k] = spatial_frequency(s.user_angles[k], s.wavelength);
            ch.h.col(k) = ch.gain[k] * steering_vector(t, s.user_angles[k], s.wavelength);
        }
        return ch;
    }

    Eigen::VectorXd sinr(const ChannelSet &ch, const Beamformers &W, const std::vector<double> &noise_power)
    {
        // G(k, i) = h_k^H w_i
        const Eigen::MatrixXcd G = ch.h.adjoint() * W;
        const Eigen::Index K = G.rows();
        Eigen::VectorXd gamma(K);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const double total = G.row(k).squaredNorm();
            const double desired = std::norm(G(k, k));
            gamma[k] = desired / (total - desired + noise_power[k]);
        }
        return gamma;
    }

    double sum_rate(const ChannelSet &ch, const Beamformers &W, const std::vector<double> &noise_power)
    {
        const Eigen::VectorXd gamma = sinr(ch, W, noise_power);
        double r = 0.0;
        for (Eigen::Index k = 0; k < gamma.size(); ++k)
            r += std::log2(1.0 + gamma[k]);
        return r;
    }

    Eigen::MatrixXcd covariance(const Beamformers &W)
    {
        return W * W.adjoint();
    }

    double total_power(const Beamformers &W)
    {
        return W.squaredNorm();
    }

    double probing_power(const Beamformers &W, const Eigen::VectorXcd &a)
    {
        return (a.adjoint() * W).squaredNorm();
    }

    double probing_power(const Beamformers &W, const Apv &t, double theta, double wavelength)
    {
        return probing_power(W, steering_vector(t, theta, wavelength));
    }

    Eigen::VectorXd beampattern(const Beamformers &W, const Apv &t, double wavelength,
                                const std::vector<double> &grid)
    {
        if (grid.empty())
            throw std::invalid_argument("beampattern: angle grid is empty");
        Eigen::VectorXd p(static_cast<Eigen::Index>(grid.size()));
        for (std::size_t i = 0; i < grid.size(); ++i)
            p[static_cast<Eigen::Index>(i)] = probing_power(W, t, grid[i], wavelength);
        return p;
    }

    Apv uniform_positions(int num_antennas, double aperture)
    {
        if (num_antennas == 1)
            return Apv::Zero(1);
        return Apv::LinSpaced(num_antennas, 0.0, aperture);
    }

    Apv half_wavelength_positions(int num_antennas, double wavelength)
    {
        Apv t(num_antennas);
        for (int m = 0; m < num_antennas; ++m)
            t[m] = m * wavelength / 2.0;
        return t;
    }

    double smallest_gap(const Apv &t)
    {
        double gap = std::numeric_limits<double>::infinity();
        for (Eigen::Index m = 1; m < t.size(); ++m)
            gap = std::min(gap, t[m] - t[m - 1]);
        return gap;
    }

    bool positions_feasible(const Apv &t, double aperture, double min_spacing, double tol)
    {
        if (t.size() == 0 || !t.allFinite())
            return false;
        if (t[0] < -tol || t[t.size() - 1] > aperture + tol)
            return false;
        return smallest_gap(t) >= min_spacing - tol;
    }

    namespace
    {
        Scenario reference_scenario(std::vector<double> angles_deg, double probe_threshold)
        {
            Scenario s;
            s.num_antennas = 8;
            s.num_users = static_cast<int>(angles_deg.size());
            s.wavelength = 0.01;
            s.min_spacing = s.wavelength / 2.0;
            s.aperture = 10.0 * s.wavelength;
            s.probe_angle = deg_to_rad(60.0);
            s.max_power = dbm_to_watt(30.0);
            s.probe_threshold = probe_threshold;
            s.ref_gain = db_to_linear(-40.0);
            s.pathloss_exponent = 2.8;
            for (double a : angles_deg)
            {
                s.user_angles.push_back(deg_to_rad(a));
                s.noise_power.push_back(dbm_to_watt(-80.0));
                s.user_distances.push_back(100.0);
            }
            return s;
        }
    }

    Scenario two_user_scenario(double probe_threshold)
    {
        return reference_scenario({90.0, 120.0}, probe_threshold);
    }

    Scenario eight_user_scenario(double probe_threshold)
    {
        return reference_scenario({10.0, 30.0, 80.0, 90.0, 120.0, 130.0, 150.0, 170.0}, probe_threshold);
    }

    double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
    double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

} // namespace faisac
