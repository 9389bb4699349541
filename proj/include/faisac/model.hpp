// SPDX-License-Identifier: Apache-2.0
//
// Physical model of a fluid-antenna ISAC downlink: a linear array of M
// movable elements serves K single-antenna users over line-of-sight paths
// while radiating probing power toward a sensing direction.
// ------------------------------------------------------------------------

#ifndef FAISAC_MODEL_HPP
#define FAISAC_MODEL_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace faisac
{
    using cplx = std::complex<double>;

    // Antenna position vector in meters, ascending along the aperture [0, D].
    using Apv = Eigen::VectorXd;

    // Stacked beamformers, size [M, K]; column k is the beamformer of user k.
    using Beamformers = Eigen::MatrixXcd;

    // Raised when a problem instance cannot satisfy its constraints at all.
    class InfeasibleError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Full problem instance. All quantities in SI units (meters, watts, radians).
    struct Scenario
    {
        int num_antennas = 0;               // M
        int num_users = 0;                  // K
        double wavelength = 0.01;           // lambda [m]
        double aperture = 0.1;              // D, length of the movable region [m]
        double min_spacing = 0.005;         // D0, minimum inter-element distance [m]
        std::vector<double> user_angles;    // AoD of each user [rad], in [0, pi]
        double probe_angle = 0.0;           // AoD of the sensing direction [rad]
        std::vector<double> noise_power;    // sigma_k^2 per user [W]
        double max_power = 1.0;             // Pmax [W]
        double probe_threshold = 0.0;       // Pt [W]; zero disables the sensing constraint
        double ref_gain = 1e-4;             // g0, power gain at 1 m (linear)
        double pathloss_exponent = 2.8;     // alpha
        std::vector<double> user_distances; // d_k [m]

        // Throws std::invalid_argument naming the offending field.
        void validate() const;
    };

    struct ChannelSet
    {
        Eigen::MatrixXcd h;           // [M, K], column k = delta_k * a(t, theta_k)
        Eigen::VectorXd gain;         // delta_k (amplitude)
        Eigen::VectorXd spatial_freq; // v_k = 2*pi/lambda * cos(theta_k) [rad/m]
    };

    double spatial_frequency(double theta, double wavelength);

    // Amplitude gain sqrt(g0 * d^-alpha); g0 * d^-alpha is a power gain.
    double propagation_gain(double ref_gain, double distance, double pathloss_exponent);

    Eigen::VectorXcd steering_vector(const Apv &t, double theta, double wavelength);

    ChannelSet build_channels(const Scenario &s, const Apv &t);

    Eigen::VectorXd sinr(const ChannelSet &ch, const Beamformers &W, const std::vector<double> &noise_power);

    // Sum of log2(1 + SINR_k) in bits/s/Hz.
    double sum_rate(const ChannelSet &ch, const Beamformers &W, const std::vector<double> &noise_power);

    // Transmit covariance R_w = sum_k w_k w_k^H.
    Eigen::MatrixXcd covariance(const Beamformers &W);

    double total_power(const Beamformers &W);

    // a^H R_w a = sum_k |a^H w_k|^2 for a = a(t, theta).
    double probing_power(const Beamformers &W, const Apv &t, double theta, double wavelength);
    double probing_power(const Beamformers &W, const Eigen::VectorXcd &a);

    Eigen::VectorXd beampattern(const Beamformers &W, const Apv &t, double wavelength,
                                const std::vector<double> &grid);

    // Positions t_m = m * D / (M - 1), spanning the full aperture.
    Apv uniform_positions(int num_antennas, double aperture);

    // Conventional half-wavelength array starting at the origin.
    Apv half_wavelength_positions(int num_antennas, double wavelength);

    // Smallest gap between consecutive elements (+inf for M = 1).
    double smallest_gap(const Apv &t);

    // Box and spacing feasibility with slack tol on every inequality.
    bool positions_feasible(const Apv &t, double aperture, double min_spacing, double tol);

    // Reference instances used throughout the experiments: D0 = lambda/2,
    // D = 10 lambda, lambda = 1 cm, theta = 60 deg, sigma^2 = -80 dBm,
    // g0 = -40 dB, alpha = 2.8, d_k = 100 m, Pmax = 30 dBm.
    Scenario two_user_scenario(double probe_threshold);
    Scenario eight_user_scenario(double probe_threshold);

    double dbm_to_watt(double dbm);
    double db_to_linear(double db);
    double deg_to_rad(double deg);
    double rad_to_deg(double rad);

} // namespace faisac

#endif // FAISAC_MODEL_HPP
