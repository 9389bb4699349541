// SPDX-License-Identifier: Apache-2.0
//
// JSON configuration for the experiment driver. Quantities are read in SI
// units unless the key carries a unit suffix: `_dbm` (power), `_db` (gain)
// or `_deg` (angle). Conversion happens once here; everything downstream
// works in watts, meters and radians.
// ------------------------------------------------------------------------

#ifndef FAISAC_CONFIG_HPP
#define FAISAC_CONFIG_HPP

#include "faisac/baselines.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace faisac
{
    // Parse or validation failure. The message names the offending field, or
    // the line and column for malformed JSON.
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    using Json = nlohmann::json;

    Json parse_json_text(const std::string &text, const std::string &source = "config");
    Json load_json_file(const std::string &path);

    // Keys of a scenario object:
    //   preset               "two_user" | "eight_user"; other keys override it
    //   num_antennas, num_users
    //   wavelength, aperture, min_spacing                 [m]
    //   user_angles | user_angles_deg                     [rad] or [deg]
    //   probe_angle | probe_angle_deg
    //   noise_power | noise_power_dbm                     scalar or per user
    //   max_power | max_power_dbm
    //   probe_threshold | probe_threshold_dbm
    //   ref_gain | ref_gain_db
    //   pathloss_exponent
    //   user_distances                                    [m], scalar or per user
    Scenario parse_scenario(const Json &j, const std::string &where = "scenario");

    // Keys: max_outer, outer_tol, stall_cycles, starts, screen_cycles, finalists,
    // seed, pda {...}, epg {...}.
    BsumOptions parse_bsum_options(const Json &j, const std::string &where = "solver");

    // Keys: particles, iterations, inertia, cognitive, social, seed,
    // inner_bsum_iters, init_velocity, infeasible_penalty, workers.
    PsoOptions parse_pso_options(const Json &j, const std::string &where = "pso");

    enum class Method
    {
        bsum,
        fpa,
        pso
    };

    Method parse_method(const std::string &name, const std::string &where = "method");
    std::string method_name(Method m);

    struct RunConfig
    {
        Scenario scenario;
        Method method = Method::bsum;
        BsumOptions solver;
        PsoOptions pso;
    };

    // Top level: scenario {...}, method, solver {...}, pso {...}.
    RunConfig parse_run_config(const Json &j);
    RunConfig load_run_config(const std::string &path);

} // namespace faisac

#endif // FAISAC_CONFIG_HPP
