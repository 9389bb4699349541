// SPDX-License-Identifier: Apache-2.0
//
// Serialized forms of solver output: the sweep table (CSV), full solution
// records (JSON) and beampattern tables (CSV). CSV files start with a
// versioned comment line and print reals with 12 significant digits.
// ------------------------------------------------------------------------

#ifndef FAISAC_RECORDS_HPP
#define FAISAC_RECORDS_HPP

#include "faisac/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace faisac
{
    inline constexpr const char *sweep_schema = "# faisac sweep v1";
    inline constexpr const char *beampattern_schema = "# faisac beampattern v1";
    inline constexpr const char *solution_schema = "faisac.solution/1";
    inline constexpr const char *error_schema = "faisac.error/1";

    // Malformed CSV or solution record.
    class FormatError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct ResultRow
    {
        std::string method;
        std::string parameter;     // swept parameter, or "none" for a single run
        double value = 0.0;        // swept value in SI units (M as a count)
        int repetition = 0;
        std::uint64_t seed = 0;
        double sum_rate = 0.0;     // NaN when the point failed
        double probing = 0.0;
        double power = 0.0;
        double wall_ms = 0.0;
        int iterations = 0;
        bool feasible = false;

        bool operator==(const ResultRow &o) const;
    };

    // Formats a real with 12 significant digits ("nan", "inf" for non-finite).
    std::string format_real(double x);

    void write_rows_csv(std::ostream &out, const std::vector<ResultRow> &rows);
    std::vector<ResultRow> read_rows_csv(std::istream &in);

    ResultRow row_from_solution(const Solution &sol, const std::string &method, const std::string &parameter,
                                double value, int repetition, std::uint64_t seed);

    // Scenario in SI units under the unsuffixed keys accepted by parse_scenario.
    Json scenario_to_json(const Scenario &s);

    // Full record: scenario, metrics, positions, beamformers and trace. Reals
    // are written at full double precision.
    Json solution_to_json(const Scenario &s, const Solution &sol, const std::string &method, std::uint64_t seed);

    Json error_to_json(const std::string &kind, const std::string &message);

    struct SolutionRecord
    {
        Scenario scenario;
        Beamformers W;
        Apv t;
        Json metrics; // as written: sum_rate, probing, power, feasible, ...
    };

    SolutionRecord solution_from_json(const Json &j);

    // Angles 0..180 degrees in 0.5 degree steps.
    std::vector<double> default_angle_grid_deg();

    // P(theta) = a^H R_w a over a grid given in degrees.
    void write_beampattern_csv(std::ostream &out, const std::vector<double> &grid_deg, const Eigen::VectorXd &gain);

} // namespace faisac

#endif // FAISAC_RECORDS_HPP
