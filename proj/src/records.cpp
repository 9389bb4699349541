// SPDX-License-Identifier: Apache-2.0

#include "faisac/records.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace faisac
{
    namespace
    {
        const char *const row_columns =
            "method,parameter,value,repetition,seed,sum_rate,probing,power,wall_ms,iterations,feasible";

        bool same_real(double a, double b)
        {
            return a == b || (std::isnan(a) && std::isnan(b));
        }

        std::vector<std::string> split(const std::string &line)
        {
            std::vector<std::string> out;
            std::string cell;
            std::istringstream in(line);
            while (std::getline(in, cell, ','))
                out.push_back(cell);
            if (!line.empty() && line.back() == ',')
                out.emplace_back();
            return out;
        }

        double parse_real(const std::string &s, std::size_t line)
        {
            if (s == "nan")
                return std::nan("");
            if (s == "inf")
                return std::numeric_limits<double>::infinity();
            if (s == "-inf")
                return -std::numeric_limits<double>::infinity();
            double v = 0.0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                throw FormatError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
            return v;
        }

        template <class Int>
        Int parse_int(const std::string &s, std::size_t line)
        {
            Int v = 0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                throw FormatError("csv line " + std::to_string(line) + ": bad integer '" + s + "'");
            return v;
        }

        std::string strip_cr(std::string s)
        {
            if (!s.empty() && s.back() == '\r')
                s.pop_back();
            return s;
        }

        Json real_or_null(double x)
        {
            return std::isfinite(x) ? Json(x) : Json(nullptr);
        }
    }

    bool ResultRow::operator==(const ResultRow &o) const
    {
        return method == o.method && parameter == o.parameter && same_real(value, o.value) &&
               repetition == o.repetition && seed == o.seed && same_real(sum_rate, o.sum_rate) &&
               same_real(probing, o.probing) && same_real(power, o.power) && same_real(wall_ms, o.wall_ms) &&
               iterations == o.iterations && feasible == o.feasible;
    }

    std::string format_real(double x)
    {
        if (std::isnan(x))
            return "nan";
        if (std::isinf(x))
            return x > 0 ? "inf" : "-inf";
        char buf[64];
        const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
        (void)ec;
        return std::string(buf, p);
    }

    void write_rows_csv(std::ostream &out, const std::vector<ResultRow> &rows)
    {
        out << sweep_schema << '\n' << row_columns << '\n';
        for (const ResultRow &r : rows)
            out << r.method << ',' << r.parameter << ',' << format_real(r.value) << ',' << r.repetition << ','
                << r.seed << ',' << format_real(r.sum_rate) << ',' << format_real(r.probing) << ','
                << format_real(r.power) << ',' << format_real(r.wall_ms) << ',' << r.iterations << ','
                << (r.feasible ? "true" : "false") << '\n';
    }

    std::vector<ResultRow> read_rows_csv(std::istream &in)
    {
        std::string line;
        if (!std::getline(in, line) || strip_cr(line) != sweep_schema)
            throw FormatError(std::string("csv line 1: expected schema line '") + sweep_schema + "'");
        if (!std::getline(in, line) || strip_cr(line) != row_columns)
            throw FormatError("csv line 2: unexpected column header");

        std::vector<ResultRow> rows;
        std::size_t n = 2;
        while (std::getline(in, line))
        {
            ++n;
            line = strip_cr(line);
            if (line.empty())
                continue;
            const std::vector<std::string> c = split(line);
            if (c.size() != 11)
                throw FormatError("csv line " + std::to_string(n) + ": expected 11 columns, found " +
                                  std::to_string(c.size()));
            ResultRow r;
            r.method = c[0];
            r.parameter = c[1];
            r.value = parse_real(c[2], n);
            r.repetition = parse_int<int>(c[3], n);
            r.seed = parse_int<std::uint64_t>(c[4], n);
            r.sum_rate = parse_real(c[5], n);
            r.probing = parse_real(c[6], n);
            r.power = parse_real(c[7], n);
            r.wall_ms = parse_real(c[8], n);
            r.iterations = parse_int<int>(c[9], n);
            if (c[10] != "true" && c[10] != "false")
                throw FormatError("csv line " + std::to_string(n) + ": feasible must be true or false");
            r.feasible = c[10] == "true";
            rows.push_back(std::move(r));
        }
        return rows;
    }

    ResultRow row_from_solution(const Solution &sol, const std::string &method, const std::string &parameter,
                                double value, int repetition, std::uint64_t seed)
    {
        ResultRow r;
        r.method = method;
        r.parameter = parameter;
        r.value = value;
        r.repetition = repetition;
        r.seed = seed;
        r.sum_rate = sol.sum_rate;
        r.probing = sol.probing;
        r.power = sol.power;
        r.wall_ms = sol.wall_ms;
        r.iterations = sol.iterations;
        r.feasible = sol.feasible;
        return r;
    }

    Json scenario_to_json(const Scenario &s)
    {
        Json j;
        j["num_antennas"] = s.num_antennas;
        j["num_users"] = s.num_users;
        j["wavelength"] = s.wavelength;
        j["aperture"] = s.aperture;
        j["min_spacing"] = s.min_spacing;
        j["user_angles"] = s.user_angles;
        j["probe_angle"] = s.probe_angle;
        j["noise_power"] = s.noise_power;
        j["max_power"] = s.max_power;
        j["probe_threshold"] = s.probe_threshold;
        j["ref_gain"] = s.ref_gain;
        j["pathloss_exponent"] = s.pathloss_exponent;
        j["user_distances"] = s.user_distances;
        return j;
    }

    Json solution_to_json(const Scenario &s, const Solution &sol, const std::string &method, std::uint64_t seed)
    {
        const double slack = 1e-6 * std::max(1.0, s.probe_threshold);
        const bool binding = s.probe_threshold > 0.0 && sol.probing <= s.probe_threshold + slack;

        Json j;
        j["schema"] = solution_schema;
        j["method"] = method;
        j["seed"] = seed;
        j["scenario"] = scenario_to_json(s);
        j["sum_rate"] = real_or_null(sol.sum_rate);
        j["probing"] = real_or_null(sol.probing);
        j["power"] = real_or_null(sol.power);
        j["probing_constraint"] = binding ? "active" : "inactive";
        j["feasible"] = sol.feasible;
        j["converged"] = sol.converged;
        j["inner_converged"] = sol.inner_converged;
        j["iterations"] = sol.iterations;
        j["wall_ms"] = sol.wall_ms;
        j["positions"] = std::vector<double>(sol.t.data(), sol.t.data() + sol.t.size());

        Json re = Json::array(), im = Json::array();
        for (Eigen::Index m = 0; m < sol.W.rows(); ++m)
        {
            Json rr = Json::array(), ii = Json::array();
            for (Eigen::Index k = 0; k < sol.W.cols(); ++k)
            {
                rr.push_back(sol.W(m, k).real());
                ii.push_back(sol.W(m, k).imag());
            }
            re.push_back(rr);
            im.push_back(ii);
        }
        j["beamformers"] = {{"re", re}, {"im", im}};

        Json trace = Json::array();
        for (const TraceEntry &e : sol.trace)
            trace.push_back({{"cycle", e.cycle},
                             {"objective", e.objective},
                             {"sum_rate", e.sum_rate},
                             {"probing", e.probing},
                             {"power", e.power},
                             {"wall_ms", e.wall_ms}});
        j["trace"] = trace;
        return j;
    }

    Json error_to_json(const std::string &kind, const std::string &message)
    {
        return {{"schema", error_schema}, {"error", kind}, {"message", message}};
    }

    SolutionRecord solution_from_json(const Json &j)
    {
        if (!j.is_object() || j.value("schema", std::string()) != solution_schema)
            throw FormatError(std::string("solution: expected schema '") + solution_schema + "'");
        for (const char *key : {"scenario", "positions", "beamformers"})
            if (!j.contains(key))
                throw FormatError(std::string("solution.") + key + ": missing");

        SolutionRecord r;
        try
        {
            r.scenario = parse_scenario(j.at("scenario"), "solution.scenario");
        }
        catch (const ConfigError &e)
        {
            throw FormatError(e.what());
        }
        const int M = r.scenario.num_antennas, K = r.scenario.num_users;

        const Json &pos = j.at("positions");
        if (!pos.is_array() || static_cast<int>(pos.size()) != M)
            throw FormatError("solution.positions: expected " + std::to_string(M) + " numbers");
        r.t.resize(M);
        for (int m = 0; m < M; ++m)
        {
            if (!pos[static_cast<std::size_t>(m)].is_number())
                throw FormatError("solution.positions: expected numbers");
            r.t[m] = pos[static_cast<std::size_t>(m)].get<double>();
        }

        const Json &bf = j.at("beamformers");
        if (!bf.is_object() || !bf.contains("re") || !bf.contains("im"))
            throw FormatError("solution.beamformers: expected {re, im}");
        r.W.resize(M, K);
        for (const char *part : {"re", "im"})
        {
            const Json &rows = bf.at(part);
            if (!rows.is_array() || static_cast<int>(rows.size()) != M)
                throw FormatError(std::string("solution.beamformers.") + part + ": expected " + std::to_string(M) +
                                  " rows");
            for (int m = 0; m < M; ++m)
            {
                const Json &row = rows[static_cast<std::size_t>(m)];
                if (!row.is_array() || static_cast<int>(row.size()) != K)
                    throw FormatError(std::string("solution.beamformers.") + part + ": expected " +
                                      std::to_string(K) + " columns");
                for (int k = 0; k < K; ++k)
                {
                    const Json &x = row[static_cast<std::size_t>(k)];
                    if (!x.is_number())
                        throw FormatError(std::string("solution.beamformers.") + part + ": expected numbers");
                    const double v = x.get<double>();
                    if (part[0] == 'r')
                        r.W(m, k).real(v);
                    else
                        r.W(m, k).imag(v);
                }
            }
        }

        for (const char *key : {"sum_rate", "probing", "power", "feasible", "probing_constraint"})
            if (j.contains(key))
                r.metrics[key] = j.at(key);
        return r;
    }

    std::vector<double> default_angle_grid_deg()
    {
        std::vector<double> g;
        for (int i = 0; i <= 360; ++i)
            g.push_back(0.5 * i);
        return g;
    }

    void write_beampattern_csv(std::ostream &out, const std::vector<double> &grid_deg, const Eigen::VectorXd &gain)
    {
        out << beampattern_schema << '\n' << "angle_deg,gain\n";
        for (std::size_t i = 0; i < grid_deg.size(); ++i)
            out << format_real(grid_deg[i]) << ',' << format_real(gain[static_cast<Eigen::Index>(i)]) << '\n';
    }

} // namespace faisac
