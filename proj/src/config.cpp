// SPDX-License-Identifier: Apache-2.0

#include "faisac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

namespace faisac
{
    namespace
    {
        [[noreturn]] void fail(const std::string &field, const std::string &what)
        {
            throw ConfigError(field + ": " + what);
        }

        void require_object(const Json &j, const std::string &where)
        {
            if (!j.is_object())
                fail(where, "expected an object");
        }

        void reject_unknown(const Json &j, const std::string &where, const std::set<std::string> &known)
        {
            for (const auto &item : j.items())
                if (!known.count(item.key()))
                    fail(where + "." + item.key(), "unknown key");
        }

        double get_number(const Json &j, const std::string &field)
        {
            if (!j.is_number())
                fail(field, "expected a number");
            const double v = j.get<double>();
            if (!std::isfinite(v))
                fail(field, "must be finite");
            return v;
        }

        long long get_integer(const Json &j, const std::string &field)
        {
            if (!j.is_number_integer())
                fail(field, "expected an integer");
            return j.get<long long>();
        }

        int get_int(const Json &j, const std::string &field)
        {
            const long long v = get_integer(j, field);
            if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
                fail(field, "out of range");
            return static_cast<int>(v);
        }

        std::uint64_t get_seed(const Json &j, const std::string &field)
        {
            if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
                fail(field, "expected a non-negative integer");
            return j.get<std::uint64_t>();
        }

        bool get_bool(const Json &j, const std::string &field)
        {
            if (!j.is_boolean())
                fail(field, "expected true or false");
            return j.get<bool>();
        }

        // Scalar or array of numbers.
        std::vector<double> get_numbers(const Json &j, const std::string &field)
        {
            if (j.is_number())
                return {get_number(j, field)};
            if (!j.is_array() || j.empty())
                fail(field, "expected a number or a non-empty array of numbers");
            std::vector<double> out;
            for (std::size_t i = 0; i < j.size(); ++i)
                out.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
            return out;
        }

        // Reads `base` in SI units or `base_<suffix>` converted by `conv`; never both.
        template <class Conv>
        std::optional<std::vector<double>> unit_field(const Json &j, const std::string &where, const std::string &base,
                                                      const std::string &suffix, Conv conv)
        {
            const std::string alt = base + "_" + suffix;
            const bool has_si = j.contains(base), has_alt = j.contains(alt);
            if (has_si && has_alt)
                fail(where + "." + base, "given both as '" + base + "' and '" + alt + "'");
            if (has_si)
                return get_numbers(j.at(base), where + "." + base);
            if (has_alt)
            {
                std::vector<double> v = get_numbers(j.at(alt), where + "." + alt);
                for (double &x : v)
                    x = conv(x);
                return v;
            }
            return std::nullopt;
        }

        double single(const std::vector<double> &v, const std::string &field)
        {
            if (v.size() != 1)
                fail(field, "expected a single number");
            return v[0];
        }

        std::vector<double> per_user(std::vector<double> v, int K, const std::string &field)
        {
            if (v.size() == 1 && K > 1)
                v.assign(static_cast<std::size_t>(K), v[0]);
            if (static_cast<int>(v.size()) != K)
                fail(field, "expected " + std::to_string(K) + " values, one per user");
            return v;
        }

        bool uniform_values(const std::vector<double> &v)
        {
            return !v.empty() && std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
        }
    }

    Json parse_json_text(const std::string &text, const std::string &source)
    {
        try
        {
            return Json::parse(text);
        }
        catch (const Json::parse_error &e)
        {
            std::size_t line = 1, col = 1;
            const std::size_t end = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
            for (std::size_t i = 0; i < end; ++i)
            {
                if (text[i] == '\n')
                {
                    ++line;
                    col = 1;
                }
                else
                    ++col;
            }
            std::ostringstream msg;
            msg << source << ": line " << line << ", column " << col << ": malformed JSON";
            throw ConfigError(msg.str());
        }
    }

    Json load_json_file(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError(path + ": cannot open file");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_json_text(buf.str(), path);
    }

    Scenario parse_scenario(const Json &j, const std::string &where)
    {
        require_object(j, where);
        reject_unknown(j, where,
                       {"preset", "num_antennas", "num_users", "wavelength", "aperture", "min_spacing",
                        "user_angles", "user_angles_deg", "probe_angle", "probe_angle_deg", "noise_power", "noise_power_dbm", "max_power",
                        "max_power_dbm", "probe_threshold", "probe_threshold_dbm", "ref_gain", "ref_gain_db",
                        "pathloss_exponent", "user_distances"});

        Scenario s;
        if (j.contains("preset"))
        {
            const Json &p = j.at("preset");
            if (!p.is_string())
                fail(where + ".preset", "expected a string");
            const std::string name = p.get<std::string>();
            if (name == "two_user")
                s = two_user_scenario(0.0);
            else if (name == "eight_user")
                s = eight_user_scenario(0.0);
            else
                fail(where + ".preset", "unknown preset '" + name + "' (two_user, eight_user)");
        }

        if (j.contains("num_antennas"))
            s.num_antennas = get_int(j.at("num_antennas"), where + ".num_antennas");
        if (j.contains("wavelength"))
            s.wavelength = get_number(j.at("wavelength"), where + ".wavelength");
        if (j.contains("aperture"))
            s.aperture = get_number(j.at("aperture"), where + ".aperture");
        if (j.contains("min_spacing"))
            s.min_spacing = get_number(j.at("min_spacing"), where + ".min_spacing");
        if (j.contains("pathloss_exponent"))
            s.pathloss_exponent = get_number(j.at("pathloss_exponent"), where + ".pathloss_exponent");

        if (auto v = unit_field(j, where, "user_angles", "deg", deg_to_rad))
        {
            s.user_angles = *v;
            s.num_users = static_cast<int>(s.user_angles.size());
        }
        if (j.contains("num_users"))
        {
            const int K = get_int(j.at("num_users"), where + ".num_users");
            if ((j.contains("user_angles") || j.contains("user_angles_deg")) && K != s.num_users)
                fail(where + ".num_users", "does not match the number of user angles");
            s.num_users = K;
        }
        if (auto v = unit_field(j, where, "probe_angle", "deg", deg_to_rad))
            s.probe_angle = single(*v, where + ".probe_angle");

        if (auto v = unit_field(j, where, "max_power", "dbm", dbm_to_watt))
            s.max_power = single(*v, where + ".max_power");
        if (auto v = unit_field(j, where, "probe_threshold", "dbm", dbm_to_watt))
            s.probe_threshold = single(*v, where + ".probe_threshold");
        if (auto v = unit_field(j, where, "ref_gain", "db", db_to_linear))
            s.ref_gain = single(*v, where + ".ref_gain");

        const int K = s.num_users;
        if (auto v = unit_field(j, where, "noise_power", "dbm", dbm_to_watt))
            s.noise_power = per_user(*v, K, where + ".noise_power");
        else if (static_cast<int>(s.noise_power.size()) != K && uniform_values(s.noise_power))
            s.noise_power.assign(static_cast<std::size_t>(K), s.noise_power[0]);
        if (j.contains("user_distances"))
            s.user_distances = per_user(get_numbers(j.at("user_distances"), where + ".user_distances"), K,
                                        where + ".user_distances");
        else if (static_cast<int>(s.user_distances.size()) != K && uniform_values(s.user_distances))
            s.user_distances.assign(static_cast<std::size_t>(K), s.user_distances[0]);

        try
        {
            s.validate();
        }
        catch (const std::invalid_argument &e)
        {
            std::string msg = e.what();
            if (msg.rfind("scenario.", 0) == 0)
                msg = where + msg.substr(8);
            throw ConfigError(msg);
        }
        return s;
    }

    BsumOptions parse_bsum_options(const Json &j, const std::string &where)
    {
        BsumOptions o;
        require_object(j, where);
        reject_unknown(j, where, {"max_outer", "outer_tol", "stall_cycles", "starts", "screen_cycles", "finalists", "seed", "pda", "epg"});
        if (j.contains("max_outer"))
            o.max_outer = get_int(j.at("max_outer"), where + ".max_outer");
        if (j.contains("outer_tol"))
            o.outer_tol = get_number(j.at("outer_tol"), where + ".outer_tol");
        if (j.contains("stall_cycles"))
            o.stall_cycles = get_int(j.at("stall_cycles"), where + ".stall_cycles");
        if (j.contains("starts"))
            o.starts = get_int(j.at("starts"), where + ".starts");
        if (j.contains("screen_cycles"))
            o.screen_cycles = get_int(j.at("screen_cycles"), where + ".screen_cycles");
        if (j.contains("finalists"))
            o.finalists = get_int(j.at("finalists"), where + ".finalists");
        if (j.contains("seed"))
            o.seed = get_seed(j.at("seed"), where + ".seed");
        if (j.contains("pda"))
        {
            const Json &p = j.at("pda");
            const std::string w = where + ".pda";
            require_object(p, w);
            reject_unknown(p, w, {"penalty0", "growth", "growth_period", "max_iter", "tol", "feas_tol", "extrapolate"});
            if (p.contains("penalty0"))
                o.pda.penalty0 = get_number(p.at("penalty0"), w + ".penalty0");
            if (p.contains("growth"))
                o.pda.growth = get_number(p.at("growth"), w + ".growth");
            if (p.contains("growth_period"))
                o.pda.growth_period = get_int(p.at("growth_period"), w + ".growth_period");
            if (p.contains("max_iter"))
                o.pda.max_iter = get_int(p.at("max_iter"), w + ".max_iter");
            if (p.contains("tol"))
                o.pda.tol = get_number(p.at("tol"), w + ".tol");
            if (p.contains("feas_tol"))
                o.pda.feas_tol = get_number(p.at("feas_tol"), w + ".feas_tol");
            if (p.contains("extrapolate"))
                o.pda.extrapolate = get_bool(p.at("extrapolate"), w + ".extrapolate");
        }
        if (j.contains("epg"))
        {
            const Json &e = j.at("epg");
            const std::string w = where + ".epg";
            require_object(e, w);
            reject_unknown(e, w, {"max_iter", "step0", "armijo", "shrink", "max_backtracks", "tol", "restart"});
            if (e.contains("max_iter"))
                o.epg.max_iter = get_int(e.at("max_iter"), w + ".max_iter");
            if (e.contains("step0"))
                o.epg.step0 = get_number(e.at("step0"), w + ".step0");
            if (e.contains("armijo"))
                o.epg.armijo = get_number(e.at("armijo"), w + ".armijo");
            if (e.contains("shrink"))
                o.epg.shrink = get_number(e.at("shrink"), w + ".shrink");
            if (e.contains("max_backtracks"))
                o.epg.max_backtracks = get_int(e.at("max_backtracks"), w + ".max_backtracks");
            if (e.contains("tol"))
                o.epg.tol = get_number(e.at("tol"), w + ".tol");
            if (e.contains("restart"))
                o.epg.restart = get_bool(e.at("restart"), w + ".restart");
        }
        try
        {
            o.validate();
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(e.what());
        }
        return o;
    }

    PsoOptions parse_pso_options(const Json &j, const std::string &where)
    {
        PsoOptions o;
        require_object(j, where);
        reject_unknown(j, where,
                       {"particles", "iterations", "inertia", "cognitive", "social", "seed", "inner_bsum_iters",
                        "init_velocity", "infeasible_penalty", "workers"});
        if (j.contains("particles"))
            o.particles = get_int(j.at("particles"), where + ".particles");
        if (j.contains("iterations"))
            o.iterations = get_int(j.at("iterations"), where + ".iterations");
        if (j.contains("inertia"))
            o.inertia = get_number(j.at("inertia"), where + ".inertia");
        if (j.contains("cognitive"))
            o.cognitive = get_number(j.at("cognitive"), where + ".cognitive");
        if (j.contains("social"))
            o.social = get_number(j.at("social"), where + ".social");
        if (j.contains("seed"))
            o.seed = get_seed(j.at("seed"), where + ".seed");
        if (j.contains("inner_bsum_iters"))
            o.inner_bsum_iters = get_int(j.at("inner_bsum_iters"), where + ".inner_bsum_iters");
        if (j.contains("init_velocity"))
            o.init_velocity = get_number(j.at("init_velocity"), where + ".init_velocity");
        if (j.contains("infeasible_penalty"))
            o.infeasible_penalty = get_number(j.at("infeasible_penalty"), where + ".infeasible_penalty");
        if (j.contains("workers"))
            o.workers = get_int(j.at("workers"), where + ".workers");
        try
        {
            o.validate();
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(e.what());
        }
        return o;
    }

    Method parse_method(const std::string &name, const std::string &where)
    {
        if (name == "bsum")
            return Method::bsum;
        if (name == "fpa")
            return Method::fpa;
        if (name == "pso")
            return Method::pso;
        fail(where, "unknown method '" + name + "' (bsum, fpa, pso)");
    }

    std::string method_name(Method m)
    {
        switch (m)
        {
        case Method::bsum:
            return "bsum";
        case Method::fpa:
            return "fpa";
        case Method::pso:
            return "pso";
        }
        return "?";
    }

    RunConfig parse_run_config(const Json &j)
    {
        require_object(j, "config");
        reject_unknown(j, "config", {"scenario", "method", "solver", "pso"});
        if (!j.contains("scenario"))
            fail("config.scenario", "missing");
        RunConfig c;
        c.scenario = parse_scenario(j.at("scenario"));
        if (j.contains("method"))
        {
            if (!j.at("method").is_string())
                fail("config.method", "expected a string");
            c.method = parse_method(j.at("method").get<std::string>(), "config.method");
        }
        if (j.contains("solver"))
            c.solver = parse_bsum_options(j.at("solver"));
        if (j.contains("pso"))
            c.pso = parse_pso_options(j.at("pso"));
        return c;
    }

    RunConfig load_run_config(const std::string &path)
    {
        return parse_run_config(load_json_file(path));
    }

} // namespace faisac
