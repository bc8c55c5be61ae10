// SPDX-License-Identifier: Apache-2.0
//
// hetmob: mobility-aware uplink interference toolkit
// Copyright (C) 2026 The hetmob Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hetmob {

/// Access policy of the small cell of interest.
enum class CellType { CSG, OSG };

inline std::string_view to_string(CellType t) { return t == CellType::CSG ? "CSG" : "OSG"; }

inline CellType parse_cell_type(std::string_view s)
{
    if (s == "CSG" || s == "csg")
        return CellType::CSG;
    if (s == "OSG" || s == "osg")
        return CellType::OSG;
    throw std::invalid_argument("unknown cell type '" + std::string(s) + "' (expected CSG or OSG)");
}

/// Scenario geometry, population and mobility. SI units throughout.
struct NetworkConfig
{
    double L = 500.0;       ///< macro-cell radius [m]
    double R = 60.0;        ///< small-cell radius [m]
    double R_I = 120.0;     ///< interfering radius [m]
    std::uint64_t N = 10000;
    double alpha = 0.6;     ///< Levy tail exponent
    double delta = 30.0;    ///< basic step length [m]
    double T_s = 1.0;       ///< flight period [s]
    CellType cell_type = CellType::CSG;
};

/// Radio parameters. Noise power is always derived as W * N0.
struct ChannelConfig
{
    double P_t_m = 0.1;                  ///< macro-user transmit power [W] (20 dBm)
    double P_t_h = 5.011872336272724e-4; ///< home-user transmit power [W] (-3 dBm)
    double beta = 2.0;                   ///< pathloss exponent
    double P_gamma = 1.0;                ///< E[gamma]
    double P_gamma2 = 2.0;               ///< E[gamma^2]
    double W = 5e6;                      ///< bandwidth [Hz]
    double N0 = 3.98107e-18;             ///< noise spectral density [W/Hz]

    double noise_power() const { return W * N0; }

    /// True when (P_gamma, P_gamma2) are the moments of an exponential gain.
    bool is_rayleigh() const
    {
        return std::abs(P_gamma2 - 2.0 * P_gamma * P_gamma) <= 1e-12 * P_gamma * P_gamma;
    }
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Thrown by validate() and the config reader; carries every violation found.
class ConfigError : public std::runtime_error
{
public:
    explicit ConfigError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations))
    {
    }

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v)
    {
        std::string out = "invalid configuration:";
        for (const auto& s : v)
            out += "\n  - " + s;
        return out;
    }

    std::vector<std::string> violations_;
};

struct Scenario
{
    NetworkConfig network;
    ChannelConfig channel;
    std::vector<std::string> warnings;
};

inline constexpr double kAlphaObservedMin = 0.53;
inline constexpr double kAlphaObservedMax = 1.81;

/// Checks every invariant of both configs. Returns the pair (plus soft warnings)
/// when all hold, throws ConfigError listing each violated invariant otherwise.
inline Scenario validate(const NetworkConfig& net, const ChannelConfig& ch)
{
    std::vector<std::string> errors;
    auto require = [&](bool ok, const char* what) {
        if (!ok)
            errors.emplace_back(what);
    };
    auto finite = [](double x) { return std::isfinite(x); };

    require(finite(net.R) && net.R > 1.0, "R > 1 (CSG distance support starts at 1 m)");
    require(finite(net.R) && finite(net.R_I) && net.R < net.R_I, "R < R_I");
    require(finite(net.R_I) && finite(net.L) && net.R_I < net.L, "R_I < L");
    require(finite(net.alpha) && net.alpha > 0.0, "alpha > 0");
    require(finite(net.delta) && net.delta > 0.0, "delta > 0");
    require(finite(net.T_s) && net.T_s > 0.0, "T_s > 0");

    require(finite(ch.beta) && ch.beta >= 2.0, "beta >= 2");
    require(finite(ch.P_t_m) && ch.P_t_m > 0.0, "P_t_m > 0");
    require(finite(ch.P_t_h) && ch.P_t_h > 0.0, "P_t_h > 0");
    require(finite(ch.P_gamma) && ch.P_gamma > 0.0, "P_gamma > 0");
    require(finite(ch.P_gamma2) && ch.P_gamma2 >= ch.P_gamma * ch.P_gamma * (1.0 - 1e-12),
            "P_gamma2 >= P_gamma^2");
    require(finite(ch.W) && ch.W >= 0.0, "W >= 0");
    require(finite(ch.N0) && ch.N0 >= 0.0, "N0 >= 0");

    if (!errors.empty())
        throw ConfigError(std::move(errors));

    Scenario s{net, ch, {}};
    if (net.alpha < kAlphaObservedMin || net.alpha > kAlphaObservedMax)
        s.warnings.push_back("alpha = " + std::to_string(net.alpha) +
                             " lies outside the empirically observed range [0.53, 1.81]");
    return s;
}

namespace detail {

inline std::string trim(std::string s)
{
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& value)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || trim(value.substr(used)).size() != 0)
        throw ConfigError({"key '" + key + "': cannot parse '" + value + "' as a number"});
    return v;
}

} // namespace detail

/// Applies one `key = value` assignment. Powers P_t_m / P_t_h also accept a
/// `_dbm` suffix. Unknown keys are rejected.
inline void apply_setting(NetworkConfig& net, ChannelConfig& ch, const std::string& key,
                          const std::string& value)
{
    using detail::parse_double;
    if (key == "L") net.L = parse_double(key, value);
    else if (key == "R") net.R = parse_double(key, value);
    else if (key == "R_I") net.R_I = parse_double(key, value);
    else if (key == "N") {
        const double n = parse_double(key, value);
        if (n < 0 || n != std::floor(n))
            throw ConfigError({"key 'N': expected a non-negative integer, got '" + value + "'"});
        net.N = static_cast<std::uint64_t>(n);
    }
    else if (key == "alpha") net.alpha = parse_double(key, value);
    else if (key == "delta") net.delta = parse_double(key, value);
    else if (key == "T_s") net.T_s = parse_double(key, value);
    else if (key == "cell_type") {
        try {
            net.cell_type = parse_cell_type(detail::trim(value));
        } catch (const std::invalid_argument& e) {
            throw ConfigError({e.what()});
        }
    }
    else if (key == "P_t_m") ch.P_t_m = parse_double(key, value);
    else if (key == "P_t_m_dbm") ch.P_t_m = dbm_to_watts(parse_double(key, value));
    else if (key == "P_t_h") ch.P_t_h = parse_double(key, value);
    else if (key == "P_t_h_dbm") ch.P_t_h = dbm_to_watts(parse_double(key, value));
    else if (key == "beta") ch.beta = parse_double(key, value);
    else if (key == "P_gamma") ch.P_gamma = parse_double(key, value);
    else if (key == "P_gamma2") ch.P_gamma2 = parse_double(key, value);
    else if (key == "W") ch.W = parse_double(key, value);
    else if (key == "N0") ch.N0 = parse_double(key, value);
    else
        throw ConfigError({"unknown key '" + key + "'"});
}

/// Reads the key-value config format: one `key = value` per line, `#` starts a
/// comment. Keys not present keep their defaults. The result is validated.
inline Scenario read_config(std::istream& in)
{
    NetworkConfig net;
    ChannelConfig ch;
    std::vector<std::string> errors;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        try {
            apply_setting(net, ch, key, value);
        } catch (const ConfigError& e) {
            for (const auto& v : e.violations())
                errors.push_back("line " + std::to_string(lineno) + ": " + v);
        }
    }
    if (!errors.empty())
        throw ConfigError(std::move(errors));
    return validate(net, ch);
}

inline Scenario read_config_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError({"cannot open config file '" + path + "'"});
    return read_config(f);
}

inline Scenario read_config_string(const std::string& text)
{
    std::istringstream in(text);
    return read_config(in);
}

} // namespace hetmob
