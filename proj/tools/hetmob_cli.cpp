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

// Command-line runner: evaluates one scenario and writes <scenario>.tsv and
// summary.json into the output directory.
//
// Exit status: 0 all rows produced, 1 usage, 2 config, 3 quadrature,
// 4 work budget, 5 I/O.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <hetmob/hetmob.hpp>

namespace fs = std::filesystem;
using namespace hetmob;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kQuadrature = 3, kBudget = 4, kIo = 5 };

int fail(const char* kind, const std::string& what, int code)
{
    std::cerr << "hetmob: " << kind << " error: " << what << '\n';
    return code;
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// True when the config text assigns N explicitly.
bool assigns_population(const std::string& path)
{
    std::ifstream f(path);
    std::string line;
    while (std::getline(f, line)) {
        line = hetmob::detail::trim(line.substr(0, line.find('#')));
        const auto eq = line.find('=');
        if (eq != std::string::npos && hetmob::detail::trim(line.substr(0, eq)) == "N")
            return true;
    }
    return false;
}

nlohmann::json summary_json(const scenarios::RunResult& r, const scenarios::RunManifest& m)
{
    nlohmann::json j;
    j["scenario"] = r.scenario;
    j["seed"] = m.seed;
    j["all_passed"] = r.all_checks_passed();
    j["rows"] = r.rows.size();
    j["warnings"] = r.warnings;
    auto& checks = j["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["failed"] = std::count_if(r.checks.begin(), r.checks.end(), [](const auto& c) { return !c.passed; });
    return j;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mobility-aware interference and uplink performance in two-tier cellular networks"};

    std::string config_path, scenario, sweep, engine = "both", out_dir = "hetmob_out", trace_path;
    std::string sampling = "live";
    scenarios::RunManifest m;
    std::uint64_t replications = 8, steps = 0, warmup = 0;
    double threshold_db = 0.0, ptm_dbm = 0.0;
    bool no_timestamp = false;
    unsigned threads = 1;

    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--scenario", scenario, "scenario or figure alias (" + scenarios::scenario_names() + ")")
        ->required();
    app.add_option("--sweep", sweep, "override the sweep, KEY=v1,v2,... (KEY: config key, kappa or T_db)");
    app.add_option("--seed", m.seed, "master seed")->capture_default_str();
    app.add_option("--engine", engine, "analytic, mc or both")->capture_default_str();
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_flag("--no-header-timestamp", no_timestamp, "omit the timestamp line for byte-identical reruns");
    auto* thr = app.add_option("--threshold-db", threshold_db, "SINR threshold T in dB (default -60)");
    auto* ptm = app.add_option("--ptm-dbm", ptm_dbm, "macro-user transmit power in dBm");
    app.add_option("--replications", replications, "Monte Carlo replications")->capture_default_str();
    auto* st = app.add_option("--steps", steps, "steps (crossing: flights) per replication");
    auto* wu = app.add_option("--warmup", warmup, "discarded steps per replication");
    app.add_flag("--full-scale", m.full_scale, "N=10000 and 10^6 steps (slow)");
    app.add_option("--trace", trace_path, "write the replication-0 mobility trace (occupancy scenarios)");
    app.add_option("--threads", threads, "worker threads for replications")->capture_default_str();
    app.add_option("--sampling", sampling, "interferer sampling for SINR scenarios: live or stationary")
        ->capture_default_str();
    app.add_flag("--bits", m.rate_in_bits, "report rates in bits/s instead of nats/s");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    std::ofstream trace_file;
    try {
        m.scenario = scenario;
        scenarios::find_scenario(scenario);
        m.engine = scenarios::parse_engine(engine);
        if (sampling == "live")
            m.sinr_sampling = InterfererSampling::live_mobility;
        else if (sampling == "stationary")
            m.sinr_sampling = InterfererSampling::stationary_law;
        else
            throw scenarios::UsageError("unknown sampling '" + sampling + "' (expected live or stationary)");
        if (!sweep.empty())
            std::tie(m.sweep_key, m.sweep_values) = scenarios::parse_sweep(sweep);
        m.replications = replications;
        if (*st)
            m.steps = steps;
        if (*wu)
            m.warmup = warmup;
        if (*thr)
            m.threshold_db = threshold_db;
        m.threads = threads;
    } catch (const std::invalid_argument& e) {
        return fail("usage", e.what(), kUsage);
    }

    try {
        if (!config_path.empty()) {
            m.config = read_config_file(config_path);
            m.population_set = assigns_population(config_path);
        } else {
            m.config = validate(NetworkConfig{}, ChannelConfig{});
        }
        if (*ptm) {
            m.config.channel.P_t_m = dbm_to_watts(ptm_dbm);
            validate(m.config.network, m.config.channel);
        }
    } catch (const ConfigError& e) {
        return fail("config", e.what(), kConfig);
    }

    if (m.full_scale)
        std::cerr << "hetmob: warning: --full-scale runs N=10000 with 10^6 steps; expect hours of runtime\n";
    for (const auto& w : m.config.warnings)
        std::cerr << "hetmob: warning: " << w << '\n';

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        return fail("io", "cannot create '" + out_dir + "': " + ec.message(), kIo);
    if (!trace_path.empty()) {
        trace_file.open(trace_path);
        if (!trace_file)
            return fail("io", "cannot open trace file '" + trace_path + "'", kIo);
        m.trace = &trace_file;
    }

    scenarios::RunResult result;
    try {
        result = scenarios::run(m);
    } catch (const ConfigError& e) {
        return fail("config", e.what(), kConfig);
    } catch (const quad::QuadratureError& e) {
        return fail("quadrature", e.what(), kQuadrature);
    } catch (const scenarios::BudgetError& e) {
        return fail("budget", e.what(), kBudget);
    } catch (const std::invalid_argument& e) {
        return fail("usage", e.what(), kUsage);
    } catch (const std::domain_error& e) {
        return fail("config", e.what(), kConfig);
    }

    const fs::path tsv = fs::path(out_dir) / (result.scenario + ".tsv");
    std::ofstream out(tsv);
    scenarios::write_tsv(out, result, no_timestamp ? std::string{} : utc_timestamp());
    std::ofstream js(fs::path(out_dir) / "summary.json");
    js << summary_json(result, m).dump(2) << '\n';
    if (!out || !js)
        return fail("io", "failed writing to '" + out_dir + "'", kIo);

    std::size_t failed = 0;
    for (const auto& c : result.checks)
        if (!c.passed) {
            ++failed;
            std::cerr << "hetmob: check failed: " << c.name << " (" << c.detail << ")\n";
        }
    std::cout << result.rows.size() << " rows written to " << tsv.string() << "; " << result.checks.size() - failed
              << "/" << result.checks.size() << " checks passed\n";
    return kOk;
}
