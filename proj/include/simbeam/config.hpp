#pragma once

#include "simbeam/geometry_channel.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace simbeam {

/// Scenario parameters as read from a JSON config file. Missing keys keep
/// the defaults below; unknown keys are rejected.
struct ScenarioConfig {
    Index n_tx = 4;
    Index n_users = 4;
    Index n_meta = 49;
    Index n_layers = 10;
    double carrier_ghz = 28.0;
    double sim_thickness_wavelengths = 10.0;
    double power_dbm = 30.0;
    double noise_dbm = -104.0;
    double pathloss_d0 = 1.0;
    double pathloss_c1 = 2.0;
    double pathloss_c2 = 3.5;
    double bs_height = 15.0;
    double ue_height = 1.6;
    double ring_distance = 100.0;
    double ring_radius = 10.0;
    std::uint64_t seed = 1;

    double wavelength() const { return kSpeedOfLight / (carrier_ghz * 1e9); }
    double power_budget() const { return dbm_to_watts(power_dbm); }
    double noise_power() const { return dbm_to_watts(noise_dbm); }
    GeometryParams geometry() const;
    DropConfig drop(std::uint64_t drop_seed) const;

    /// Throws std::invalid_argument on any inconsistent value.
    void validate() const;
};

ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const ScenarioConfig& cfg);

/// One Monte Carlo drop: geometry, channels and the BS power budget.
struct ProblemInstance {
    SimGeometry geometry;
    ChannelSet channels;
    std::vector<double> user_distances;
    double power_budget = 0.0;
    std::uint64_t seed = 0;
};

/// Pure function of (cfg, drop_seed). User positions and fading draws use
/// separate streams, so instances that differ only in L or N share users.
ProblemInstance make_instance(const ScenarioConfig& cfg, std::uint64_t drop_seed);

} // namespace simbeam
