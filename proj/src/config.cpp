#include "simbeam/config.hpp"

#include "simbeam/rng.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace simbeam {

using nlohmann::json;

GeometryParams ScenarioConfig::geometry() const
{
    return {n_tx, n_meta, n_layers, wavelength(), sim_thickness_wavelengths * wavelength()};
}

DropConfig ScenarioConfig::drop(std::uint64_t drop_seed) const
{
    DropConfig d;
    d.seed = drop_seed;
    d.users = n_users;
    d.user_ring_center_distance = ring_distance;
    d.user_ring_radius = ring_radius;
    d.bs_height = bs_height;
    d.ue_height = ue_height;
    d.ref_distance = pathloss_d0;
    d.pathloss_c1 = pathloss_c1;
    d.pathloss_c2 = pathloss_c2;
    return d;
}

void ScenarioConfig::validate() const
{
    if (n_tx < 1 || n_users < 1 || n_meta < 1 || n_layers < 1)
        throw std::invalid_argument("config: counts must be positive");
    if (!(carrier_ghz > 0.0) || !(sim_thickness_wavelengths > 0.0))
        throw std::invalid_argument("config: carrier and thickness must be positive");
    build_geometry(geometry()); // perfect-square N and friends
    drop(seed).validate();
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key))
            throw std::invalid_argument("config: unknown key '" + where + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

} // namespace

ScenarioConfig parse_scenario(const std::string& json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("config: top level must be an object");

    reject_unknown(j,
                   {"n_tx", "n_users", "n_meta", "n_layers", "carrier_ghz", "sim_thickness_wavelengths",
                    "power_dbm", "noise_dbm", "pathloss", "deployment", "seed"},
                   "");
    ScenarioConfig c;
    try {
        read(j, "n_tx", c.n_tx);
        read(j, "n_users", c.n_users);
        read(j, "n_meta", c.n_meta);
        read(j, "n_layers", c.n_layers);
        read(j, "carrier_ghz", c.carrier_ghz);
        read(j, "sim_thickness_wavelengths", c.sim_thickness_wavelengths);
        read(j, "power_dbm", c.power_dbm);
        read(j, "noise_dbm", c.noise_dbm);
        read(j, "seed", c.seed);
        if (j.contains("pathloss")) {
            const json& p = j.at("pathloss");
            reject_unknown(p, {"d0", "c1", "c2"}, "pathloss.");
            read(p, "d0", c.pathloss_d0);
            read(p, "c1", c.pathloss_c1);
            read(p, "c2", c.pathloss_c2);
        }
        if (j.contains("deployment")) {
            const json& d = j.at("deployment");
            reject_unknown(d, {"bs_height", "ue_height", "ring_distance", "ring_radius"}, "deployment.");
            read(d, "bs_height", c.bs_height);
            read(d, "ue_height", c.ue_height);
            read(d, "ring_distance", c.ring_distance);
            read(d, "ring_radius", c.ring_radius);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string scenario_to_json(const ScenarioConfig& c)
{
    json j = {
        {"n_tx", c.n_tx},
        {"n_users", c.n_users},
        {"n_meta", c.n_meta},
        {"n_layers", c.n_layers},
        {"carrier_ghz", c.carrier_ghz},
        {"sim_thickness_wavelengths", c.sim_thickness_wavelengths},
        {"power_dbm", c.power_dbm},
        {"noise_dbm", c.noise_dbm},
        {"pathloss", {{"d0", c.pathloss_d0}, {"c1", c.pathloss_c1}, {"c2", c.pathloss_c2}}},
        {"deployment",
         {{"bs_height", c.bs_height},
          {"ue_height", c.ue_height},
          {"ring_distance", c.ring_distance},
          {"ring_radius", c.ring_radius}}},
        {"seed", c.seed},
    };
    return j.dump(2);
}

ProblemInstance make_instance(const ScenarioConfig& cfg, std::uint64_t drop_seed)
{
    cfg.validate();
    ProblemInstance inst;
    inst.seed = drop_seed;
    inst.power_budget = cfg.power_budget();
    inst.geometry = build_geometry(cfg.geometry());

    const DropConfig drop = cfg.drop(drop_seed);
    auto position_rng = make_rng(drop_seed, Stream::user_positions);
    inst.user_distances = sample_user_distances(drop, position_rng);

    std::vector<double> gains;
    gains.reserve(inst.user_distances.size());
    for (double d : inst.user_distances)
        gains.push_back(path_gain(d, drop, inst.geometry.wavelength));

    ChannelSet& ch = inst.channels;
    ch.inter_layer = build_inter_layer_matrices(inst.geometry);
    ch.correlation = build_correlation(inst.geometry);
    ch.path_gains = gains;
    ch.noise_power = cfg.noise_power();
    auto fading_rng = make_rng(drop_seed, Stream::fading);
    ch.user_channels = sample_user_channels(ch.correlation, ch.path_gains, fading_rng);
    return inst;
}

} // namespace simbeam
