// SPDX-License-Identifier: Apache-2.0
//
// cbsel: UE-assisted adaptive codebook selection laboratory
// Copyright (C) 2026 The cbsel authors
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
#include "cbsel/experiment.hpp"

#include "cbsel/errors.hpp"
#include "cbsel/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace cbsel {

using nlohmann::json;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where)
{
    if (!obj.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto &item : obj.items())
        if (!allowed.count(item.key()))
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

double number_or_infinity(const json &value, const std::string &where)
{
    if (value.is_number())
        return value.get<double>();
    if (value.is_string()) {
        const auto s = value.get<std::string>();
        if (s == "inf" || s == "+inf")
            return inf;
        if (s == "-inf")
            return -inf;
    }
    if (value.is_null())
        return inf;
    throw ConfigError(where + ": expected a number, \"inf\" or \"-inf\"");
}

json infinity_aware(double value)
{
    if (std::isinf(value))
        return value > 0 ? json("inf") : json("-inf");
    return json(value);
}

template <typename T>
void read(const json &obj, const char *key, T &out, const std::string &where)
{
    if (!obj.contains(key))
        return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception &) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

ParamRange read_range(const json &value, const std::string &where)
{
    if (value.is_array()) {
        if (value.size() != 2)
            throw ConfigError(where + ": a range needs exactly two entries");
        return {number_or_infinity(value[0], where), number_or_infinity(value[1], where)};
    }
    const double v = number_or_infinity(value, where);
    return {v, v};
}

json range_json(const ParamRange &r)
{
    if (r.lo == r.hi)
        return infinity_aware(r.lo);
    return json::array({infinity_aware(r.lo), infinity_aware(r.hi)});
}

PropagationRanges read_propagation(const json &obj, PropagationRanges out, const std::string &where)
{
    check_keys(obj, {"rician_k_db", "delay_spread_s", "azimuth_spread_deg", "zenith_spread_deg", "num_rays"}, where);
    if (obj.contains("rician_k_db"))
        out.rician_k_db = read_range(obj["rician_k_db"], where + ".rician_k_db");
    if (obj.contains("delay_spread_s"))
        out.delay_spread_s = read_range(obj["delay_spread_s"], where + ".delay_spread_s");
    if (obj.contains("azimuth_spread_deg"))
        out.azimuth_spread_deg = read_range(obj["azimuth_spread_deg"], where + ".azimuth_spread_deg");
    if (obj.contains("zenith_spread_deg"))
        out.zenith_spread_deg = read_range(obj["zenith_spread_deg"], where + ".zenith_spread_deg");
    read(obj, "num_rays", out.num_rays, where);
    return out;
}

json propagation_json(const PropagationRanges &p)
{
    return {{"rician_k_db", range_json(p.rician_k_db)},
            {"delay_spread_s", range_json(p.delay_spread_s)},
            {"azimuth_spread_deg", range_json(p.azimuth_spread_deg)},
            {"zenith_spread_deg", range_json(p.zenith_spread_deg)},
            {"num_rays", p.num_rays}};
}

ScenarioFamily read_family(const json &obj, const std::string &where)
{
    check_keys(obj, {"name", "weight", "los_fraction", "doppler_max_hz", "los", "nlos"}, where);
    ScenarioFamily f;
    read(obj, "name", f.name, where);
    read(obj, "weight", f.weight, where);
    read(obj, "los_fraction", f.los_fraction, where);
    if (obj.contains("doppler_max_hz"))
        f.doppler_max_hz = read_range(obj["doppler_max_hz"], where + ".doppler_max_hz");
    if (obj.contains("los"))
        f.los = read_propagation(obj["los"], f.los, where + ".los");
    if (obj.contains("nlos"))
        f.nlos = read_propagation(obj["nlos"], f.nlos, where + ".nlos");
    return f;
}

CodebookConfig read_codebook(const json &obj, const std::string &where)
{
    check_keys(obj, {"id", "L", "M", "T", "K", "O1", "O2", "Of", "Ot", "amp_bits", "phase_bits"}, where);
    CodebookConfig c;
    read(obj, "id", c.id, where);
    read(obj, "L", c.L, where);
    read(obj, "M", c.M, where);
    read(obj, "T", c.T, where);
    read(obj, "K", c.K, where);
    read(obj, "O1", c.O1, where);
    read(obj, "O2", c.O2, where);
    read(obj, "Of", c.Of, where);
    read(obj, "Ot", c.Ot, where);
    read(obj, "amp_bits", c.amp_bits, where);
    read(obj, "phase_bits", c.phase_bits, where);
    return c;
}

json codebook_json(const CodebookConfig &c)
{
    return {{"id", c.id}, {"L", c.L},   {"M", c.M},   {"T", c.T},   {"K", c.K},   {"O1", c.O1},
            {"O2", c.O2}, {"Of", c.Of}, {"Ot", c.Ot}, {"amp_bits", c.amp_bits}, {"phase_bits", c.phase_bits}};
}

SelectionPolicy read_policy(const json &obj, const std::string &where)
{
    check_keys(obj, {"type", "rho_min", "reference", "rho0"}, where);
    std::string type;
    read(obj, "type", type, where);
    if (type == "threshold_first") {
        ThresholdFirst p;
        read(obj, "rho_min", p.rho_min, where);
        return p;
    }
    if (type == "reference_gain") {
        ReferenceGain p;
        read(obj, "reference", p.reference, where);
        read(obj, "rho0", p.rho0, where);
        return p;
    }
    throw ConfigError(where + ": unknown policy type '" + type + "'");
}

json policy_json(const SelectionPolicy &policy)
{
    if (const auto *t = std::get_if<ThresholdFirst>(&policy))
        return {{"type", "threshold_first"}, {"rho_min", t->rho_min}};
    const auto &r = std::get<ReferenceGain>(policy);
    return {{"type", "reference_gain"}, {"reference", r.reference}, {"rho0", r.rho0}};
}

void validate_range(const ParamRange &r, const std::string &where, bool allow_neg_inf)
{
    if (std::isnan(r.lo) || std::isnan(r.hi) || r.lo > r.hi)
        throw ConfigError(where + ": invalid range");
    const bool neg_inf_pair = allow_neg_inf && r.lo == -inf && r.hi == -inf;
    if (!neg_inf_pair && (!std::isfinite(r.lo) || !std::isfinite(r.hi)))
        throw ConfigError(where + ": range must be finite");
}

void validate_propagation(const PropagationRanges &p, const std::string &where)
{
    validate_range(p.rician_k_db, where + ".rician_k_db", true);
    validate_range(p.delay_spread_s, where + ".delay_spread_s", false);
    validate_range(p.azimuth_spread_deg, where + ".azimuth_spread_deg", false);
    validate_range(p.zenith_spread_deg, where + ".zenith_spread_deg", false);
    if (p.delay_spread_s.lo < 0 || p.azimuth_spread_deg.lo < 0 || p.zenith_spread_deg.lo < 0)
        throw ConfigError(where + ": spreads must be non-negative");
    if (p.num_rays < 1)
        throw ConfigError(where + ".num_rays must be at least 1");
}

} // namespace

std::string tool_version()
{
    return "cbsel 0.1.0";
}

ExperimentConfig default_experiment()
{
    ExperimentConfig cfg;
    cfg.codebook_preset = "desk";
    cfg.codebooks = desk_codebooks();

    PropagationRanges los;
    los.rician_k_db = {6.0, 12.0};
    los.delay_spread_s = {30e-9, 100e-9};
    los.azimuth_spread_deg = {5.0, 15.0};
    los.zenith_spread_deg = {3.0, 3.0};
    los.num_rays = 20;

    PropagationRanges nlos;
    nlos.delay_spread_s = {200e-9, 600e-9};
    nlos.azimuth_spread_deg = {45.0, 135.0};
    nlos.zenith_spread_deg = {15.0, 25.0};
    nlos.num_rays = 40;

    ScenarioFamily indoor{"indoor", 0.7, 0.5, {10.0, 30.0}, los, nlos};
    ScenarioFamily outdoor{"outdoor", 0.3, 0.5, {150.0, 250.0}, los, nlos};
    cfg.families = {indoor, outdoor};
    return cfg;
}

void ExperimentConfig::validate() const
{
    geometry.validate();
    base_scenario.validate();
    if (families.empty())
        throw ConfigError("scenarios: at least one family is required");
    double total = 0.0;
    for (std::size_t i = 0; i < families.size(); ++i) {
        const auto &f = families[i];
        const std::string where = "scenarios[" + std::to_string(i) + "]";
        if (!(f.weight >= 0.0))
            throw ConfigError(where + ".weight must be non-negative");
        if (!(f.los_fraction >= 0.0 && f.los_fraction <= 1.0))
            throw ConfigError(where + ".los_fraction must lie in [0, 1]");
        validate_range(f.doppler_max_hz, where + ".doppler_max_hz", false);
        if (f.doppler_max_hz.lo < 0)
            throw ConfigError(where + ".doppler_max_hz must be non-negative");
        validate_propagation(f.los, where + ".los");
        validate_propagation(f.nlos, where + ".nlos");
        if (f.los_fraction > 0.0 && f.los.rician_k_db.lo == -inf)
            throw ConfigError(where + ".los.rician_k_db must be finite when los_fraction > 0");
        total += f.weight;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("scenarios: mixture weights must sum to 1");

    if (codebooks.empty())
        throw ConfigError("codebooks: at least one codebook is required");
    for (const auto &cb : codebooks)
        cb.validate(geometry, grid);
    const auto bits = overhead_table();
    validate_candidate_order(bits);

    if (deltas.empty())
        throw ConfigError("deltas: at least one delay is required");
    std::set<int> seen;
    for (int d : deltas) {
        if (d < 0 || d >= base_scenario.num_slot)
            throw ConfigError("deltas: every delay must lie in [0, num_slot)");
        if (!seen.insert(d).second)
            throw ConfigError("deltas: duplicate delay");
    }
    const int max_delta = *std::max_element(deltas.begin(), deltas.end());
    grid.validate(base_scenario.num_rb, base_scenario.num_slot - max_delta);

    if (assistance.F < 1 || assistance.F > base_scenario.num_rb)
        throw ConfigError("assistance.F must lie in [1, num_rb]");
    if (assistance.Q < 1 || assistance.Q > base_scenario.num_slot)
        throw ConfigError("assistance.Q must lie in [1, num_slot]");
    if (dataset_size < 1)
        throw ConfigError("dataset_size must be at least 1");
    if (num_layers < 1 || num_layers > std::min(base_scenario.num_rx, geometry.ports()))
        throw ConfigError("layers must lie in [1, min(num_rx, ports)]");
    train.validate();
    if (train_features.empty())
        throw ConfigError("train.features must not be empty");
    for (const auto &f : train_features)
        if (f != "sdcp" && f != "fdcp" && f != "tdcp")
            throw ConfigError("train.features: unknown group '" + f + "'");
    if (importance_repeats < 1)
        throw ConfigError("importance.repeats must be at least 1");
    for (double k : keep_fractions)
        if (!(k > 0.0 && k <= 1.0))
            throw ConfigError("importance.keep_fractions must lie in (0, 1]");
    for (const auto &p : policies)
        if (const auto *r = std::get_if<ReferenceGain>(&p)) {
            if (r->reference < 0 || r->reference >= static_cast<int>(codebooks.size()))
                throw ConfigError("policies: reference index out of range");
            if (r->rho0.size() + 1 != codebooks.size())
                throw ConfigError("policies: rho0 needs one entry per non-reference codebook");
        }
}

std::string ExperimentConfig::canonical_json() const
{
    json families_json = json::array();
    for (const auto &f : families)
        families_json.push_back({{"name", f.name},
                                 {"weight", f.weight},
                                 {"los_fraction", f.los_fraction},
                                 {"doppler_max_hz", range_json(f.doppler_max_hz)},
                                 {"los", propagation_json(f.los)},
                                 {"nlos", propagation_json(f.nlos)}});
    json codebooks_json = json::array();
    for (const auto &c : codebooks)
        codebooks_json.push_back(codebook_json(c));
    json policies_json = json::array();
    for (const auto &p : policies)
        policies_json.push_back(policy_json(p));

    const json doc = {
        {"seed", seed},
        {"geometry", {{"n1", geometry.n1}, {"n2", geometry.n2}, {"d_h", geometry.d_h}, {"d_v", geometry.d_v}}},
        {"channel",
         {{"num_rx", base_scenario.num_rx},
          {"rb_spacing_hz", base_scenario.rb_spacing_hz},
          {"slot_duration_s", base_scenario.slot_duration_s},
          {"num_rb", base_scenario.num_rb},
          {"num_slot", base_scenario.num_slot},
          {"rank_one_gains", base_scenario.rank_one_gains}}},
        {"scenarios", families_json},
        {"grid", {{"Nf", grid.Nf}, {"N_RB", grid.N_RB}, {"Nt", grid.Nt}, {"Ns", grid.Ns}}},
        {"codebooks", codebooks_json},
        {"assistance",
         {{"F", assistance.F},
          {"Q", assistance.Q},
          {"complex_mode", assistance.complex_mode},
          {"noise_snr_db", infinity_aware(assistance.noise_snr_db)}}},
        {"deltas", deltas},
        {"dataset_size", dataset_size},
        {"layers", num_layers},
        {"train",
         {{"learning_rate", train.learning_rate},
          {"epochs", train.epochs},
          {"batch_size", train.batch_size},
          {"train_fraction", train.train_fraction},
          {"validation_fraction", train.validation_fraction},
          {"test_fraction", train.test_fraction},
          {"hidden_layers", train.hidden_layers},
          {"hidden_width", train.hidden_width},
          {"standardize_inputs", train.standardize_inputs},
          {"features", train_features},
          {"delta_as_feature", delta_as_feature}}},
        {"importance", {{"repeats", importance_repeats}, {"keep_fractions", keep_fractions}}},
        {"policies", policies_json},
    };
    return doc.dump();
}

std::string ExperimentConfig::hash() const
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_json())));
    return buf;
}

std::vector<std::int64_t> ExperimentConfig::overhead_table() const
{
    std::vector<std::int64_t> bits;
    bits.reserve(codebooks.size());
    for (const auto &cb : codebooks)
        bits.push_back(overhead_bits(cb, geometry, grid));
    return bits;
}

ScenarioDraw ExperimentConfig::draw_scenario(int index) const
{
    CounterRng rng(derive_seed(seed, "scenario", static_cast<std::uint64_t>(index)));
    const double u_family = rng.uniform();
    const double u_los = rng.uniform();
    const double u_doppler = rng.uniform();
    const double u_k = rng.uniform();
    const double u_delay = rng.uniform();
    const double u_az = rng.uniform();
    const double u_zen = rng.uniform();

    ScenarioDraw draw;
    double acc = 0.0;
    draw.family = static_cast<int>(families.size()) - 1;
    for (std::size_t i = 0; i < families.size(); ++i) {
        acc += families[i].weight;
        if (u_family < acc) {
            draw.family = static_cast<int>(i);
            break;
        }
    }
    const auto &f = families[static_cast<std::size_t>(draw.family)];
    draw.los = u_los < f.los_fraction;
    const auto &p = draw.los ? f.los : f.nlos;

    draw.scenario = base_scenario;
    draw.scenario.num_rays = p.num_rays;
    draw.scenario.rician_k_db = draw.los ? p.rician_k_db.sample(u_k) : -inf;
    draw.scenario.delay_spread_s = p.delay_spread_s.sample(u_delay);
    draw.scenario.azimuth_spread_deg = p.azimuth_spread_deg.sample(u_az);
    draw.scenario.zenith_spread_deg = p.zenith_spread_deg.sample(u_zen);
    draw.scenario.doppler_max_hz = f.doppler_max_hz.sample(u_doppler);
    return draw;
}

std::uint64_t ExperimentConfig::realization_seed(int index) const
{
    return derive_seed(seed, "realization", static_cast<std::uint64_t>(index));
}

ExperimentConfig parse_experiment(const std::string &text)
{
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    check_keys(doc,
               {"seed", "geometry", "channel", "scenarios", "grid", "codebooks", "assistance", "deltas",
                "dataset_size", "layers", "train", "importance", "policies"},
               "config");

    ExperimentConfig cfg = default_experiment();
    read(doc, "seed", cfg.seed, "config");

    if (doc.contains("geometry")) {
        const auto &g = doc["geometry"];
        check_keys(g, {"n1", "n2", "d_h", "d_v"}, "geometry");
        read(g, "n1", cfg.geometry.n1, "geometry");
        read(g, "n2", cfg.geometry.n2, "geometry");
        read(g, "d_h", cfg.geometry.d_h, "geometry");
        read(g, "d_v", cfg.geometry.d_v, "geometry");
    }
    if (doc.contains("channel")) {
        const auto &c = doc["channel"];
        check_keys(c, {"num_rx", "rb_spacing_hz", "slot_duration_s", "num_rb", "num_slot", "rank_one_gains"},
                   "channel");
        read(c, "num_rx", cfg.base_scenario.num_rx, "channel");
        read(c, "rb_spacing_hz", cfg.base_scenario.rb_spacing_hz, "channel");
        read(c, "slot_duration_s", cfg.base_scenario.slot_duration_s, "channel");
        read(c, "num_rb", cfg.base_scenario.num_rb, "channel");
        read(c, "num_slot", cfg.base_scenario.num_slot, "channel");
        read(c, "rank_one_gains", cfg.base_scenario.rank_one_gains, "channel");
    }
    if (doc.contains("scenarios")) {
        const auto &s = doc["scenarios"];
        if (!s.is_array())
            throw ConfigError("scenarios: expected an array");
        cfg.families.clear();
        for (std::size_t i = 0; i < s.size(); ++i)
            cfg.families.push_back(read_family(s[i], "scenarios[" + std::to_string(i) + "]"));
    }
    if (doc.contains("grid")) {
        const auto &g = doc["grid"];
        check_keys(g, {"Nf", "N_RB", "Nt", "Ns"}, "grid");
        read(g, "Nf", cfg.grid.Nf, "grid");
        read(g, "N_RB", cfg.grid.N_RB, "grid");
        read(g, "Nt", cfg.grid.Nt, "grid");
        read(g, "Ns", cfg.grid.Ns, "grid");
    }
    if (doc.contains("codebooks")) {
        const auto &c = doc["codebooks"];
        if (c.is_string()) {
            const auto name = c.get<std::string>();
            if (name == "desk")
                cfg.codebooks = desk_codebooks();
            else if (name == "array256")
                cfg.codebooks = array256_codebooks();
            else
                throw ConfigError("codebooks: unknown preset '" + name + "'");
            cfg.codebook_preset = name;
        } else if (c.is_array()) {
            cfg.codebooks.clear();
            for (std::size_t i = 0; i < c.size(); ++i)
                cfg.codebooks.push_back(read_codebook(c[i], "codebooks[" + std::to_string(i) + "]"));
            cfg.codebook_preset.clear();
        } else {
            throw ConfigError("codebooks: expected a preset name or an array");
        }
    }
    if (doc.contains("assistance")) {
        const auto &a = doc["assistance"];
        check_keys(a, {"F", "Q", "complex_mode", "noise_snr_db"}, "assistance");
        read(a, "F", cfg.assistance.F, "assistance");
        read(a, "Q", cfg.assistance.Q, "assistance");
        read(a, "complex_mode", cfg.assistance.complex_mode, "assistance");
        if (a.contains("noise_snr_db"))
            cfg.assistance.noise_snr_db = number_or_infinity(a["noise_snr_db"], "assistance.noise_snr_db");
    }
    read(doc, "deltas", cfg.deltas, "config");
    read(doc, "dataset_size", cfg.dataset_size, "config");
    read(doc, "layers", cfg.num_layers, "config");
    if (doc.contains("train")) {
        const auto &t = doc["train"];
        check_keys(t,
                   {"learning_rate", "epochs", "batch_size", "train_fraction", "validation_fraction", "test_fraction",
                    "hidden_layers", "hidden_width", "standardize_inputs", "features", "delta_as_feature"},
                   "train");
        read(t, "learning_rate", cfg.train.learning_rate, "train");
        read(t, "epochs", cfg.train.epochs, "train");
        read(t, "batch_size", cfg.train.batch_size, "train");
        read(t, "train_fraction", cfg.train.train_fraction, "train");
        read(t, "validation_fraction", cfg.train.validation_fraction, "train");
        read(t, "test_fraction", cfg.train.test_fraction, "train");
        read(t, "hidden_layers", cfg.train.hidden_layers, "train");
        read(t, "hidden_width", cfg.train.hidden_width, "train");
        read(t, "standardize_inputs", cfg.train.standardize_inputs, "train");
        read(t, "features", cfg.train_features, "train");
        read(t, "delta_as_feature", cfg.delta_as_feature, "train");
    }
    if (doc.contains("importance")) {
        const auto &i = doc["importance"];
        check_keys(i, {"repeats", "keep_fractions"}, "importance");
        read(i, "repeats", cfg.importance_repeats, "importance");
        read(i, "keep_fractions", cfg.keep_fractions, "importance");
    }
    if (doc.contains("policies")) {
        const auto &p = doc["policies"];
        if (!p.is_array())
            throw ConfigError("policies: expected an array");
        cfg.policies.clear();
        for (std::size_t i = 0; i < p.size(); ++i)
            cfg.policies.push_back(read_policy(p[i], "policies[" + std::to_string(i) + "]"));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_experiment(text.str());
}

SelectionPolicy parse_policy(const std::string &text)
{
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : text.substr(colon + 1);
    try {
        if (name == "threshold_first") {
            ThresholdFirst p;
            if (!rest.empty())
                p.rho_min = std::stod(rest);
            return p;
        }
        if (name == "reference_gain") {
            ReferenceGain p;
            if (!rest.empty()) {
                const auto c2 = rest.find(':');
                p.reference = std::stoi(rest.substr(0, c2));
                if (c2 != std::string::npos) {
                    p.rho0.clear();
                    std::stringstream ss(rest.substr(c2 + 1));
                    std::string item;
                    while (std::getline(ss, item, ','))
                        p.rho0.push_back(std::stod(item));
                }
            }
            return p;
        }
    } catch (const std::logic_error &) {
        throw ConfigError("policy: cannot parse '" + text + "'");
    }
    throw ConfigError("policy: unknown policy '" + name + "'");
}

} // namespace cbsel
