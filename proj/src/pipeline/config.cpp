// Copyright 2026 the stdmmf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pipeline/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace stdmmf {

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1, got " + std::to_string(epochs));
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must lie in [0,1)");
    if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
    if (clip_len < 1) throw ConfigError("clip_len must be >= 1, got " + std::to_string(clip_len));
    if (input_size < 32 || input_size % 32 != 0)
        throw ConfigError("input_size must be a positive multiple of 32, got " + std::to_string(input_size));
    if (loss_w1 < 0.0 || loss_w2 < 0.0) throw ConfigError("loss weights must be nonnegative");
    if (gate_threshold < 0.0 || gate_threshold > 1.0) throw ConfigError("gate_threshold must lie in [0,1]");
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(d);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
    }
}

}  // namespace

TrainConfig parse_train_config_text(const std::string& text) {
    TrainConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value', got '" + stripped +
                              "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "epochs")
            cfg.epochs = parse_int(key, value);
        else if (key == "learning_rate")
            cfg.learning_rate = parse_double(key, value);
        else if (key == "momentum")
            cfg.momentum = parse_double(key, value);
        else if (key == "weight_decay")
            cfg.weight_decay = parse_double(key, value);
        else if (key == "clip_len")
            cfg.clip_len = parse_int(key, value);
        else if (key == "input_size")
            cfg.input_size = parse_int(key, value);
        else if (key == "loss_w1")
            cfg.loss_w1 = parse_double(key, value);
        else if (key == "loss_w2")
            cfg.loss_w2 = parse_double(key, value);
        else if (key == "gate_threshold")
            cfg.gate_threshold = parse_double(key, value);
        else if (key == "seed")
            cfg.seed = static_cast<uint64_t>(std::stoull(value));
        else if (key == "disable_temporal")
            cfg.disable_temporal = parse_bool(key, value);
        else if (key == "disable_ila")
            cfg.disable_ila = parse_bool(key, value);
        else if (key == "disable_ilw")
            cfg.disable_ilw = parse_bool(key, value);
        else if (key == "disable_bma")
            cfg.disable_bma = parse_bool(key, value);
        else
            throw ConfigError("unknown config key '" + key + "' (line " + std::to_string(lineno) + ")");
    }
    cfg.validate();
    return cfg;
}

TrainConfig load_train_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_train_config_text(ss.str());
}

std::string serialize_train_config(const TrainConfig& cfg) {
    char buf[1024];
    std::snprintf(buf, sizeof(buf),
                  "epochs = %d\n"
                  "learning_rate = %.17g\n"
                  "momentum = %.17g\n"
                  "weight_decay = %.17g\n"
                  "clip_len = %d\n"
                  "input_size = %d\n"
                  "loss_w1 = %.17g\n"
                  "loss_w2 = %.17g\n"
                  "gate_threshold = %.17g\n"
                  "seed = %" PRIu64 "\n"
                  "disable_temporal = %s\n"
                  "disable_ila = %s\n"
                  "disable_ilw = %s\n"
                  "disable_bma = %s\n",
                  cfg.epochs, cfg.learning_rate, cfg.momentum, cfg.weight_decay, cfg.clip_len, cfg.input_size,
                  cfg.loss_w1, cfg.loss_w2, cfg.gate_threshold, cfg.seed, cfg.disable_temporal ? "true" : "false",
                  cfg.disable_ila ? "true" : "false", cfg.disable_ilw ? "true" : "false",
                  cfg.disable_bma ? "true" : "false");
    return buf;
}

}  // namespace stdmmf
