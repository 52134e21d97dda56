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

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace stdmmf {

/// Seeded random source. Normal draws use an explicit Box-Muller transform so
/// the full generator state is the mt19937_64 engine alone, which makes the
/// checkpointed RNG state an exact resume point.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    double uniform() {
        // 53-bit mantissa in [0,1).
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    uint64_t integer(uint64_t n) { return engine_() % n; }

    std::mt19937_64& engine() { return engine_; }

    std::string save_state() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    void restore_state(const std::string& s) {
        std::istringstream is(s);
        is >> engine_;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace stdmmf
