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

#include "core/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace stdmmf {

namespace {
std::atomic<bool> g_single_thread{false};
}

void set_single_thread_mode(bool on) { g_single_thread.store(on); }
bool single_thread_mode() { return g_single_thread.load(); }

int worker_threads(int requested) {
    if (g_single_thread.load()) return 1;
    if (requested > 0) return requested;
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("STDMMF_NUM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < hw) hw = cap;
    }
    return hw;
}

void parallel_for(int64_t n, int threads, const std::function<void(int64_t)>& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int t = static_cast<int>(std::min<int64_t>(threads, n));
    std::atomic<int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(t));
    for (int i = 0; i < t; ++i) {
        pool.emplace_back([&]() {
            for (;;) {
                const int64_t idx = next.fetch_add(1);
                if (idx >= n) return;
                fn(idx);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace stdmmf
