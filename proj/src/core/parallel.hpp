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

#include <cstdint>
#include <functional>

namespace stdmmf {

/// Worker count: hardware concurrency capped by the STDMMF_NUM_THREADS
/// environment variable when set. `requested` overrides both when > 0,
/// and the deterministic override forces 1 regardless.
int worker_threads(int requested = 0);

/// Deterministic mode: every worker pool runs single-threaded until cleared.
void set_single_thread_mode(bool on);
bool single_thread_mode();

/// Runs fn(i) for i in [0, n) across up to `threads` workers. Results written
/// by index are identical regardless of the thread count, so reductions done
/// afterwards in index order stay deterministic.
void parallel_for(int64_t n, int threads, const std::function<void(int64_t)>& fn);

}  // namespace stdmmf
