// Copyright 2026 The roomecho Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace roomecho {

// Worker count: an explicit override if set, else ROOMECHO_THREADS, else the
// hardware concurrency. Always >= 1.
int thread_count();
// 0 clears the override.
void set_thread_override(int threads);

// Runs fn(i) for i in [0, n) on up to thread_count() threads. Work items are
// handed out in index order; the exception from the lowest failing index is
// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace roomecho
