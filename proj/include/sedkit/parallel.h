/*
 * Copyright 2026 The sedkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SEDKIT_PARALLEL_H_
#define SEDKIT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace sedkit {

// Worker count: SEDKIT_THREADS if set to a positive integer, else the
// hardware concurrency (at least 1).
std::size_t WorkerCount();

// Calls fn(i) for every i in [0, n) across WorkerCount() threads in contiguous
// chunks. fn must only write state owned by index i.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sedkit

#endif  // SEDKIT_PARALLEL_H_
