// Copyright 2026 The Costtalk Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef COSTTALK_PARALLEL_H_
#define COSTTALK_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace costtalk {

// Environment variable holding the worker count.
inline constexpr const char* kWorkersEnv = "COSTTALK_WORKERS";

// COSTTALK_WORKERS if set to a positive integer, else hardware concurrency.
std::size_t WorkerCount();

// Calls body(begin, end) on contiguous chunks covering [0, n). Chunk
// boundaries depend only on n and the worker count; callers write results
// into per-index slots so merged output is independent of scheduling.
void ParallelChunks(std::size_t n,
                    const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace costtalk

#endif  // COSTTALK_PARALLEL_H_
