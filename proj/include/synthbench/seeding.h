//
// Copyright 2026 The Synthbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Index-based seed derivation. Every random stream in a benchmark run is
// keyed by its position in the Monte Carlo grid, never by execution order, so
// results do not depend on how work is scheduled.

#ifndef SYNTHBENCH_SEEDING_H_
#define SYNTHBENCH_SEEDING_H_

#include <cstdint>

namespace synthbench {

enum class StreamTag : uint64_t {
  kTrainData = 1,
  kTestData = 2,
  kFit = 3,
  kSample = 4,
  kWassersteinNull = 5,
  kPmseNull = 6,
  kSubPlan = 7,
};

// SplitMix64 finalizer; a bijection on 64-bit words.
uint64_t Mix64(uint64_t x);

// Counter-mode hash of (master, l, m, n, tag).
uint64_t SeedFor(uint64_t master, uint64_t l_idx, uint64_t m_idx,
                 uint64_t n_idx, StreamTag tag);

// Seed for the `index`-th iteration of a loop rooted at `root`.
uint64_t DeriveSeed(uint64_t root, uint64_t index);

}  // namespace synthbench

#endif  // SYNTHBENCH_SEEDING_H_
