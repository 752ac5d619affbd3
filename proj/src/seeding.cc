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

#include "synthbench/seeding.h"

namespace synthbench {

uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t SeedFor(uint64_t master, uint64_t l_idx, uint64_t m_idx,
                 uint64_t n_idx, StreamTag tag) {
  uint64_t h = Mix64(master);
  h = Mix64(h ^ static_cast<uint64_t>(tag));
  h = Mix64(h ^ l_idx);
  h = Mix64(h ^ m_idx);
  h = Mix64(h ^ n_idx);
  return h;
}

uint64_t DeriveSeed(uint64_t root, uint64_t index) {
  return Mix64(Mix64(root) ^ Mix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace synthbench
