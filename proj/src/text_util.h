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

// std::string_view splitting helpers. The system absl is built with its own
// string_view type, so its splitters do not accept std::string_view.

#ifndef SYNTHBENCH_SRC_TEXT_UTIL_H_
#define SYNTHBENCH_SRC_TEXT_UTIL_H_

#include <string_view>
#include <vector>

namespace synthbench::internal {

inline std::string_view StripWhitespace(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const size_t begin = s.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) return {};
  const size_t end = s.find_last_not_of(kSpace);
  return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string_view> Split(std::string_view s, char sep,
                                           bool skip_empty = false) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    std::string_view piece = s.substr(
        start, pos == std::string_view::npos ? std::string_view::npos
                                             : pos - start);
    if (!skip_empty || !piece.empty()) parts.push_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace synthbench::internal

#endif  // SYNTHBENCH_SRC_TEXT_UTIL_H_
