// tests/tree_bytes.hpp

// Copyright 2026  The distill-nmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef DISTILL_TESTS_TREE_BYTES_HPP_
#define DISTILL_TESTS_TREE_BYTES_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace distill::testing {

/// Relative path -> file contents for every regular file under `dir`.
inline std::map<std::string, std::string> tree_bytes(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[std::filesystem::relative(e.path(), dir).string()] = s.str();
  }
  return out;
}

}  // namespace distill::testing

#endif  // DISTILL_TESTS_TREE_BYTES_HPP_
