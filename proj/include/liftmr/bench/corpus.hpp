// Copyright 2026 The liftmr Authors.
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

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace liftmr::bench {

struct CorpusEntry {
  std::string_view name;
  std::string_view source;
};

inline constexpr std::string_view kSummationSource = R"mj(// Sum of all elements.
int main(int[] data) {
  int sum = 0;
  for (int i = 0; i < length(data); i++) {
    sum = sum + data[i];
  }
  return sum;
}
)mj";

inline constexpr std::string_view kWordcountSource = R"mj(// Occurrences of each token.
void main(string[] data) {
  map<string,int> counts = new map<string,int>();
  for (int i = 0; i < length(data); i++) {
    string w = data[i];
    put(counts, w, get(counts, w) + 1);
  }
}
)mj";

inline constexpr std::string_view kStringmatchSource = R"mj(// Whether each of two keys occurs in the token stream.
void main(string[] data, string k1, string k2) {
  bool found1 = false;
  bool found2 = false;
  for (int i = 0; i < length(data); i++) {
    if (data[i] == k1) {
      found1 = true;
    }
    if (data[i] == k2) {
      found2 = true;
    }
  }
}
)mj";

inline constexpr std::string_view kHistogram3dSource = R"mj(// Per-channel intensity histogram over interleaved r,g,b pixels.
void main(int[] data) {
  int[] hR = new int[256];
  int[] hG = new int[256];
  int[] hB = new int[256];
  for (int i = 0; i < length(data); i += 3) {
    int r = data[i];
    int g = data[i + 1];
    int b = data[i + 2];
    hR[r]++;
    hG[g]++;
    hB[b]++;
  }
}
)mj";

inline constexpr std::string_view kLinregressSource = R"mj(// Accumulators for least-squares regression over interleaved x,y points.
void main(int[] data) {
  int sx = 0;
  int sy = 0;
  int sxx = 0;
  int sxy = 0;
  int syy = 0;
  for (int i = 0; i < length(data); i += 2) {
    int x = data[i];
    int y = data[i + 1];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
}
)mj";

inline const std::vector<CorpusEntry> &corpus() {
  static const std::vector<CorpusEntry> entries = {
      {"summation", kSummationSource},
      {"wordcount", kWordcountSource},
      {"stringmatch", kStringmatchSource},
      {"histogram3d", kHistogram3dSource},
      {"linregress", kLinregressSource},
  };
  return entries;
}

inline std::string_view corpus_source(std::string_view name) {
  for (const auto &e : corpus())
    if (e.name == name)
      return e.source;
  return {};
}

} // namespace liftmr::bench
