// Copyright 2026 The dpadmm Authors
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

#ifndef DPADMM_CSV_HPP_
#define DPADMM_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace dpadmm::csv {

// Shortest representation that parses back to the identical double.
std::string format_double(double value);

// Strict parse of a whole field; throws ParseError on trailing garbage.
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

std::string_view trim(std::string_view s);

// Splits on commas and trims each field. No quoting support; none of the
// emitted schemas need it.
std::vector<std::string> split(std::string_view line);

}  // namespace dpadmm::csv

#endif  // DPADMM_CSV_HPP_
