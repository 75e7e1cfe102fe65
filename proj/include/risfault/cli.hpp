// SPDX-License-Identifier: Apache-2.0
//
// risfaultsim: RIS-aided uplink localization testbed with faulty elements
// Copyright (C) 2026 The risfaultsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace risfault
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

/// "a:b:s" (inclusive range, s > 0, b >= a) or a comma-separated list; "inf"
/// means noiseless. Throws InvalidInputError on malformed or empty input.
std::vector<double> parse_snr_list(const std::string &text);

/// Entry point of the risfaultsim tool. Returns one of the exit codes above.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace risfault
