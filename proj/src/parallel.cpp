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

#include "risfault/parallel.hpp"

#include <cstdlib>
#include <string>

namespace risfault
{

unsigned resolve_thread_count(std::optional<unsigned> requested)
{
    if (requested && *requested > 0)
        return *requested;
    if (const char *env = std::getenv("RISFAULTSIM_THREADS"))
    {
        try
        {
            const long v = std::stol(env);
            if (v > 0)
                return static_cast<unsigned>(v);
        }
        catch (const std::exception &)
        {
            // ignore malformed values
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace risfault
