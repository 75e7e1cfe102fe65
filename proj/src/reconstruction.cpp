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

#include "risfault/error.hpp"
#include "risfault/estimators.hpp"

namespace risfault
{

RisSignal reconstruct_ris_ls(const BsSignal &y, const cmat &h_rb, const PhaseProfile &phases, const FaultStatusVector &statuses, double ridge)
{
    if (h_rb.rows() != y.samples.size() || static_cast<std::size_t>(h_rb.cols()) != phases.size() ||
        phases.size() != statuses.size())
        throw DimensionError("reconstruct_ris_ls: inconsistent dimensions");
    if (!(ridge >= 0.0))
        throw InvalidInputError("reconstruct_ris_ls: ridge must be non-negative");

    std::vector<Eigen::Index> active;
    for (std::size_t i = 0; i < statuses.size(); ++i)
        if (statuses[i] == 1)
            active.push_back(static_cast<Eigen::Index>(i));
    if (active.empty())
        throw NoActiveElementsError("reconstruct_ris_ls: every element is faulty");

    cmat h_a(h_rb.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j)
        h_a.col(static_cast<Eigen::Index>(j)) = h_rb.col(active[j]) * phases.values()[active[j]];

    cvec v;
    if (ridge == 0.0)
    {
        v = h_a.completeOrthogonalDecomposition().solve(y.samples);
    }
    else
    {
        cmat gram = h_a.adjoint() * h_a;
        gram.diagonal().array() += ridge;
        v = gram.ldlt().solve(h_a.adjoint() * y.samples);
    }

    cvec out = cvec::Zero(static_cast<Eigen::Index>(statuses.size()));
    for (std::size_t j = 0; j < active.size(); ++j)
        out[active[j]] = v[static_cast<Eigen::Index>(j)];
    return {std::move(out)};
}

} // namespace risfault
