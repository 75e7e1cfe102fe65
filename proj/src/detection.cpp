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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "risfault/error.hpp"
#include "risfault/estimators.hpp"

namespace risfault
{

namespace
{

void check_detection_inputs(const BsSignal &y, const cmat &a, const PhaseProfile &phases)
{
    if (a.rows() != y.samples.size())
        throw DimensionError("detection: A has " + std::to_string(a.rows()) + " rows but y has length " +
                             std::to_string(y.samples.size()));
    if (static_cast<std::size_t>(a.cols()) != phases.size())
        throw DimensionError("detection: A columns and phase profile length differ");
}

double residual_of(const BsSignal &y, const cmat &a, const PhaseProfile &phases, const FaultStatusVector &b)
{
    cvec w = phases.values();
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i] == 0)
            w[static_cast<Eigen::Index>(i)] = 0.0;
    return (y.samples - a * w).norm();
}

struct ExhaustiveSearch
{
    const cmat &columns; // A diag(omega)
    double tie_tol;
    std::size_t n;
    std::vector<cvec> residuals; // residual after deciding elements [0, depth)
    std::vector<std::uint8_t> bits;
    std::size_t ones = 0;

    std::vector<std::uint8_t> best_bits;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_faults = 0;
    std::size_t zero_residual_masks = 0;

    void leaf(double res)
    {
        const std::size_t faults = n - ones;
        if (res <= tie_tol)
            ++zero_residual_masks;
        // Masks are visited in lexicographic order, so an exact tie on both
        // residual and fault count keeps the incumbent.
        const bool better = res < best - tie_tol || (std::abs(res - best) <= tie_tol && faults < best_faults);
        if (better)
        {
            best = res;
            best_faults = faults;
            best_bits = bits;
        }
    }

    void visit(std::size_t depth)
    {
        if (depth == n)
        {
            leaf(residuals[depth].norm());
            return;
        }
        const auto d = static_cast<Eigen::Index>(depth);
        bits[depth] = 0;
        residuals[depth + 1] = residuals[depth];
        visit(depth + 1);
        bits[depth] = 1;
        ++ones;
        residuals[depth + 1].noalias() = residuals[depth] - columns.col(d);
        visit(depth + 1);
        --ones;
    }
};

} // namespace

DetectionResult detect_faults_exhaustive(const BsSignal &y, const cmat &a, const PhaseProfile &phases)
{
    check_detection_inputs(y, a, phases);
    const std::size_t n = phases.size();
    if (n > kMaxExhaustiveElements)
        throw SizeLimitError("detect_faults_exhaustive: N = " + std::to_string(n) + " exceeds the enumeration limit of " +
                             std::to_string(kMaxExhaustiveElements));

    const cmat columns = a * phases.values().asDiagonal();
    double scale = y.samples.norm();
    for (Eigen::Index c = 0; c < columns.cols(); ++c)
        scale += columns.col(c).norm();

    ExhaustiveSearch search{columns, 1e-9 * std::max(scale, std::numeric_limits<double>::min()), n, {}, {}, 0, {}};
    search.residuals.assign(n + 1, cvec(y.samples.size()));
    search.residuals[0] = y.samples;
    search.bits.assign(n, 0);
    search.visit(0);

    DetectionResult result;
    result.estimated_statuses = FaultStatusVector(search.best_bits);
    result.residual_norm = residual_of(y, a, phases, result.estimated_statuses);
    result.ambiguous = search.zero_residual_masks > 1;
    return result;
}

namespace
{

struct Pursuit
{
    std::vector<Eigen::Index> support;
    cvec x;
    cvec r;
    bool converged = false;
};

/// Sparse fit of r0 by columns of d: matching pursuit with least-squares
/// refits, then single-atom exchanges while the budget is spent above tol.
class SupportSearch
{
  public:
    SupportSearch(const cmat &d, const cvec &r0, std::size_t max_faulty, double tol)
        : d_(d), r0_(r0), max_faulty_(max_faulty), tol_(tol), col_norms_(d.colwise().norm().transpose())
    {
    }

    const Eigen::VectorXd &col_norms() const { return col_norms_; }

    Pursuit run(std::optional<Eigen::Index> first) const
    {
        Pursuit p;
        p.r = r0_;
        p.converged = p.r.norm() <= tol_;
        std::vector<bool> chosen(static_cast<std::size_t>(d_.cols()), false);
        if (first && !p.converged && max_faulty_ > 0)
            add(p, chosen, *first);

        while (!p.converged && p.support.size() < max_faulty_)
        {
            const Eigen::Index pick = strongest(p.r, chosen);
            if (pick < 0)
                break;
            add(p, chosen, pick);
        }

        // Coherent columns can lure the first picks away from the true support.
        for (std::size_t round = 0; !p.converged && !p.support.empty() && round < 4 * p.support.size(); ++round)
        {
            double best_norm = p.r.norm();
            std::size_t best_slot = 0;
            Eigen::Index best_col = -1;
            for (std::size_t slot = 0; slot < p.support.size(); ++slot)
            {
                auto trial = p.support;
                for (Eigen::Index c = 0; c < d_.cols(); ++c)
                {
                    if (chosen[static_cast<std::size_t>(c)] || !(col_norms_[c] > 0.0))
                        continue;
                    trial[slot] = c;
                    cvec x;
                    const double norm = refit(trial, x).norm();
                    if (norm < best_norm * (1.0 - 1e-12))
                    {
                        best_norm = norm;
                        best_slot = slot;
                        best_col = c;
                    }
                }
            }
            if (best_col < 0)
                break;
            chosen[static_cast<std::size_t>(p.support[best_slot])] = false;
            chosen[static_cast<std::size_t>(best_col)] = true;
            p.support[best_slot] = best_col;
            p.r = refit(p.support, p.x);
            p.converged = p.r.norm() <= tol_;
        }
        return p;
    }

    /// Unselected columns ordered by normalized correlation with r, strongest first.
    std::vector<Eigen::Index> ranked(const cvec &r) const
    {
        std::vector<Eigen::Index> cols;
        std::vector<double> corr(static_cast<std::size_t>(d_.cols()), 0.0);
        for (Eigen::Index c = 0; c < d_.cols(); ++c)
        {
            if (!(col_norms_[c] > 0.0))
                continue;
            corr[static_cast<std::size_t>(c)] = std::abs(d_.col(c).dot(r)) / col_norms_[c];
            cols.push_back(c);
        }
        std::stable_sort(cols.begin(), cols.end(), [&](Eigen::Index a, Eigen::Index b) {
            return corr[static_cast<std::size_t>(a)] > corr[static_cast<std::size_t>(b)];
        });
        return cols;
    }

  private:
    cvec refit(const std::vector<Eigen::Index> &cols, cvec &x) const
    {
        cmat ds(d_.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i)
            ds.col(static_cast<Eigen::Index>(i)) = d_.col(cols[i]);
        x = ds.colPivHouseholderQr().solve(r0_);
        return r0_ - ds * x;
    }

    void add(Pursuit &p, std::vector<bool> &chosen, Eigen::Index c) const
    {
        chosen[static_cast<std::size_t>(c)] = true;
        p.support.push_back(c);
        p.r = refit(p.support, p.x);
        p.converged = p.r.norm() <= tol_;
    }

    Eigen::Index strongest(const cvec &r, const std::vector<bool> &chosen) const
    {
        Eigen::Index pick = -1;
        double best = -1.0;
        for (Eigen::Index c = 0; c < d_.cols(); ++c)
        {
            if (chosen[static_cast<std::size_t>(c)] || !(col_norms_[c] > 0.0))
                continue;
            const double corr = std::abs(d_.col(c).dot(r)) / col_norms_[c];
            if (corr > best)
            {
                best = corr;
                pick = c;
            }
        }
        return pick;
    }

    const cmat &d_;
    const cvec &r0_;
    std::size_t max_faulty_;
    double tol_;
    Eigen::VectorXd col_norms_;
};

} // namespace

DetectionResult detect_faults_greedy(const BsSignal &y, const cmat &a, const PhaseProfile &phases, std::size_t max_faulty, double tol)
{
    check_detection_inputs(y, a, phases);
    const std::size_t n = phases.size();
    if (max_faulty > n)
        throw InvalidInputError("detect_faults_greedy: max_faulty exceeds N");

    const cmat d = a * phases.values().asDiagonal();
    const cvec r0 = d * cvec::Ones(d.cols()) - y.samples;
    const SupportSearch search(d, r0, max_faulty, tol);

    Pursuit best = search.run(std::nullopt);
    if (!best.converged && !best.support.empty())
    {
        // Restart with each of the next strongest first picks; keep the
        // smallest residual.
        const auto order = search.ranked(r0);
        const std::size_t restarts = std::min<std::size_t>(order.size(), kGreedyRestarts + 1);
        for (std::size_t i = 1; i < restarts && !best.converged; ++i)
        {
            Pursuit p = search.run(order[i]);
            if (p.r.norm() < best.r.norm())
                best = std::move(p);
        }
    }

    std::vector<std::uint8_t> b(n, 1);
    for (std::size_t i = 0; i < best.support.size(); ++i)
        if (best.x[static_cast<Eigen::Index>(i)].real() >= 0.5)
            b[static_cast<std::size_t>(best.support[i])] = 0;

    DetectionResult result;
    result.estimated_statuses = FaultStatusVector(std::move(b));
    result.residual_norm = residual_of(y, a, phases, result.estimated_statuses);
    result.converged = best.converged;
    return result;
}

double greedy_tolerance(const BsSignal &y, double snr_db, double margin)
{
    const double norm = y.samples.norm();
    if (snr_db >= NoiseSpec::kMaxSnrDb)
        return 1e-9 * norm;
    // |y|^2 ~ |s|^2 (1 + rho) with rho = 10^(-snr/10); the noise norm is |s| sqrt(rho).
    const double rho = std::pow(10.0, -snr_db / 10.0);
    return margin * norm * std::sqrt(rho / (1.0 + rho));
}

} // namespace risfault
