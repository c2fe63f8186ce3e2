#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fraudward/matrix.hpp"
#include "fraudward/tree.hpp"

namespace fraudward::reference {

// Plain serial re-implementations of the hot kernels, kept independent of
// the production code paths. Tests pin the parallel kernels against these;
// the benchmark target reports the speed gap.

// Pairwise concordance with half credit for ties: O(n_pos * n_neg).
double auc_pairwise(std::span<const double> scores, std::span<const int32_t> labels);

// Brute-force split search: every feature, every midpoint between
// consecutive distinct values, statistics recomputed from scratch per
// threshold. Accumulation conventions (node stats in ascending row order,
// prefixes in ascending (value, row) order, right side = parent - prefix)
// match the documented scan contract, so gains compare bit-exactly.
SplitCandidate best_split_exhaustive(const Matrix& m, std::span<const double> targets,
                                     std::span<const int32_t> row_subset,
                                     std::span<const int32_t> feature_subset, Impurity impurity);

// Naive single-threaded sample covariance (divisor n_rows - 1).
Matrix covariance_serial(const Matrix& m);

}  // namespace fraudward::reference
