#pragma once

#include <cstddef>

#include "bmih/codes.hpp"
#include "bmih/multi_index.hpp"

namespace bmih {

/// Exact kNN by scanning every code; ties broken by smaller id.
/// Throws std::invalid_argument for an empty database or k == 0.
Neighbors linear_knn(const CodeDatabase& db, CodeView query, std::size_t k);

/// Every id within `radius`, sorted by (distance, id).
Neighbors linear_r_neighbors(const CodeDatabase& db, CodeView query, std::size_t radius);

struct SpeedupMeasurement {
    double ratio = 0.0;           // median linear time / median index time
    double linear_seconds = 0.0;  // median over repetitions, per batch
    double index_seconds = 0.0;
    std::size_t repetitions = 0;
};

/// Times a kNN batch through linear scan and through the index, single-threaded;
/// batches shorter than 20 ms are looped and averaged per sample. The
/// index build is excluded. Throws std::invalid_argument with no queries or fewer
/// than 3 repetitions, std::runtime_error when a median time is zero.
SpeedupMeasurement speedup_factor(const MultiIndex& index, const CodeDatabase& queries, std::size_t k,
                                  std::size_t repetitions = 3);

}  // namespace bmih
