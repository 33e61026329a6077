#pragma once

#include <string>
#include <vector>

#include "secagg/model.hpp"

namespace secagg {

// Gaussian class blobs with unit spread: class c is centred at
// separation * e_{c mod dim}, so neighbouring centres sit separation*sqrt(2)
// apart and the task is comfortably linearly separable for separation >= 5.
Dataset gen_blobs(uint32_t classes, uint32_t dim, size_t count,
                  double separation, uint64_t seed);

// Per-client shards drawn from the blob distribution.  With
// heterogeneity h in [0, 1), each sample is the client's dominant class
// (client index mod classes) with probability h and uniform otherwise;
// h = 0 is IID.
std::vector<Dataset> gen_synthetic_shards(uint32_t classes, uint32_t dim,
                                          uint32_t n_clients,
                                          size_t per_client,
                                          double separation,
                                          double heterogeneity, uint64_t seed);

// CSV rows are feature columns followed by an integer class label.
// Features are min-max normalized to [0, 1] per column; the label set
// must be 0 .. classes-1 with every class present.
Dataset load_csv_dataset(const std::string &path, bool has_header);

// deterministic split into n near-equal shards; heterogeneity as above,
// realized by dealing a label-sorted prefix in contiguous blocks
std::vector<Dataset> shard_dataset(const Dataset &data, uint32_t n_clients,
                                   double heterogeneity, uint64_t seed);

}  // namespace secagg
