#pragma once

#include <string>
#include <vector>

#include "cfpc/types.hpp"

namespace cfpc {

// Supervised rows: features X and labels Y, fixed widths.
struct Dataset {
  std::vector<RVec> X;
  std::vector<RVec> Y;

  int rows() const { return static_cast<int>(X.size()); }
  int in_cols() const { return X.empty() ? 0 : static_cast<int>(X.front().size()); }
  int out_cols() const { return Y.empty() ? 0 : static_cast<int>(Y.front().size()); }
};

// Binary layout: magic "CFD1", then little-endian u32 rows, u32 in-cols,
// u32 out-cols, then per row the input doubles followed by the label doubles.
// A partial file is removed if writing fails.
void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

// Contiguous 80/10/10 index ranges over n rows.
struct SplitIndices {
  std::vector<int> train, val, test;
};
SplitIndices split_indices(int n);

} // namespace cfpc
