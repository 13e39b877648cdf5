#pragma once

#include <vector>

namespace socs {

struct Assignment {
  double value = 0.0;
  std::vector<int> row_to_col;  // -1 when the row is left unmatched
};

// Maximum-weight (not necessarily perfect) bipartite matching on a
// rows x cols matrix of non-negative weights. O(n^3) Hungarian method.
Assignment max_weight_matching(const std::vector<std::vector<double>>& w);

}  // namespace socs
