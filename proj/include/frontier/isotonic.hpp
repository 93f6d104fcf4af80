#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "frontier/afriat.hpp"
#include "frontier/model.hpp"

namespace frontier {

/// Binary n x n matrix, p(i, j) = 1 iff x_i <= x_j componentwise.
class DominanceMatrix {
 public:
  DominanceMatrix() = default;
  explicit DominanceMatrix(Index n);

  static DominanceMatrix ones(Index n);
  static DominanceMatrix identity(Index n);

  Index size() const { return n_; }
  bool operator()(Index i, Index j) const {
    const std::size_t k = static_cast<std::size_t>(i * n_ + j);
    return (bits_[k >> 6] >> (k & 63)) & 1u;
  }
  void set(Index i, Index j, bool value);

  /// Number of set entries with i != j, i.e. the isotonic Afriat row count.
  Index off_diagonal_count() const;

  bool operator==(const DominanceMatrix&) const = default;

 private:
  Index n_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Exact O(n^2 m) enumeration. Tied inputs dominate each other.
DominanceMatrix dominance_matrix(const Dataset& ds);

/// Afriat pairs (i, j), i != j, with p(i, j) = 1, row-major.
std::vector<AfriatPair> gated_pairs(const DominanceMatrix& p);

/// Isotonic estimators. `p` overrides the dominance matrix computed from the
/// data (used to force all-ones or identity matrices).
FrontierEstimate fit_icnls(const Dataset& ds, const CnlsSpec& spec, const DominanceMatrix* p = nullptr,
                           const FitOptions& opt = {});
FrontierEstimate fit_icqr(const Dataset& ds, const CqerSpec& spec, const DominanceMatrix* p = nullptr,
                          const FitOptions& opt = {});
FrontierEstimate fit_icer(const Dataset& ds, const CqerSpec& spec, const DominanceMatrix* p = nullptr,
                          const FitOptions& opt = {});

/// CSV dump: header "i,p0,...,p{n-1}", one row of 0/1 entries per observation.
void write_dominance_csv(std::ostream& out, const DominanceMatrix& p);

}  // namespace frontier
