#include "frontier/isotonic.hpp"

#include <ostream>

namespace frontier {

DominanceMatrix::DominanceMatrix(Index n) : n_(n), bits_(static_cast<std::size_t>((n * n + 63) / 64), 0) {}

DominanceMatrix DominanceMatrix::ones(Index n) {
  DominanceMatrix p(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) p.set(i, j, true);
  return p;
}

DominanceMatrix DominanceMatrix::identity(Index n) {
  DominanceMatrix p(n);
  for (Index i = 0; i < n; ++i) p.set(i, i, true);
  return p;
}

void DominanceMatrix::set(Index i, Index j, bool value) {
  const std::size_t k = static_cast<std::size_t>(i * n_ + j);
  const std::uint64_t mask = std::uint64_t{1} << (k & 63);
  if (value) {
    bits_[k >> 6] |= mask;
  } else {
    bits_[k >> 6] &= ~mask;
  }
}

Index DominanceMatrix::off_diagonal_count() const {
  Index count = 0;
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j)
      if (i != j && (*this)(i, j)) ++count;
  return count;
}

DominanceMatrix dominance_matrix(const Dataset& ds) {
  const Index n = ds.n();
  DominanceMatrix p(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      p.set(i, j, (ds.x.row(i).array() <= ds.x.row(j).array()).all());
    }
  }
  return p;
}

std::vector<AfriatPair> gated_pairs(const DominanceMatrix& p) {
  std::vector<AfriatPair> out;
  for (Index i = 0; i < p.size(); ++i)
    for (Index j = 0; j < p.size(); ++j)
      if (i != j && p(i, j)) out.push_back({i, j});
  return out;
}

namespace {

FrontierEstimate fit_gated(const Dataset& ds, ModelSpec spec, const DominanceMatrix* p, const FitOptions& opt) {
  spec.isotonic = true;
  if (p && p->size() != ds.n()) throw Error(ErrorKind::invalid_argument, "dominance matrix size does not match the dataset");
  const DominanceMatrix computed = p ? DominanceMatrix() : dominance_matrix(ds);
  return fit_with_rows(ds, spec, gated_pairs(p ? *p : computed), opt);
}

}  // namespace

FrontierEstimate fit_icnls(const Dataset& ds, const CnlsSpec& spec, const DominanceMatrix* p, const FitOptions& opt) {
  return fit_gated(ds, spec.to_model(), p, opt);
}

FrontierEstimate fit_icqr(const Dataset& ds, const CqerSpec& spec, const DominanceMatrix* p, const FitOptions& opt) {
  CqerSpec s = spec;
  s.flavor = Flavor::quantile;
  return fit_gated(ds, s.to_model(), p, opt);
}

FrontierEstimate fit_icer(const Dataset& ds, const CqerSpec& spec, const DominanceMatrix* p, const FitOptions& opt) {
  CqerSpec s = spec;
  s.flavor = Flavor::expectile;
  return fit_gated(ds, s.to_model(), p, opt);
}

void write_dominance_csv(std::ostream& out, const DominanceMatrix& p) {
  out << "i";
  for (Index j = 0; j < p.size(); ++j) out << ",p" << j;
  out << '\n';
  for (Index i = 0; i < p.size(); ++i) {
    out << i;
    for (Index j = 0; j < p.size(); ++j) out << ',' << (p(i, j) ? 1 : 0);
    out << '\n';
  }
}

}  // namespace frontier
