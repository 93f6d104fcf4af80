#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "frontier/afriat.hpp"
#include "frontier/cnls.hpp"
#include "frontier/cqer.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace frontier;
using support::make_dataset;

namespace {

Dataset one_input(std::initializer_list<double> xs, std::initializer_list<double> ys) {
  VectorXd x = Eigen::Map<const VectorXd>(xs.begin(), static_cast<Index>(xs.size()));
  VectorXd y = Eigen::Map<const VectorXd>(ys.begin(), static_cast<Index>(ys.size()));
  return make_dataset(x, y);
}

FrontierEstimate with_residuals(const VectorXd& eps) {
  FrontierEstimate e;
  e.alpha = VectorXd::Zero(eps.size());
  e.beta = MatrixXd::Ones(eps.size(), 1);
  e.residuals = eps;
  e.fitted = VectorXd::Zero(eps.size());
  return e;
}

}  // namespace

TEST_SUITE("models_cnls") {

TEST_CASE("single observation is fitted exactly") {
  const Dataset ds = one_input({2.0}, {3.0});
  const auto e = fit_cnls(ds, {});
  REQUIRE(e.diagnostics.status == SolveStatus::optimal);
  CHECK(e.objective_value <= 1e-12);
  CHECK(e.alpha[0] + e.beta(0, 0) * 2.0 == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("data on a concave increasing function") {
  const Dataset ds = one_input({1.0, 4.0, 9.0}, {1.0, 2.0, 3.0});
  const auto e = fit_cnls(ds, {});
  REQUIRE(e.diagnostics.status == SolveStatus::optimal);
  CHECK(e.objective_value <= 1e-10);
  CHECK(e.residuals->cwiseAbs().maxCoeff() <= 1e-6);

  const auto adj = c2nls_adjust(e);
  CHECK(adj.adjusted_residuals.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("two points") {
  const Dataset ds = one_input({1.0, 2.0}, {1.0, 3.0});
  const auto e = fit_cnls(ds, {});
  CHECK(e.residuals->cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(e.objective_value == doctest::Approx(oracle::cnls_grid_1d(ds.x.col(0), ds.response())).epsilon(1e-6));
}

TEST_CASE("grid oracle on noisy one-input data") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Dataset ds = support::noisy_sample(5, 1, seed);
    const auto e = fit_cnls(ds, {});
    const double ref = oracle::cnls_grid_1d(ds.x.col(0), ds.response());
    CHECK(std::abs(e.objective_value - ref) <= 1e-5 * std::max(1.0, ref));
  }
}

TEST_CASE("cost function on convex data") {
  const Dataset ds = one_input({1.0, 2.0, 3.0, 4.0}, {1.0, 4.0, 9.0, 16.0});
  CnlsSpec s;
  s.function_type = FunctionType::cost;
  const auto e = fit_cnls(ds, s);
  CHECK(e.objective_value <= 1e-10);
  // same data are not concave, so the production fit leaves residuals
  CHECK(fit_cnls(ds, {}).objective_value > 1e-3);
}

TEST_CASE("c2nls adjustment") {
  VectorXd eps(3);
  eps << -1.0, 0.0, 2.0;
  auto adj = c2nls_adjust(with_residuals(eps));
  CHECK(adj.adjusted_residuals == Eigen::Vector3d(-3.0, -2.0, 0.0));
  CHECK(adj.shift == 2.0);
  CHECK(adj.adjusted_alpha == Eigen::Vector3d::Constant(2.0));

  adj = c2nls_adjust(with_residuals(VectorXd::Constant(4, 0.7)));
  CHECK(adj.adjusted_residuals.isZero(0.0));
  CHECK(adj.shift == 0.7);

  const Dataset ds = support::noisy_sample(6, 1, 4);
  CqerSpec q;
  q.tau = 0.3;
  CHECK_THROWS_AS((void)c2nls_adjust(fit_cqr(ds, q)), Error);
}

TEST_CASE("shape invariants on noisy two-input data") {
  const Dataset ds = support::noisy_sample(25, 2, 9);
  for (FunctionType fun : {FunctionType::production, FunctionType::cost}) {
    CnlsSpec s;
    s.function_type = fun;
    const auto e = fit_cnls(ds, s);
    REQUIRE(e.diagnostics.status == SolveStatus::optimal);
    CHECK(e.beta.minCoeff() >= -1e-9);
    CHECK(std::abs(e.residuals->sum()) <= 1e-6 * 25);
    const VectorXd direct = ds.response() - e.alpha - e.beta.cwiseProduct(ds.x).rowwise().sum();
    CHECK(support::max_abs_diff(direct, *e.residuals) <= 1e-9);
    CHECK(oracle::afriat_violations(e.alpha, e.beta, ds.x, fun == FunctionType::production, 1e-6).empty());

    // envelope over all planes reproduces the own plane
    const MatrixXd planes = evaluate_planes(ds, e);
    for (Index i = 0; i < ds.n(); ++i) {
      const double env = fun == FunctionType::production ? planes.row(i).minCoeff() : planes.row(i).maxCoeff();
      CHECK(std::abs(env - e.fitted[i]) <= 1e-6);
    }
  }
}

TEST_CASE("constant returns to scale") {
  const Dataset ds = support::noisy_sample(15, 2, 21);
  CnlsSpec s;
  s.rts = ReturnsToScale::crs;
  const auto e = fit_cnls(ds, s);
  REQUIRE(e.diagnostics.status == SolveStatus::optimal);
  CHECK(e.alpha.isZero(0.0));

  Dataset scaled = ds;
  scaled.x *= 3.0;
  scaled.y *= 3.0;
  const auto f = fit_cnls(scaled, s);
  CHECK(support::max_abs_diff(*f.residuals, 3.0 * *e.residuals) <= 1e-5);
}

TEST_CASE("objective does not depend on observation order") {
  const Dataset ds = support::noisy_sample(12, 2, 5);
  std::vector<Index> perm(12);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[2], perm[7]);
  Dataset p = ds;
  for (Index i = 0; i < 12; ++i) {
    p.x.row(i) = ds.x.row(perm[static_cast<std::size_t>(i)]);
    p.y.row(i) = ds.y.row(perm[static_cast<std::size_t>(i)]);
  }
  const double a = fit_cnls(ds, {}).objective_value;
  const double b = fit_cnls(p, {}).objective_value;
  CHECK(std::abs(a - b) <= 1e-7 * std::max(1.0, a));
}

TEST_CASE("multiplicative fit") {
  Dataset ds = support::noisy_sample(12, 1, 8, 0.2);
  ds.y = ds.y.cwiseMax(0.1);
  CnlsSpec s;
  s.error_composition = ErrorComposition::multiplicative;
  const auto e = fit_cnls(ds, s);
  REQUIRE(e.diagnostics.status == SolveStatus::optimal);
  REQUIRE(e.phi.has_value());
  CHECK(support::max_abs_diff(e.phi->array() + 1.0, e.fitted) <= 1e-12);
  const VectorXd logres = ds.response().array().log() - e.fitted.array().log();
  CHECK(support::max_abs_diff(logres, *e.residuals) <= 1e-12);
  CHECK(e.beta.minCoeff() >= -1e-9);
  CHECK((e.fitted.array() >= 1e-6 - 1e-9).all());
  CHECK(oracle::afriat_violations(e.alpha, e.beta, ds.x, true, 1e-6).empty());
}

TEST_CASE("multiplicative fit beats the additive start") {
  const Dataset ds = one_input({1.0, 2.0, 3.0}, {1.0, 1.1, 3.0});
  CnlsSpec s;
  s.error_composition = ErrorComposition::multiplicative;
  const auto e = fit_cnls(ds, s);
  REQUIRE(e.diagnostics.status == SolveStatus::optimal);
  const auto add = fit_cnls(ds, {});
  const VectorXd start = ds.response().array().log() - add.fitted.array().max(1e-6).log();
  CHECK(e.objective_value <= start.squaredNorm() + 1e-9);
}

TEST_CASE("contextual variables") {
  Dataset ds = support::noisy_sample(15, 1, 13, 0.1);
  ds.y = ds.y.cwiseMax(0.1);
  ds.z = MatrixXd(15, 1);
  for (Index i = 0; i < 15; ++i) (*ds.z)(i, 0) = (i % 3) - 1.0;
  ds.z_names = {"z1"};
  ds.y.col(0).array() *= ((*ds.z).col(0).array() * 0.3).exp();

  CnlsSpec s;
  s.error_composition = ErrorComposition::multiplicative;
  s.use_contextual = true;
  const auto e = fit_cnls(ds, s);
  REQUIRE(e.diagnostics.status == SolveStatus::optimal);
  REQUIRE(e.z_coefficients.has_value());
  const VectorXd logres =
      ds.response().array().log() - e.fitted.array().log() - ((*ds.z) * (*e.z_coefficients)).array();
  CHECK(support::max_abs_diff(logres, *e.residuals) <= 1e-10);
  CHECK((*e.z_coefficients)[0] > 0.0);

  s.error_composition = ErrorComposition::additive;
  CHECK_THROWS_AS((void)fit_cnls(ds, s), Error);
}

TEST_CASE("multiplicative model rejects nonpositive outputs") {
  Dataset ds = support::noisy_sample(5, 1, 2);
  ds.y(3, 0) = 0.0;
  CnlsSpec s;
  s.error_composition = ErrorComposition::multiplicative;
  try {
    (void)fit_cnls(ds, s);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
  }
}

}  // TEST_SUITE
