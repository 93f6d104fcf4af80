#include <doctest.h>

#include "frontier/ddf.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace frontier;

namespace {

DdfSpec directions(std::initializer_list<double> gx, std::initializer_list<double> gy) {
  DdfSpec s;
  s.gx = Eigen::Map<const VectorXd>(gx.begin(), static_cast<Index>(gx.size()));
  s.gy = Eigen::Map<const VectorXd>(gy.begin(), static_cast<Index>(gy.size()));
  return s;
}

VectorXd normalization(const FrontierEstimate& e, const DdfSpec& s) {
  VectorXd v = e.beta * s.gx + (*e.gamma) * s.gy;
  if (e.delta) v += (*e.delta) * s.gb;
  return v;
}

Dataset two_outputs(Index n, std::uint64_t seed) {
  Dataset ds = support::noisy_sample(n, 2, seed, 0.2);
  MatrixXd y(n, 2);
  y.col(0) = ds.y.col(0);
  y.col(1) = 0.5 * ds.y.col(0) + 0.1 * ds.x.col(0);
  ds.y = y;
  ds.y_names = {"y1", "y2"};
  return ds;
}

}  // namespace

TEST_SUITE("models_ddf") {

TEST_CASE("normalization with an input-only direction") {
  const Dataset ds = support::noisy_sample(10, 2, 3);
  const DdfSpec s = directions({1.0, 0.0}, {0.0});
  const auto e = fit_cnls_ddf(ds, s);
  REQUIRE(e.diagnostics.status == SolveStatus::optimal);
  REQUIRE(e.gamma.has_value());
  CHECK((e.beta.col(0).array() - 1.0).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("single observation") {
  const Dataset ds = support::noisy_sample(1, 1, 3);
  const auto e = fit_cnls_ddf(ds, directions({1.0}, {1.0}));
  CHECK(e.objective_value <= 1e-12);
}

TEST_CASE("grid oracle, one input and one output") {
  for (std::uint64_t seed : {7u, 8u}) {
    const Dataset ds = support::noisy_sample(3, 1, seed, 0.8);
    const auto e = fit_cnls_ddf(ds, directions({1.0}, {1.0}));
    REQUIRE(e.diagnostics.status == SolveStatus::optimal);
    const double ref = oracle::ddf_grid_1x1(ds.x.col(0), ds.response());
    CHECK(std::abs(e.objective_value - ref) <= 1e-5 * std::max(1.0, ref));
  }
}

TEST_CASE("multiple and undesirable outputs") {
  Dataset ds = two_outputs(12, 19);
  ds.b = MatrixXd(12, 1);
  ds.b->col(0) = 0.3 * ds.x.col(1);
  ds.b_names = {"b1"};
  DdfSpec s = directions({0.0, 0.0}, {1.0, 1.0});
  s.gb = VectorXd::Constant(1, 1.0);
  for (Family f : {Family::cnls, Family::cqr, Family::cer}) {
    s.flavor = f;
    s.tau = 0.4;
    const auto e = f == Family::cnls ? fit_cnls_ddf(ds, s) : fit_cqer_ddf(ds, s);
    REQUIRE(e.diagnostics.status == SolveStatus::optimal);
    REQUIRE(e.delta.has_value());
    CHECK((normalization(e, s).array() - 1.0).abs().maxCoeff() <= 1e-9);
    CHECK(e.beta.minCoeff() >= -1e-9);
    CHECK(e.gamma->minCoeff() >= -1e-9);
    CHECK(e.delta->minCoeff() >= -1e-9);
  }
}

TEST_CASE("symmetric expectile matches least squares up to the residual sign") {
  const Dataset ds = support::noisy_sample(15, 2, 23);
  DdfSpec s = directions({0.0, 0.0}, {1.0});
  const auto ls = fit_cnls_ddf(ds, s);
  s.flavor = Family::cer;
  s.tau = 0.5;
  const auto cer = fit_cqer_ddf(ds, s);
  CHECK(support::max_abs_diff(cer.composite_residuals(), -*ls.residuals) <= 1e-6);
}

TEST_CASE("representable data give a zero objective") {
  const Dataset ds = support::concave_sample(8, 2, 2);
  DdfSpec s = directions({0.0, 0.0}, {1.0});
  CHECK(fit_cnls_ddf(ds, s).objective_value <= 1e-8);
  s.flavor = Family::cqr;
  s.tau = 0.3;
  CHECK(fit_cqer_ddf(ds, s).objective_value <= 1e-8);
}

TEST_CASE("quantile DDF against vertex enumeration") {
  const Dataset ds = support::noisy_sample(5, 1, 29);
  DdfSpec s = directions({0.0}, {1.0});
  s.flavor = Family::cqr;
  s.tau = 0.9;
  const auto e = fit_cqer_ddf(ds, s);
  const double ref = oracle::cqr_vertex_1d(ds.x.col(0), ds.response(), 0.9);
  CHECK(std::abs(e.objective_value - ref) <= 1e-8 * std::max(1.0, ref));
}

TEST_CASE("translation along the direction") {
  const Dataset ds = two_outputs(5, 41);
  const DdfSpec s = directions({0.5, 0.5}, {1.0, 0.0});
  const auto base = fit_cnls_ddf(ds, s);
  const double t = 0.3;
  Dataset moved = ds;
  moved.x.rowwise() -= t * s.gx.transpose();
  moved.y.rowwise() += t * s.gy.transpose();

  // every estimated plane drops by exactly t at the translated points
  const MatrixXd before = evaluate_planes(ds, base);
  const MatrixXd after = evaluate_planes(moved, base);
  CHECK(((before.array() - t) - after.array()).abs().maxCoeff() <= 1e-9);

  // refitting: the intercepts absorb the shift, residuals stay put
  const auto refit = fit_cnls_ddf(moved, s);
  CHECK(support::max_abs_diff(*refit.residuals, *base.residuals) <= 1e-6);
}

TEST_CASE("direction validation") {
  const Dataset ds = support::noisy_sample(4, 2, 1);
  CHECK_THROWS_AS((void)fit_cnls_ddf(ds, directions({1.0}, {1.0})), Error);
  CHECK_THROWS_AS((void)fit_cnls_ddf(ds, directions({0.0, 0.0}, {0.0})), Error);
  DdfSpec s = directions({1.0, 0.0}, {0.0});
  s.gb = VectorXd::Ones(1);
  CHECK_THROWS_AS((void)fit_cnls_ddf(ds, s), Error);
}

}  // TEST_SUITE
