#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "isac_edge/error.hpp"
#include "isac_edge/sdp.hpp"

using namespace isac_edge;
using namespace isac_edge::sdp;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

namespace {

MatrixXcd diag2(double a, double b) {
  MatrixXcd m = MatrixXcd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

SdpProblem trace_bounded(const MatrixXcd& c, double budget) {
  SdpProblem p;
  const auto f = p.add_block("F", c.rows());
  p.set_objective(Sense::Maximize, LinearFunctional{}.add_block(f, c));
  p.add_constraint({LinearFunctional{}.add_block(f, MatrixXcd::Identity(c.rows(), c.rows())),
                    Relation::LessEqual, budget, "trace"});
  return p;
}

double min_eig(const MatrixXcd& m) {
  return Eigen::SelfAdjointEigenSolver<MatrixXcd>(m).eigenvalues()[0];
}

}  // namespace

TEST_CASE("dominant eigenvector problem") {
  const SdpSolution s = solve(trace_bounded(diag2(2, 1), 1.0));
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective_value == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(s.relative_gap <= 1e-8);
  const MatrixXcd& f = s.block_values[0];
  CHECK(std::abs(f(0, 0) - 1.0) < 1e-6);
  CHECK(std::abs(f(1, 1)) < 1e-6);
  CHECK(std::abs(f(0, 1)) < 1e-6);
}

TEST_CASE("zero trace budget forces the zero matrix") {
  const SdpSolution s = solve(trace_bounded(MatrixXcd::Identity(2, 2), 0.0));
  REQUIRE(s.status == Status::Optimal);
  CHECK(std::abs(s.objective_value) < 1e-8);
  CHECK(s.block_values[0].norm() < 1e-6);
}

TEST_CASE("complex coefficients") {
  // max Re Tr{C F} with C = [[0, -i],[i, 0]] (eigenvalues +-1) under Tr F <= 1.
  MatrixXcd c(2, 2);
  c << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
  const SdpSolution s = solve(trace_bounded(c, 1.0));
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-8));
  const MatrixXcd& f = s.block_values[0];
  CHECK(std::abs((c * f).trace().real() - 1.0) < 1e-7);
}

TEST_CASE("equality, scalar and minimisation forms") {
  // min s  s.t.  Tr{X} + s = 1, Tr{X diag(1,3)} >= 2  => X = diag(0.5, 0.5), s = 0.
  SdpProblem p;
  const auto x = p.add_block("X", 2);
  const auto s = p.add_scalar("s");
  p.set_objective(Sense::Minimize, LinearFunctional{}.add_scalar(s, 1.0));
  p.add_constraint({LinearFunctional{}.add_block(x, MatrixXcd::Identity(2, 2)).add_scalar(s, 1.0),
                    Relation::Equal, 1.0, "mass"});
  p.add_constraint({LinearFunctional{}.add_block(x, diag2(1, 3)), Relation::GreaterEqual, 2.0,
                    "moment"});
  const SdpSolution sol = solve(p);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(std::abs(sol.objective_value) < 1e-7);
  CHECK(sol.scalar_values.at(0) < 1e-7);
  CHECK(sol.block_values[0].trace().real() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("infeasible and unbounded problems are reported, not thrown") {
  SdpProblem inf;
  const auto x = inf.add_block("X", 2);
  inf.set_objective(Sense::Maximize, LinearFunctional{}.add_block(x, MatrixXcd::Identity(2, 2)));
  inf.add_constraint({LinearFunctional{}.add_block(x, MatrixXcd::Identity(2, 2)),
                      Relation::Equal, -1.0, "negative trace"});
  CHECK(solve(inf).status == Status::Infeasible);

  SdpProblem unb;
  const auto y = unb.add_block("Y", 2);
  unb.set_objective(Sense::Maximize, LinearFunctional{}.add_block(y, MatrixXcd::Identity(2, 2)));
  unb.add_constraint({LinearFunctional{}.add_block(y, diag2(1, 0)), Relation::LessEqual, 1.0,
                      "only one direction bounded"});
  CHECK(solve(unb).status == Status::Unbounded);
}

TEST_CASE("iteration limit yields a status") {
  Tolerances tol;
  tol.max_iterations = 2;
  const SdpSolution s = solve(trace_bounded(diag2(2, 1), 1.0), tol);
  CHECK(s.status == Status::NumericalFailure);
}

TEST_CASE("observer sees every iterate") {
  int calls = 0;
  double last_gap = 1e300;
  const SdpSolution s = solve(trace_bounded(diag2(3, 1), 2.0), {},
                              [&](const IterateRecord& r) {
                                ++calls;
                                last_gap = r.relative_gap;
                              });
  CHECK(calls >= s.iterations);
  CHECK(calls > 0);
  CHECK(last_gap <= 1e-8);
}

TEST_CASE("weak duality, PSD blocks and scaling equivariance") {
  MatrixXcd c(3, 3);
  c << 2, std::complex<double>(0.5, 0.3), 0, std::complex<double>(0.5, -0.3), 1,
      std::complex<double>(0, 0.7), 0, std::complex<double>(0, -0.7), -1;
  const SdpSolution base = solve(trace_bounded(c, 1.5));
  REQUIRE(base.status == Status::Optimal);
  CHECK(base.objective_value <= base.dual_value + 1e-8 * (1 + std::abs(base.dual_value)));
  const double top = Eigen::SelfAdjointEigenSolver<MatrixXcd>(base.block_values[0]).eigenvalues()[2];
  CHECK(min_eig(base.block_values[0]) >= -1e-7 * top);
  // Value is 1.5 * lambda_max(C).
  const double lmax = Eigen::SelfAdjointEigenSolver<MatrixXcd>(c).eigenvalues()[2];
  CHECK(base.objective_value == doctest::Approx(1.5 * lmax).epsilon(1e-7));

  const SdpSolution scaled = solve(trace_bounded(7.0 * c, 1.5));
  REQUIRE(scaled.status == Status::Optimal);
  CHECK(scaled.objective_value == doctest::Approx(7.0 * base.objective_value).epsilon(1e-7));
  CHECK((scaled.block_values[0] - base.block_values[0]).norm() < 1e-5);
}

TEST_CASE("malformed problems throw") {
  SdpProblem p;
  const auto x = p.add_block("X", 2);
  p.set_objective(Sense::Maximize, LinearFunctional{}.add_block(x, MatrixXcd::Identity(2, 2)));
  CHECK_THROWS_AS(solve(p), Error);  // no constraints

  MatrixXcd skew(2, 2);
  skew << 0, 1, 0, 0;
  p.add_constraint({LinearFunctional{}.add_block(x, skew), Relation::LessEqual, 1.0, "bad"});
  CHECK_THROWS_AS(solve(p), Error);

  SdpProblem q;
  const auto z = q.add_block("Z", 2);
  q.set_objective(Sense::Maximize, LinearFunctional{}.add_block(z, MatrixXcd::Identity(3, 3)));
  q.add_constraint({LinearFunctional{}.add_block(z, MatrixXcd::Identity(2, 2)),
                    Relation::LessEqual, 1.0, "trace"});
  CHECK_THROWS_AS(solve(q), Error);

  SdpProblem r;
  r.add_block("R", 2);
  r.set_objective(Sense::Maximize, LinearFunctional{}.add_block(5, MatrixXcd::Identity(2, 2)));
  r.add_constraint({LinearFunctional{}.add_scalar(0, 1.0), Relation::LessEqual, 1.0, "none"});
  CHECK_THROWS_AS(solve(r), Error);
}

TEST_CASE("real embedding") {
  MatrixXcd one(1, 1);
  one << 1;
  CHECK(hermitian_to_real_embedding(one).isApprox(MatrixXd::Identity(2, 2)));

  MatrixXcd y(2, 2);
  y << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
  MatrixXd expect(4, 4);
  expect << 0, 0, 0, 1,
            0, 0, -1, 0,
            0, -1, 0, 0,
            1, 0, 0, 0;
  CHECK(hermitian_to_real_embedding(y).isApprox(expect));
  CHECK(hermitian_to_real_embedding(MatrixXcd::Identity(3, 3)).isApprox(MatrixXd::Identity(6, 6)));

  MatrixXcd h(3, 3);
  h << 2, std::complex<double>(1, 1), 0, std::complex<double>(1, -1), 3,
      std::complex<double>(0, -2), 0, std::complex<double>(0, 2), 1;
  const auto ev = Eigen::SelfAdjointEigenSolver<MatrixXcd>(h).eigenvalues();
  const auto ev2 = Eigen::SelfAdjointEigenSolver<MatrixXd>(hermitian_to_real_embedding(h)).eigenvalues();
  for (int k = 0; k < 3; ++k) {
    CHECK(ev2[2 * k] == doctest::Approx(ev[k]).epsilon(1e-12));
    CHECK(ev2[2 * k + 1] == doctest::Approx(ev[k]).epsilon(1e-12));
  }
  CHECK(hermitian_to_real_embedding(h).trace() == doctest::Approx(2.0 * h.trace().real()));
  CHECK(real_embedding_to_hermitian(hermitian_to_real_embedding(h)).isApprox(h));

  MatrixXcd skew(2, 2);
  skew << 0, 1, 0, 0;
  CHECK_THROWS_AS(hermitian_to_real_embedding(skew), Error);
}
