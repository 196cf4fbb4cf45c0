#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "gw/io.hpp"
#include "gw/rng.hpp"
#include "gw/types.hpp"

using namespace gw;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vector vec(std::initializer_list<double> values) {
  Vector v(values.size());
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("validate_inputs accepts matching and rejects mismatched dims") {
  const DistanceMatrix d3(Matrix::Zero(3, 3));
  const DistanceMatrix d4(Matrix::Zero(4, 4));
  const auto mu3 = ProbabilityVector::uniform(3);
  const auto mu4 = ProbabilityVector::uniform(4);

  CHECK_NOTHROW(validate_inputs(d3, d4, mu3, mu4));
  CHECK_THROWS_AS(validate_inputs(d3, d4, mu4, mu3), DimensionMismatchError);

  const DistanceMatrix d1(Matrix::Zero(1, 1));
  const auto mu1 = ProbabilityVector::uniform(1);
  CHECK_NOTHROW(validate_inputs(d1, d1, mu1, mu1));

  // The message names the offending pair.
  try {
    validate_inputs(d3, d4, mu4, mu3);
    FAIL("expected a throw");
  } catch (const DimensionMismatchError& e) {
    CHECK(std::string(e.what()).find("D_X") != std::string::npos);
  }
}

TEST_CASE("product_coupling matches the outer product") {
  const auto one = ProbabilityVector(vec({1.0}));
  CHECK(product_coupling(one, one).entries()(0, 0) == doctest::Approx(1.0));

  const auto u2 = ProbabilityVector::uniform(2);
  const Matrix q = product_coupling(u2, u2).entries();
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) CHECK(q(i, j) == doctest::Approx(0.25));
  }

  const auto mu = ProbabilityVector(vec({0.3, 0.7}));
  const auto nu = ProbabilityVector(vec({0.5, 0.5}));
  const Matrix p = product_coupling(mu, nu).entries();
  CHECK(p(0, 0) == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(p(0, 1) == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(p(1, 0) == doctest::Approx(0.35).epsilon(1e-14));
  CHECK(p(1, 1) == doctest::Approx(0.35).epsilon(1e-14));
}

TEST_CASE("product_coupling satisfies both marginals to 1e-15 per line") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 6, m = 2 + (trial / 2) % 6;
    Vector a(n), b(m);
    for (Eigen::Index i = 0; i < n; ++i) a(i) = 0.2 + rng.uniform01();
    for (Eigen::Index j = 0; j < m; ++j) b(j) = 0.2 + rng.uniform01();
    a /= a.sum();
    b /= b.sum();
    const ProbabilityVector mu(a), nu(b);
    const Matrix p = product_coupling(mu, nu).entries();
    CHECK((p.rowwise().sum() - a).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((p.colwise().sum().transpose() - b).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("DistanceMatrix symmetrizes and validates") {
  const Matrix sym = from_rows({{0, 1}, {1, 0}});
  CHECK((DistanceMatrix(sym).entries() - sym).cwiseAbs().maxCoeff() == 0.0);

  const Matrix skew = from_rows({{0, 2}, {4, 0}});
  const Matrix fixed = DistanceMatrix(skew).entries();
  CHECK(fixed(0, 1) == doctest::Approx(3.0));
  CHECK(fixed(1, 0) == doctest::Approx(3.0));

  CHECK_THROWS_AS(DistanceMatrix(Matrix::Zero(2, 3)), DimensionMismatchError);
  CHECK_THROWS(DistanceMatrix(from_rows({{0, -1}, {-1, 0}})));
  Matrix bad = sym;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(DistanceMatrix(bad));
}

TEST_CASE("ProbabilityVector enforces positivity and unit mass") {
  CHECK_NOTHROW(ProbabilityVector(vec({0.5, 0.5})));
  CHECK_THROWS(ProbabilityVector(vec({1.0, 0.0})));
  CHECK_THROWS(ProbabilityVector(vec({0.6, 0.6})));
  CHECK_THROWS(ProbabilityVector(vec({-0.5, 1.5})));
  CHECK(ProbabilityVector::uniform(4).weights()(3) == doctest::Approx(0.25));
}

TEST_CASE("Coupling enforces nonnegativity and unit mass") {
  CHECK_NOTHROW(Coupling(from_rows({{0.5, 0.0}, {0.0, 0.5}})));
  CHECK_THROWS(Coupling(from_rows({{0.6, 0.0}, {0.0, 0.5}})));
  CHECK_THROWS(Coupling(from_rows({{1.5, -0.5}, {0.0, 0.0}})));
}

TEST_CASE("SplitIterate checks membership of each half") {
  const auto mu = ProbabilityVector::uniform(2);
  const auto nu = ProbabilityVector::uniform(2);
  const Coupling feasible(from_rows({{0.25, 0.25}, {0.25, 0.25}}));
  CHECK_NOTHROW(SplitIterate(feasible, feasible, mu, nu));

  // Row-feasible pi but column-infeasible w must be rejected as w.
  const Coupling row_only(from_rows({{0.5, 0.0}, {0.5, 0.0}}));
  CHECK_THROWS(SplitIterate(feasible, row_only, mu, nu));
  // And the same matrix is not row-feasible either.
  CHECK_THROWS(SplitIterate(row_only, feasible, mu, nu));
}

TEST_CASE("Graph canonicalizes edges") {
  const Graph g(4, {{3, 1}, {1, 3}, {0, 2}});
  CHECK(g.edges().size() == 2);
  CHECK(g.edges()[0] == std::pair<int, int>{0, 2});
  CHECK(g.edges()[1] == std::pair<int, int>{1, 3});

  CHECK_THROWS(Graph(3, {{1, 1}}));
  CHECK_THROWS(Graph(3, {{0, 3}}));
  CHECK_THROWS(Graph(0, {}));
}

TEST_CASE("SolverConfig carries the protocol defaults") {
  const SolverConfig config;
  CHECK(config.rel_tol == 1e-6);
  CHECK(config.max_iters == 2000);
  CHECK(config.rho == 0.1);
  CHECK(config.step == 5.0);
  CHECK(config.epsilon_reg == 0.1);
  CHECK(config.perturbation == 0.0);
  CHECK(config.inner_tol == 1e-9);
  CHECK(config.inner_iters == 1000);

  SolverConfig bad = config;
  bad.rho = 0.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("edge list parsing: comments, header, inference") {
  std::istringstream with_header("# comment\nn 5\n0 1\n2 3\n");
  const Graph g1 = read_edge_list(with_header, "t1");
  CHECK(g1.num_nodes() == 5);
  CHECK(g1.edges().size() == 2);

  std::istringstream inferred("0 1\n4 2\n");
  const Graph g2 = read_edge_list(inferred, "t2");
  CHECK(g2.num_nodes() == 5);

  std::istringstream bad("0 1\nbogus 2\n");
  try {
    read_edge_list(bad, "t3");
    FAIL("expected a throw");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  std::istringstream self_loop("1 1\n");
  CHECK_THROWS_AS(read_edge_list(self_loop, "t4"), ParseError);

  std::istringstream too_big("n 2\n0 5\n");
  CHECK_THROWS_AS(read_edge_list(too_big, "t5"), ParseError);
}

TEST_CASE("edge list round-trips through its writer") {
  const Graph g(6, {{0, 5}, {2, 1}, {3, 4}});
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream in(out.str());
  const Graph back = read_edge_list(in, "rt");
  CHECK(back.num_nodes() == g.num_nodes());
  CHECK(back.edges() == g.edges());
}

TEST_CASE("coupling csv round-trips and reports parse errors with lines") {
  Matrix pi = from_rows({{0.25, 0.25}, {0.3, 0.2}});
  std::ostringstream out;
  write_coupling_csv(out, pi);
  std::istringstream in(out.str());
  const Matrix back = read_coupling_csv(in, "rt");
  CHECK((back - pi).cwiseAbs().maxCoeff() == 0.0);

  std::istringstream bad("2,2\n0.1,0.2\n0.3\n");
  try {
    read_coupling_csv(bad, "c1");
    FAIL("expected a throw");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("dense csv rejects ragged rows") {
  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_dense_csv(ragged, "d1"), ParseError);
  std::istringstream ok("1,2\n3,4\n");
  CHECK(read_dense_csv(ok, "d2")(1, 0) == doctest::Approx(3.0));
}
