#include <random>

#include "doctest.h"
#include "fdla/centralized.hpp"
#include "oracles.hpp"

using namespace fdla;

TEST_CASE("complete graph optimum is J") {
  CentralSolution s = solve_p2(Graph::complete(5));
  CHECK(s.converged);
  CHECK(s.factor <= 1e-8);
  CHECK((s.w_star.values() - averaging_matrix(5)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(verify_lemma1(s));
}

TEST_CASE("single node") {
  CentralSolution s = solve_p2(Graph::complete(1));
  CHECK(s.factor == 0.0);
  CHECK(s.w_star.values()(0, 0) == 1.0);
}

TEST_CASE("3-path optimum matches the brute-force parametrisation") {
  CentralSolution s = solve_p2(Graph::path(3), 1e-10);
  const double ref = oracle::path3_optimum();
  CHECK(std::abs(s.factor - ref) <= 1e-7);
  CHECK(verify_lemma1(s));
  ConsensusReport r = check_consensus_condition(s.w_star.values(), 1e-9);
  CHECK(r.rho_value <= s.factor + 1e-9);
  CHECK(s.factor < 1.0);
}

TEST_CASE("optimum is feasible, satisfies the consensus conditions and bounds Metropolis") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Graph g = er_random(10, 0.5, seed);
    if (!g.is_connected()) continue;
    CentralSolution s = solve_p2(g);
    const Matrix& w = s.w_star.values();
    const Vector one = Vector::Ones(10);
    CHECK((w * one - one).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((w.transpose() * one - one).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(verify_lemma1(s));
    CHECK(s.factor < 1.0);
    CHECK(s.factor == doctest::Approx(oracle::sigma_max(w - oracle::avg(10))).epsilon(1e-12));
    CHECK(s.factor <= convergence_factor(metropolis(g).values()) + 2e-8);
  }
}

TEST_CASE("optimum lower-bounds other feasible matrices") {
  Graph g = er_random(7, 0.5, 3);
  REQUIRE(g.is_connected());
  CentralSolution s = solve_p2(g);
  std::mt19937_64 gen(31);
  for (int k = 0; k < 30; ++k) {
    // Random feasible points near W*.
    Matrix w = project_feasible(s.w_star.values() + 0.05 * oracle::random_matrix(7, 7, gen), g);
    CHECK(convergence_factor(w) >= s.factor - 2e-8);
  }
}

TEST_CASE("factor is invariant under relabeling") {
  Graph g = er_random(7, 0.5, 11);
  REQUIRE(g.is_connected());
  Graph h = g.relabeled({6, 2, 0, 5, 1, 4, 3});
  CHECK(solve_p2(g).factor == doctest::Approx(solve_p2(h).factor).epsilon(1e-7));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(solve_p2(Graph::from_edge_list(3, {{0, 1}})), std::invalid_argument);
  CHECK_THROWS_AS(solve_p2(Graph::path(3), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_p2(er_random(8, 0.5, 1), 1e-14, 3), std::runtime_error);
}
