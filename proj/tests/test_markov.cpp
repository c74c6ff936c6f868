#include "dcf/error.hpp"
#include "dcf/markov.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace dcf;

namespace {

struct ExplicitChain
{
  double tau = 0.0;
  double b_idle = 0.0;
  std::vector<std::vector<double>> b;
};

// Builds the full backoff chain with an idle state and solves pi P = pi.
ExplicitChain
stationary(const BackoffParams &bo, double q, double p_i0, double p)
{
  const int m = bo.max_stage;
  std::vector<int> offset(m + 1);
  int n = 1;   // state 0 is idle
  for (int i = 0; i <= m; ++i)
    {
      offset[i] = n;
      n += bo.window(i);
    }
  std::vector<Eigen::Triplet<double>> t;
  // transposed generator (P^T - I) so that A pi = 0
  auto add = [&t](int from, int to, double prob) {
    if (prob != 0.0)
      t.emplace_back(to, from, prob);
  };
  auto spread = [&](int from, int stage, double prob) {
    const int w = bo.window(stage);
    for (int k = 0; k < w; ++k)
      add(from, offset[stage] + k, prob / w);
  };
  add(0, 0, 1.0 - p_i0);
  spread(0, 0, p_i0);
  for (int i = 0; i <= m; ++i)
    {
      for (int k = 1; k < bo.window(i); ++k)
        add(offset[i] + k, offset[i] + k - 1, 1.0);
      const int head = offset[i];
      spread(head, std::min(i + 1, m), p);
      spread(head, 0, (1.0 - p) * q);
      add(head, 0, (1.0 - p) * (1.0 - q));
    }
  for (int s = 0; s < n; ++s)
    t.emplace_back(s, s, -1.0);

  // replace the last balance equation by normalization
  std::vector<Eigen::Triplet<double>> kept;
  for (const auto &e : t)
    if (e.row() != n - 1)
      kept.push_back(e);
  for (int s = 0; s < n; ++s)
    kept.emplace_back(n - 1, s, 1.0);
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(kept.begin(), kept.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  REQUIRE(lu.info() == Eigen::Success);
  const Eigen::VectorXd pi = lu.solve(rhs);

  ExplicitChain out;
  out.b_idle = pi(0);
  out.b.resize(m + 1);
  for (int i = 0; i <= m; ++i)
    {
      for (int k = 0; k < bo.window(i); ++k)
        out.b[i].push_back(pi(offset[i] + k));
      out.tau += pi(offset[i]);
    }
  return out;
}

} // namespace

TEST_CASE("equivalent failure probability")
{
  CHECK(markov::equivalent_failure_prob(0.2, 0.0) == doctest::Approx(0.2));
  CHECK(markov::equivalent_failure_prob(0.0, 0.08) == doctest::Approx(0.08));
  CHECK(markov::equivalent_failure_prob(0.2, 0.1) == doctest::Approx(1.0 - 0.8 * 0.9));
  CHECK(markov::equivalent_failure_prob(1.0, 0.3) == 1.0);
  CHECK_THROWS_AS(markov::equivalent_failure_prob(1.2, 0.0), DomainError);
}

TEST_CASE("alpha")
{
  BackoffParams bo{32, 5};
  CHECK(markov::alpha(bo, 0.25) == doctest::Approx(32.0 + 1.0 / 3.0).epsilon(1e-14));
  CHECK(markov::alpha(bo, 0.0) == doctest::Approx(16.5));
  // continuous through 2 P = 1
  CHECK(markov::alpha(bo, 0.5) == doctest::Approx(113.0).epsilon(1e-14));
  CHECK(markov::alpha(bo, 0.5 + 1e-7) == doctest::Approx(113.0000706).epsilon(1e-9));
  CHECK(markov::alpha(bo, 0.5 - 1e-7) == doctest::Approx(112.9999294).epsilon(1e-9));
  CHECK_THROWS_AS(markov::alpha(bo, 1.0), DomainError);

  BackoffParams bad{32, 21};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK(bo.cw_max() == 1024);
}

TEST_CASE("tau forms agree")
{
  BackoffParams bo{32, 5};
  CHECK(markov::tau_small_queue(0.3, bo, 0.2)
        == doctest::Approx(0.042291547780426795022).epsilon(1e-13));
  const auto st = markov::solve_chain(0.3, 0.3, bo, 0.2);
  CHECK(st.tau == doctest::Approx(0.042291547780426795022).epsilon(1e-13));
  CHECK(markov::tau_general(st.b_idle, st.alpha, 0.2) == doctest::Approx(st.tau).epsilon(1e-14));
  CHECK(markov::tau_general(1.0, 2.0, 0.1) == 0.0);
  CHECK(markov::tau_general(0.0, 32.0, 0.5) == doctest::Approx(0.0625));

  // saturated: the classical closed form
  for (double p : {0.0, 0.1, 0.3, 0.45, 0.7, 0.95})
    {
      const double w = 32.0;
      const double num = 2.0 * (1.0 - 2.0 * p);
      const double den = (1.0 - 2.0 * p) * (w + 1.0) + p * w * (1.0 - std::pow(2.0 * p, 5));
      CHECK(markov::tau_small_queue(1.0, bo, p) == doctest::Approx(num / den).epsilon(1e-13));
    }
  CHECK(markov::tau_small_queue(1.0, bo, 0.0) == doctest::Approx(2.0 / 33.0));
  CHECK(markov::tau_small_queue(1.0, bo, 1.0) == doctest::Approx(2.0 / 1025.0));
  CHECK(markov::tau_small_queue(0.0, bo, 0.3) == 0.0);
}

TEST_CASE("queue occupancy")
{
  CHECK(markov::queue_nonempty_prob(0.0, 1e-3) == 0.0);
  CHECK(markov::queue_nonempty_prob(100.0, 1e-3) == doctest::Approx(1.0 - std::exp(-0.1)));
  CHECK(markov::queue_nonempty_prob(1e-9, 1e-4) == doctest::Approx(1e-13).epsilon(1e-9));
  CHECK(markov::queue_nonempty_prob(INFINITY, 1e-3) == 1.0);
  CHECK_THROWS_AS(markov::queue_nonempty_prob(-1.0, 1e-3), DomainError);
  CHECK_THROWS_AS(markov::queue_nonempty_prob(1.0, 0.0), DomainError);
}

TEST_CASE("closed form matches the explicit chain")
{
  const struct
  {
    int w0, m;
    double q, p_i0, p;
  } cases[] = {{8, 1, 0.4, 0.4, 0.2},  {16, 3, 0.9, 0.9, 0.5}, {32, 5, 0.3, 0.3, 0.2},
               {32, 5, 1.0, 0.5, 0.1}, {4, 6, 0.05, 0.2, 0.7}, {32, 5, 0.6, 0.6, 0.499999},
               {16, 0, 0.7, 0.7, 0.3}, {8, 0, 1.0, 1.0, 0.6}};
  for (const auto &c : cases)
    {
      BackoffParams bo{c.w0, c.m};
      const auto oracle = stationary(bo, c.q, c.p_i0, c.p);
      const auto st = markov::solve_chain(c.q, c.p_i0, bo, c.p);
      CHECK(st.tau == doctest::Approx(oracle.tau).epsilon(1e-10));
      CHECK(st.b_idle == doctest::Approx(oracle.b_idle).epsilon(1e-10).scale(1e-12));

      const auto dist = markov::reconstruct_distribution(st, bo);
      REQUIRE(dist.b.size() == oracle.b.size());
      for (std::size_t i = 0; i < dist.b.size(); ++i)
        {
          REQUIRE(dist.b[i].size() == oracle.b[i].size());
          for (std::size_t k = 0; k < dist.b[i].size(); ++k)
            CHECK(std::abs(dist.b[i][k] - oracle.b[i][k]) < 1e-12);
        }
    }
}

TEST_CASE("reconstructed distribution is normalized")
{
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> w(1, 128);
  std::uniform_int_distribution<int> stages(0, 7);
  for (int n = 0; n < 500; ++n)
    {
      BackoffParams bo{w(rng), stages(rng)};
      const double q = u(rng);
      const double p = n % 5 == 0 ? 0.5 + (u(rng) - 0.5) * 1e-6 : 0.98 * u(rng);
      const auto st = markov::solve_chain(q, q, bo, p);
      CHECK(std::abs(markov::reconstruct_distribution(st, bo).total() - 1.0) < 1e-12);
    }

  BackoffParams bo;
  const auto absorbed = markov::solve_chain(0.0, 0.0, bo, 0.3);
  CHECK(absorbed.b_idle == 1.0);
  CHECK(absorbed.tau == 0.0);
  const auto saturated = markov::solve_chain(1.0, 0.2, bo, 0.3);
  CHECK(saturated.b_idle == 0.0);
  CHECK(markov::reconstruct_distribution(saturated, bo).total() == doctest::Approx(1.0));
}
