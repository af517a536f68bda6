#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sparsact/control.hpp"
#include "sparsact/errors.hpp"
#include "sparsact/gramian.hpp"
#include "sparsact/linalg.hpp"
#include "sparsact/scheduler.hpp"
#include "test_support.hpp"

using namespace sparsact;

namespace {

MatrixXd matrix_power(const MatrixXd& a, int e) {
  MatrixXd p = MatrixXd::Identity(a.rows(), a.cols());
  for (int i = 0; i < e; ++i) p = a * p;
  return p;
}

// Mix of full-rank and rank-deficient dynamics with full-row-rank B.
LinearSystem random_test_system(int n, int m, int rank_a, uint64_t seed) {
  MatrixXd a = test::random_matrix_of_rank(n, rank_a, seed) / double(n);
  auto engine = make_engine(seed + 1);
  MatrixXd b = gaussian_matrix(n, m, engine);
  return LinearSystem(std::move(a), std::move(b));
}

}  // namespace

TEST_CASE("li_extension takes the first spanning candidates") {
  IncrementalBasis basis(2);
  REQUIRE(basis.try_extend(Eigen::Vector2d(1, 0)));

  MatrixXd candidates(2, 3);
  candidates << 1, 2, 0,
                0, 0, 1;
  auto picked = li_extension(basis, candidates, 2);
  CHECK(picked == std::vector<int>{2});
  CHECK(basis.size() == 2);

  IncrementalBasis fresh(2);
  auto none = li_extension(fresh, candidates, 0);
  CHECK(none.empty());
  CHECK(fresh.size() == 0);
}

TEST_CASE("controllable_schedule on the identity splits actuators in order") {
  LinearSystem sys(MatrixXd::Identity(4, 4), MatrixXd::Identity(4, 4));
  ActuatorSchedule sched = controllable_schedule(sys, 2, 2);
  REQUIRE(sched.horizon() == 2);
  CHECK(sched.set_at(0) == std::vector<int>{0, 1});
  CHECK(sched.set_at(1) == std::vector<int>{2, 3});
  CHECK(sched.total_selected() == 4);
}

TEST_CASE("controllable_schedule with s = n fills a single step") {
  LinearSystem sys = test::random_controllable_system(5, 5, 3001);
  ActuatorSchedule sched = controllable_schedule(sys, 5, 1);
  REQUIRE(sched.horizon() == 1);
  CHECK(sched.set_at(0) == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("controllable_schedule reaches rank n with exact step accounting") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    auto engine = make_engine(3100 + seed);
    int n = 2 + uniform_below(9, engine);
    int m = n + uniform_below(5, engine);
    int rank_a = uniform_below(n + 1, engine);
    LinearSystem sys = random_test_system(n, m, rank_a, 3200 + seed);

    int actual_rank_a = numerical_rank(sys.A());
    int s_min = std::max(1, n - actual_rank_a);
    int s = s_min + uniform_below(n - s_min + 1, engine);
    int K = (n + s - 1) / s + uniform_below(3, engine);

    ActuatorSchedule sched = controllable_schedule(sys, s, K);
    REQUIRE(sched.horizon() == K);
    CHECK(sched.total_selected() == n);
    CHECK(numerical_rank(controllability_matrix(sys, sched)) == n);

    // Replay the accumulation: step K-1-i can contribute exactly the rank
    // increase available from the columns of A^i B, capped at s and at the
    // remaining deficit.
    MatrixXd accepted(n, 0);
    for (int i = K - 1; i >= 0; --i) {
      MatrixXd candidates = matrix_power(sys.A(), i) * sys.B();
      MatrixXd joint(n, accepted.cols() + candidates.cols());
      joint << accepted, candidates;
      int gain = numerical_rank(joint) - numerical_rank(accepted);
      int expected = std::min({s, gain, n - int(accepted.cols())});
      const auto& set = sched.set_at(K - 1 - i);
      CHECK(int(set.size()) == expected);
      for (int j : set) {
        accepted.conservativeResize(Eigen::NoChange, accepted.cols() + 1);
        accepted.col(accepted.cols() - 1) = candidates.col(j);
      }
    }
    CHECK(numerical_rank(accepted) == n);
  }
}

TEST_CASE("controllable_schedule names the violated precondition") {
  LinearSystem wide(MatrixXd::Zero(3, 3), MatrixXd::Identity(3, 3));

  // Budget below n - rank(A) = 3.
  CHECK_THROWS_AS(controllable_schedule(wide, 2, 3), PreconditionError);
  CHECK_THROWS_WITH_AS(controllable_schedule(wide, 2, 3),
                       doctest::Contains("max(1, n - rank(A))"),
                       PreconditionError);

  // Horizon below ceil(n/s).
  LinearSystem sys(MatrixXd::Identity(4, 4), MatrixXd::Identity(4, 4));
  CHECK_THROWS_WITH_AS(controllable_schedule(sys, 2, 1),
                       doctest::Contains("ceil"), PreconditionError);

  // B without full row rank.
  MatrixXd thin = MatrixXd::Zero(3, 2);
  thin(0, 0) = 1.0;
  thin(1, 1) = 1.0;
  LinearSystem short_b(MatrixXd::Identity(3, 3), thin);
  CHECK_THROWS_WITH_AS(controllable_schedule(short_b, 1, 3),
                       doctest::Contains("row rank"), PreconditionError);
}

TEST_CASE("energy_aware_controllable_schedule keeps the rank guarantee") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto engine = make_engine(3400 + seed);
    int n = 2 + uniform_below(7, engine);
    int m = n + uniform_below(4, engine);
    int s = 1 + uniform_below(n, engine);
    int K = (n + s - 1) / s + uniform_below(2, engine);
    LinearSystem sys = test::random_controllable_system(n, m, 3500 + seed);

    ActuatorSchedule sched = energy_aware_controllable_schedule(sys, s, K);
    CHECK(sched.total_selected() == n);
    CHECK(numerical_rank(controllability_matrix(sys, sched)) == n);
  }
}

TEST_CASE("energy_aware_controllable_schedule matches the identity split") {
  LinearSystem sys(MatrixXd::Identity(4, 4), MatrixXd::Identity(4, 4));
  ActuatorSchedule sched = energy_aware_controllable_schedule(sys, 2, 2);
  CHECK(sched.set_at(0) == std::vector<int>{0, 1});
  CHECK(sched.set_at(1) == std::vector<int>{2, 3});

  CHECK(default_energy_eps(sys) == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK_THROWS_AS(energy_aware_controllable_schedule(sys, 2, 2, -1.0),
                  std::invalid_argument);
}

TEST_CASE("energy_aware variant is usually no worse than plain accumulation") {
  int no_worse = 0;
  const int trials = 30;
  for (uint64_t seed = 0; seed < trials; ++seed) {
    LinearSystem sys = test::random_controllable_system(6, 10, 3600 + seed);
    const int s = 2, K = 4;
    double eps = default_energy_eps(sys);
    MatrixXd w_plain = schedule_gramian(sys, controllable_schedule(sys, s, K));
    MatrixXd w_energy =
        schedule_gramian(sys, energy_aware_controllable_schedule(sys, s, K));
    if (regularized_energy(w_energy, eps) <=
        regularized_energy(w_plain, eps) + 1e-9) {
      ++no_worse;
    }
  }
  // Heuristic comparison, reported rather than asserted strictly.
  WARN_MESSAGE(no_worse >= trials / 2,
               "energy-aware schedule beat the plain one in only "
                   << no_worse << "/" << trials << " trials");
  CHECK(no_worse >= 1);
}

TEST_CASE("rbn_greedy returns the seed when every step is saturated") {
  LinearSystem sys(MatrixXd::Identity(4, 4), MatrixXd::Identity(4, 4));
  ActuatorSchedule initial = controllable_schedule(sys, 2, 2);
  GreedyScheduleResult result = rbn_greedy(sys, 2, 2, initial);
  CHECK(result.schedule == initial);
  REQUIRE(result.cost_trace.size() == 1);
  CHECK(result.cost_trace[0] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("rbn_greedy fills every step and keeps the seed pairs") {
  for (uint64_t seed = 0; seed < 15; ++seed) {
    auto engine = make_engine(3700 + seed);
    int n = 2 + uniform_below(5, engine);
    int m = n + uniform_below(4, engine);
    int s = 1 + uniform_below(std::min(n, m - 1) + 1, engine);
    int K = (n + s - 1) / s + 1 + uniform_below(2, engine);
    LinearSystem sys = test::random_controllable_system(n, m, 3800 + seed);

    ActuatorSchedule initial = controllable_schedule(sys, s, K);
    GreedyScheduleResult result = rbn_greedy(sys, s, K, initial);

    CHECK(result.schedule.total_selected() == K * s);
    SelectionSet chosen = result.schedule.to_selection(m);
    SelectionSet seed_pairs = initial.to_selection(m);
    for (const auto& pair : seed_pairs.pairs()) {
      CHECK(chosen.contains(pair));
    }
    for (int k = 0; k < K; ++k) {
      CHECK(int(result.schedule.set_at(k).size()) == s);
    }

    // One cost per acceptance plus the seed cost; non-increasing throughout.
    CHECK(int(result.cost_trace.size()) == 1 + K * s - n);
    for (size_t i = 1; i < result.cost_trace.size(); ++i) {
      CHECK(result.cost_trace[i] <=
            result.cost_trace[i - 1] +
                1e-12 * (1.0 + std::abs(result.cost_trace[i - 1])));
    }
    // Cross-check the reported costs only when the seed Gramian is well
    // conditioned; near-singular seeds make any trace of the inverse an
    // ill-posed quantity.
    GramianReport seed_report = gramian(sys, initial);
    if (seed_report.trace_inverse &&
        seed_report.lambda_min > 1e-6 * seed_report.lambda_max) {
      CHECK(result.cost_trace.front() ==
            doctest::Approx(*seed_report.trace_inverse).epsilon(1e-8));
      CHECK(result.cost_trace.back() ==
            doctest::Approx(avg_energy(gramian(sys, result.schedule)))
                .epsilon(1e-8));
    }
  }
}

TEST_CASE("rbn_greedy validates its arguments") {
  LinearSystem sys(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3));
  ActuatorSchedule initial = controllable_schedule(sys, 1, 3);
  CHECK_THROWS_AS(rbn_greedy(sys, 0, 3, initial), std::invalid_argument);
  CHECK_THROWS_AS(rbn_greedy(sys, 4, 3, initial), std::invalid_argument);
  CHECK_THROWS_AS(rbn_greedy(sys, 1, 2, initial), std::invalid_argument);

  ActuatorSchedule deficient({{0}, {0}, {0}}, 1);
  CHECK_THROWS_AS(rbn_greedy(sys, 1, 3, deficient), NotControllableError);
}

TEST_CASE("rbn_greedy respects the bound from the exhaustive optimum") {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    const int n = 3, m = 4, K = 3, s = 2;
    LinearSystem sys = test::random_controllable_system(n, m, 3900 + seed);
    ActuatorSchedule initial = controllable_schedule(sys, s, K);
    GreedyScheduleResult greedy = rbn_greedy(sys, s, K, initial);

    // Enumerate all schedules with exactly s actuators per step.
    std::vector<std::vector<int>> step_sets;
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) step_sets.push_back({a, b});
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s0 : step_sets) {
      for (const auto& s1 : step_sets) {
        for (const auto& s2 : step_sets) {
          ActuatorSchedule sched({s0, s1, s2}, s);
          GramianReport report = gramian(sys, sched);
          if (report.trace_inverse) {
            best = std::min(best, *report.trace_inverse);
          }
        }
      }
    }
    REQUIRE(std::isfinite(best));

    GramianReport initial_report = gramian(sys, initial);
    GramianReport full_report = report_for_gramian(full_gramian(sys, K));
    double alpha = alpha_lower_bound(initial_report, full_report);
    double bound = theorem2_bound(avg_energy(initial_report), best, alpha);
    CHECK(greedy.cost_trace.back() <= bound + 1e-9);
    CHECK(best <= greedy.cost_trace.back() + 1e-9);
  }
}

TEST_CASE("greedy_candidate_cost applies the rank-one update") {
  MatrixXd w_inv = MatrixXd::Identity(2, 2);
  CHECK(greedy_candidate_cost(w_inv, 2.0, Eigen::Vector2d(1, 0)) ==
        doctest::Approx(1.5).epsilon(1e-12));
  CHECK(greedy_candidate_cost(w_inv, 2.0, Eigen::Vector2d(0, 0)) ==
        doctest::Approx(2.0).epsilon(1e-12));

  for (uint64_t seed = 0; seed < 5; ++seed) {
    MatrixXd g = test::random_matrix(4, 6, 4000 + seed);
    MatrixXd w = g * g.transpose() + 0.5 * MatrixXd::Identity(4, 4);
    auto engine = make_engine(4100 + seed);
    VectorXd c = gaussian_vector(4, engine);
    MatrixXd updated = w + c * c.transpose();
    double direct = updated.inverse().trace();
    CHECK(greedy_candidate_cost(w.inverse(), w.inverse().trace(), c) ==
          doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("sensor_schedule on the identity reads every state at step 0") {
  LinearSystem sys(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3),
                   MatrixXd::Identity(3, 3));
  SensorSchedule sched = sensor_schedule(sys, 3, 1);
  REQUIRE(sched.horizon() == 1);
  CHECK(sched.set_at(0) == std::vector<int>{0, 1, 2});
  MatrixXd obs = selected_observability_matrix(sys, sched);
  CHECK(numerical_rank(obs) == 3);
}

TEST_CASE("sensor_schedule yields a rank-n observability stack") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto engine = make_engine(4200 + seed);
    int n = 2 + uniform_below(6, engine);
    int p = n + uniform_below(4, engine);
    MatrixXd a = gaussian_matrix(n, n, engine) / std::sqrt(double(n));
    MatrixXd b = MatrixXd::Identity(n, n);
    MatrixXd c = gaussian_matrix(p, n, engine);
    LinearSystem sys(a, b, c);

    int budget = 1 + uniform_below(n, engine);
    int horizon = (n + budget - 1) / budget + uniform_below(2, engine);
    SensorSchedule sched = sensor_schedule(sys, budget, horizon);
    CHECK(sched.total_selected() == n);
    for (int k = 0; k < sched.horizon(); ++k) {
      CHECK(int(sched.set_at(k).size()) <= budget);
    }
    CHECK(numerical_rank(selected_observability_matrix(sys, sched)) == n);
  }
}

TEST_CASE("sensor_schedule validates the measurement map") {
  LinearSystem no_c(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3));
  CHECK_THROWS_AS(sensor_schedule(no_c, 1, 3), std::invalid_argument);

  MatrixXd thin_c(2, 3);
  thin_c << 1, 0, 0, 0, 1, 0;
  LinearSystem thin(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3),
                    thin_c);
  CHECK_THROWS_AS(sensor_schedule(thin, 1, 3), PreconditionError);
}

TEST_CASE("estimate_x0 recovers the state from scheduled measurements") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto engine = make_engine(4300 + seed);
    int n = 2 + uniform_below(6, engine);
    int p = n + uniform_below(3, engine);
    MatrixXd a = gaussian_matrix(n, n, engine) / std::sqrt(double(n));
    MatrixXd c = gaussian_matrix(p, n, engine);
    LinearSystem sys(a, MatrixXd::Identity(n, n), c);

    int budget = 1 + uniform_below(n, engine);
    int horizon = (n + budget - 1) / budget;
    SensorSchedule sched = sensor_schedule(sys, budget, horizon);

    VectorXd x0 = gaussian_vector(n, engine);
    std::vector<VectorXd> measurements;
    VectorXd x = x0;
    for (int k = 0; k < horizon; ++k) {
      measurements.push_back(sys.C() * x);
      x = sys.A() * x;
    }

    VectorXd estimate = estimate_x0(sys, sched, measurements);
    CHECK((estimate - x0).norm() <= 1e-8 * (1.0 + x0.norm()));
  }
}

TEST_CASE("estimate_x0 subtracts the forced response") {
  auto engine = make_engine(4400);
  const int n = 4;
  MatrixXd a = gaussian_matrix(n, n, engine) / 2.0;
  MatrixXd b = gaussian_matrix(n, n, engine);
  MatrixXd c = gaussian_matrix(n + 1, n, engine);
  LinearSystem sys(a, b, c);

  SensorSchedule sched = sensor_schedule(sys, 2, 2);
  VectorXd x0 = gaussian_vector(n, engine);

  std::vector<VectorXd> inputs;
  std::vector<VectorXd> measurements;
  VectorXd x = x0;
  for (int k = 0; k < sched.horizon(); ++k) {
    measurements.push_back(sys.C() * x);
    VectorXd u = gaussian_vector(n, engine);
    inputs.push_back(u);
    x = sys.A() * x + sys.B() * u;
  }

  VectorXd with_inputs = estimate_x0(sys, sched, measurements, inputs);
  CHECK((with_inputs - x0).norm() <= 1e-8 * (1.0 + x0.norm()));

  // Ignoring the forcing must bias the estimate.
  VectorXd without = estimate_x0(sys, sched, measurements);
  CHECK((without - x0).norm() > 1e-4);
}

TEST_CASE("estimate_x0 validates measurement shape and count") {
  LinearSystem sys(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2),
                   MatrixXd::Identity(2, 2));
  SensorSchedule sched = sensor_schedule(sys, 2, 1);
  CHECK_THROWS_AS(estimate_x0(sys, sched, {}), std::invalid_argument);
  std::vector<VectorXd> wrong = {VectorXd::Zero(3)};
  CHECK_THROWS_AS(estimate_x0(sys, sched, wrong), std::invalid_argument);
}
