#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "sparsact/errors.hpp"
#include "sparsact/experiments.hpp"
#include "sparsact/gramian.hpp"
#include "test_support.hpp"

using namespace sparsact;

namespace {

ActuatorSchedule random_schedule(int m, int K, int s, uint64_t seed) {
  return random_feasible_schedule(m, K, s, seed);
}

}  // namespace

TEST_CASE("controllability_matrix stacks powers back to front") {
  MatrixXd a = Eigen::Vector2d(2.0, 3.0).asDiagonal();
  MatrixXd b(2, 2);
  b << 1, 0, 0, 1;
  LinearSystem sys(a, b);

  ActuatorSchedule sched({{0, 1}, {1}}, 2);
  MatrixXd r = controllability_matrix(sys, sched);
  REQUIRE(r.rows() == 2);
  REQUIRE(r.cols() == 3);
  // Step 0 columns carry A^1, step 1 columns A^0.
  CHECK(r.col(0).isApprox(Eigen::Vector2d(2, 0), 1e-14));
  CHECK(r.col(1).isApprox(Eigen::Vector2d(0, 3), 1e-14));
  CHECK(r.col(2).isApprox(Eigen::Vector2d(0, 1), 1e-14));
}

TEST_CASE("controllability_matrix with all actuators equals classical form") {
  LinearSystem sys = test::random_controllable_system(4, 3, 51);
  std::vector<std::vector<int>> all = {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
  ActuatorSchedule sched(all, 3);
  MatrixXd r = controllability_matrix(sys, sched);
  MatrixXd full = full_controllability_matrix(sys, 3);
  CHECK((r - full).norm() <= 1e-12 * (1.0 + full.norm()));
}

TEST_CASE("schedule_gramian equals R R^T") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto engine = make_engine(700 + seed);
    int n = 2 + uniform_below(6, engine);
    int m = 2 + uniform_below(5, engine);
    int K = 1 + uniform_below(5, engine);
    int s = 1 + uniform_below(m, engine);
    LinearSystem sys = test::random_controllable_system(n, m, 800 + seed);
    ActuatorSchedule sched = random_schedule(m, K, s, 900 + seed);

    MatrixXd r = controllability_matrix(sys, sched);
    MatrixXd w = schedule_gramian(sys, sched);
    MatrixXd product = r * r.transpose();
    CHECK((w - product).norm() <= 1e-10 * (1.0 + product.norm()));

    SelectionSet sel = sched.to_selection(m);
    MatrixXd w_sel = selection_gramian(sys, sel);
    CHECK((w - w_sel).norm() <= 1e-12 * (1.0 + w.norm()));
  }
}

TEST_CASE("full_gramian matches the all-actuators schedule") {
  LinearSystem sys = test::random_controllable_system(3, 4, 61);
  std::vector<std::vector<int>> all(5, std::vector<int>{0, 1, 2, 3});
  MatrixXd via_schedule = schedule_gramian(sys, ActuatorSchedule(all, 4));
  MatrixXd direct = full_gramian(sys, 5);
  CHECK((via_schedule - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
}

TEST_CASE("balanced identity schedule yields W = s I") {
  const int m = 6;
  LinearSystem sys(MatrixXd::Identity(m, m), MatrixXd::Identity(m, m));
  for (int s : {1, 2, 3, 6}) {
    ActuatorSchedule sched = test::balanced_identity_schedule(m, s);
    GramianReport report = gramian(sys, sched);
    CHECK((report.w - double(s) * MatrixXd::Identity(m, m)).norm() <= 1e-12);
    CHECK(report.rank == m);
    REQUIRE(report.trace_inverse.has_value());
    CHECK(*report.trace_inverse == doctest::Approx(double(m) / s).epsilon(1e-12));
    CHECK(avg_energy(report) == doctest::Approx(double(m) / s).epsilon(1e-12));
  }
}

TEST_CASE("avg_energy requires a full-rank Gramian") {
  LinearSystem sys(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3));
  ActuatorSchedule sched({{0}}, 1);
  GramianReport report = gramian(sys, sched);
  CHECK(report.rank == 1);
  CHECK_FALSE(report.trace_inverse.has_value());
  CHECK_THROWS_AS(avg_energy(report), NotControllableError);
}

TEST_CASE("adding a pair grows the trace by the column energy") {
  LinearSystem sys = test::random_controllable_system(4, 5, 71);
  ActuatorSchedule sched = random_schedule(5, 4, 2, 72);
  SelectionSet sel = sched.to_selection(5);

  IndexPair extra{1, 4};
  if (sel.contains(extra)) extra = IndexPair{1, 3};
  REQUIRE_FALSE(sel.contains(extra));

  MatrixXd before = selection_gramian(sys, sel);
  SelectionSet grown = sel;
  grown.insert(extra);
  MatrixXd after = selection_gramian(sys, grown);

  MatrixXd power = MatrixXd::Identity(4, 4);
  for (int i = 0; i < sched.horizon() - 1 - extra.step; ++i) power = sys.A() * power;
  VectorXd column = power * sys.B().col(extra.actuator);

  CHECK(after.trace() - before.trace() ==
        doctest::Approx(column.squaredNorm()).epsilon(1e-9));

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig_before(before);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig_after(after);
  CHECK(eig_after.eigenvalues().minCoeff() >=
        eig_before.eigenvalues().minCoeff() - 1e-10);
  CHECK(eig_after.eigenvalues().maxCoeff() >=
        eig_before.eigenvalues().maxCoeff() - 1e-10);
}

TEST_CASE("regularized_energy closed forms") {
  CHECK(regularized_energy(MatrixXd::Zero(2, 2), 0.5) ==
        doctest::Approx(4.0).epsilon(1e-12));

  MatrixXd d = Eigen::Vector2d(1.0, 0.0).asDiagonal();
  CHECK(regularized_energy(d, 1.0) == doctest::Approx(1.5).epsilon(1e-12));

  CHECK_THROWS_AS(regularized_energy(MatrixXd::Identity(2, 2), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(regularized_energy(MatrixXd::Identity(2, 2), -1.0),
                  std::invalid_argument);
}

TEST_CASE("regularized_energy converges to avg_energy as eps vanishes") {
  LinearSystem sys = test::random_controllable_system(4, 6, 81);
  ActuatorSchedule sched = random_schedule(6, 4, 3, 82);
  GramianReport report = gramian(sys, sched);
  REQUIRE(report.rank == 4);
  double exact = avg_energy(report);

  double previous_gap = std::numeric_limits<double>::infinity();
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
    double gap = std::abs(regularized_energy(report.w, eps) - exact);
    CHECK(gap <= previous_gap + 1e-12);
    previous_gap = gap;
  }
  CHECK(previous_gap <= 1e-6 * (1.0 + exact));
}

TEST_CASE("alpha_lower_bound is the eigenvalue ratio") {
  GramianReport initial = report_for_gramian(Eigen::Vector2d(1, 2).asDiagonal());
  GramianReport full = report_for_gramian(Eigen::Vector2d(3, 4).asDiagonal());
  CHECK(alpha_lower_bound(initial, full) == doctest::Approx(0.25).epsilon(1e-12));

  GramianReport eye = report_for_gramian(MatrixXd::Identity(3, 3));
  CHECK(alpha_lower_bound(eye, eye) == doctest::Approx(1.0).epsilon(1e-12));

  GramianReport deficient = report_for_gramian(Eigen::Vector2d(1, 0).asDiagonal());
  CHECK_THROWS_AS(alpha_lower_bound(deficient, full), NotControllableError);
}

TEST_CASE("theorem2_bound interpolates initial and optimal cost") {
  // alpha = 0.5: beta = min(0.25, 1/3) = 0.25.
  CHECK(theorem2_bound(10.0, 4.0, 0.5) == doctest::Approx(8.5).epsilon(1e-12));
  // alpha = 1: beta = 0.5.
  CHECK(theorem2_bound(10.0, 4.0, 1.0) == doctest::Approx(7.0).epsilon(1e-12));
  // Vanishing alpha keeps the initial cost.
  CHECK(theorem2_bound(10.0, 4.0, 1e-12) ==
        doctest::Approx(10.0).epsilon(1e-9));
  CHECK_THROWS_AS(theorem2_bound(4.0, 10.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(theorem2_bound(10.0, 4.0, 0.0), std::invalid_argument);
}

TEST_CASE("sparse_controllability_check identity case") {
  LinearSystem sys(MatrixXd::Identity(4, 4), MatrixXd::Identity(4, 4));
  auto result = sparse_controllability_check(sys, 2);
  CHECK(result.feasible);
  CHECK(result.k_lower == 2);
  // q = 1 for the identity, rank(B) = 4: K <= 1 * ceil(4/2) = 2.
  CHECK(result.k_upper == 2);
  CHECK(result.reason.empty());
}

TEST_CASE("sparse_controllability_check nilpotent shift") {
  MatrixXd shift = MatrixXd::Zero(3, 3);
  shift(0, 1) = 1.0;
  shift(1, 2) = 1.0;
  LinearSystem sys(shift, MatrixXd::Identity(3, 3));
  auto result = sparse_controllability_check(sys, 1);
  CHECK(result.feasible);
  CHECK(result.k_lower == 3);
  // q = 3, rank(B) = 3, cap n - s + 1 = 3.
  CHECK(result.k_upper == 3);
}

TEST_CASE("sparse_controllability_check infeasible cases carry reasons") {
  LinearSystem sys(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3));
  auto zero_budget = sparse_controllability_check(sys, 0);
  CHECK_FALSE(zero_budget.feasible);
  CHECK_FALSE(zero_budget.reason.empty());

  // Uncontrollable pair: second mode is never actuated.
  MatrixXd b = MatrixXd::Zero(2, 1);
  b(0, 0) = 1.0;
  LinearSystem stuck(Eigen::Vector2d(1.0, 2.0).asDiagonal(), b);
  auto result = sparse_controllability_check(stuck, 1);
  CHECK_FALSE(result.feasible);
  CHECK(result.reason.find("controllable") != std::string::npos);

  // Budget below n - rank(A).
  LinearSystem flat(MatrixXd::Zero(3, 3), MatrixXd::Identity(3, 3));
  auto small_s = sparse_controllability_check(flat, 2);
  CHECK_FALSE(small_s.feasible);
  auto ok_s = sparse_controllability_check(flat, 3);
  CHECK(ok_s.feasible);
  CHECK(ok_s.k_lower == 1);
  CHECK(ok_s.k_upper == 1);
}

TEST_CASE("sparse_controllability_check bounds are ordered") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto engine = make_engine(1200 + seed);
    int n = 2 + uniform_below(6, engine);
    int m = n + uniform_below(4, engine);
    LinearSystem sys = test::random_controllable_system(n, m, 1300 + seed);
    int s = 1 + uniform_below(m, engine);
    auto result = sparse_controllability_check(sys, s);
    if (result.feasible) {
      CHECK(result.k_lower >= 1);
      CHECK(result.k_lower <= result.k_upper);
    }
  }
}
