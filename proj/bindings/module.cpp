#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sparsact/control.hpp"
#include "sparsact/errors.hpp"
#include "sparsact/experiments.hpp"
#include "sparsact/gramian.hpp"
#include "sparsact/graph.hpp"
#include "sparsact/linalg.hpp"
#include "sparsact/noisy_control.hpp"
#include "sparsact/scheduler.hpp"
#include "sparsact/sparse_recovery.hpp"

namespace py = pybind11;
using namespace sparsact;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Sparse actuator scheduling, input synthesis, and noisy tracking for "
      "linear network systems";

  py::register_exception<NotControllableError>(m, "NotControllableError",
                                               PyExc_RuntimeError);
  py::register_exception<PreconditionError>(m, "PreconditionError",
                                            PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);
  py::register_exception<BoundUndefinedError>(m, "BoundUndefinedError",
                                              PyExc_RuntimeError);

  py::class_<RankTolerance>(m, "RankTolerance")
      .def(py::init<>())
      .def(py::init([](double rel) { return RankTolerance{rel}; }),
           py::arg("relative_tol"))
      .def_readwrite("relative_tol", &RankTolerance::relative_tol);

  py::class_<LinearSystem>(m, "LinearSystem")
      .def(py::init<MatrixXd, MatrixXd>(), py::arg("a"), py::arg("b"))
      .def(py::init<MatrixXd, MatrixXd, MatrixXd>(), py::arg("a"),
           py::arg("b"), py::arg("c"))
      .def_property_readonly("a", &LinearSystem::A)
      .def_property_readonly("b", &LinearSystem::B)
      .def_property_readonly("c",
                             [](const LinearSystem& sys) -> py::object {
                               if (!sys.has_output()) return py::none();
                               return py::cast(sys.C());
                             })
      .def_property_readonly("n", &LinearSystem::n)
      .def_property_readonly("m", &LinearSystem::m)
      .def_property_readonly("p", &LinearSystem::p)
      .def_property_readonly("has_output", &LinearSystem::has_output);

  py::class_<SelectionSet>(m, "SelectionSet")
      .def(py::init<int, int>(), py::arg("horizon"), py::arg("num_actuators"))
      .def("insert",
           [](SelectionSet& set, int step, int actuator) {
             return set.insert({step, actuator});
           },
           py::arg("step"), py::arg("actuator"))
      .def("contains",
           [](const SelectionSet& set, int step, int actuator) {
             return set.contains({step, actuator});
           },
           py::arg("step"), py::arg("actuator"))
      .def_property_readonly("horizon", &SelectionSet::horizon)
      .def_property_readonly("num_actuators", &SelectionSet::num_actuators)
      .def("__len__", &SelectionSet::size)
      .def("count_at", &SelectionSet::count_at, py::arg("step"))
      .def("united_with", &SelectionSet::united_with)
      .def_property_readonly("pairs", [](const SelectionSet& set) {
        py::list out;
        for (const auto& pair : set.pairs()) {
          out.append(py::make_tuple(pair.step, pair.actuator));
        }
        return out;
      });

  py::class_<ActuatorSchedule>(m, "ActuatorSchedule")
      .def(py::init<std::vector<std::vector<int>>, int>(), py::arg("sets"),
           py::arg("sparsity"))
      .def_static("from_selection", &ActuatorSchedule::from_selection,
                  py::arg("selection"), py::arg("sparsity"))
      .def("to_selection", &ActuatorSchedule::to_selection,
           py::arg("num_actuators"))
      .def_property_readonly("horizon", &ActuatorSchedule::horizon)
      .def_property_readonly("sparsity", &ActuatorSchedule::sparsity)
      .def_property_readonly("sets", &ActuatorSchedule::sets)
      .def("set_at", &ActuatorSchedule::set_at, py::arg("step"))
      .def("total_selected", &ActuatorSchedule::total_selected)
      .def("__eq__",
           [](const ActuatorSchedule& a, const ActuatorSchedule& b) {
             return a == b;
           })
      .def("__str__",
           [](const ActuatorSchedule& s) { return schedule_to_string(s); });

  py::class_<SensorSchedule>(m, "SensorSchedule")
      .def(py::init<std::vector<std::vector<int>>, int>(), py::arg("sets"),
           py::arg("budget"))
      .def_property_readonly("horizon", &SensorSchedule::horizon)
      .def_property_readonly("budget", &SensorSchedule::budget)
      .def_property_readonly("sets", &SensorSchedule::sets)
      .def("set_at", &SensorSchedule::set_at, py::arg("step"))
      .def("total_selected", &SensorSchedule::total_selected);

  py::class_<PiecewiseSparseInput>(m, "PiecewiseSparseInput")
      .def(py::init<std::vector<VectorXd>, ActuatorSchedule>(),
           py::arg("inputs"), py::arg("schedule"))
      .def_property_readonly("inputs", &PiecewiseSparseInput::inputs)
      .def_property_readonly("schedule", &PiecewiseSparseInput::schedule)
      .def_property_readonly("horizon", &PiecewiseSparseInput::horizon);

  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init([](MatrixXd sigma_v, MatrixXd sigma_w) {
             return NoiseModel{std::move(sigma_v), std::move(sigma_w)};
           }),
           py::arg("sigma_v"), py::arg("sigma_w"))
      .def_readwrite("sigma_v", &NoiseModel::sigma_v)
      .def_readwrite("sigma_w", &NoiseModel::sigma_w);

  py::class_<GramianReport>(m, "GramianReport")
      .def_readonly("w", &GramianReport::w)
      .def_readonly("rank", &GramianReport::rank)
      .def_readonly("lambda_min", &GramianReport::lambda_min)
      .def_readonly("lambda_max", &GramianReport::lambda_max)
      .def_readonly("trace_inverse", &GramianReport::trace_inverse);

  py::class_<SparseControllabilityResult>(m, "SparseControllabilityResult")
      .def_readonly("feasible", &SparseControllabilityResult::feasible)
      .def_readonly("k_lower", &SparseControllabilityResult::k_lower)
      .def_readonly("k_upper", &SparseControllabilityResult::k_upper)
      .def_readonly("reason", &SparseControllabilityResult::reason);

  py::class_<SimulationResult>(m, "SimulationResult")
      .def_readonly("states", &SimulationResult::states)
      .def_readonly("measurements", &SimulationResult::measurements);

  py::class_<GreedyScheduleResult>(m, "GreedyScheduleResult")
      .def_readonly("schedule", &GreedyScheduleResult::schedule)
      .def_readonly("cost_trace", &GreedyScheduleResult::cost_trace);

  py::class_<OmpResult>(m, "OmpResult")
      .def_readonly("coefficients", &OmpResult::coefficients)
      .def_readonly("support", &OmpResult::support)
      .def_readonly("residual_norms", &OmpResult::residual_norms);

  py::enum_<DecayMethod>(m, "DecayMethod")
      .value("analytic", DecayMethod::analytic)
      .value("sampled", DecayMethod::sampled);

  py::class_<DecayFactorEstimate>(m, "DecayFactorEstimate")
      .def_readonly("value", &DecayFactorEstimate::value)
      .def_readonly("method", &DecayFactorEstimate::method)
      .def_readonly("samples", &DecayFactorEstimate::samples)
      .def_readonly("is_lower_estimate",
                    &DecayFactorEstimate::is_lower_estimate);

  py::class_<KalmanState>(m, "KalmanState")
      .def(py::init([](VectorXd x_hat, MatrixXd p) {
             return KalmanState{std::move(x_hat), std::move(p)};
           }),
           py::arg("x_hat"), py::arg("p"))
      .def_readwrite("x_hat", &KalmanState::x_hat)
      .def_readwrite("p", &KalmanState::p);

  py::class_<SteadyStateCovariance>(m, "SteadyStateCovariance")
      .def_readonly("p", &SteadyStateCovariance::p)
      .def_readonly("s", &SteadyStateCovariance::s)
      .def_readonly("residual", &SteadyStateCovariance::residual)
      .def_readonly("iterations", &SteadyStateCovariance::iterations)
      .def_readonly("hypotheses_hold",
                    &SteadyStateCovariance::hypotheses_hold);

  py::class_<MseBoundInputs>(m, "MseBoundInputs")
      .def(py::init<>())
      .def_readwrite("a", &MseBoundInputs::a)
      .def_readwrite("xi", &MseBoundInputs::xi)
      .def_readwrite("s", &MseBoundInputs::s)
      .def_readwrite("p", &MseBoundInputs::p)
      .def_readwrite("sigma_v", &MseBoundInputs::sigma_v)
      .def_readwrite("xf", &MseBoundInputs::xf)
      .def_readwrite("eta", &MseBoundInputs::eta);

  py::class_<Regularizers>(m, "Regularizers")
      .def(py::init([](MatrixXd q, MatrixXd r) {
             return Regularizers{std::move(q), std::move(r)};
           }),
           py::arg("q"), py::arg("r"))
      .def_readwrite("q", &Regularizers::q)
      .def_readwrite("r", &Regularizers::r);

  py::class_<TrackingOptions>(m, "TrackingOptions")
      .def(py::init<>())
      .def_readwrite("x0", &TrackingOptions::x0)
      .def_readwrite("regularizers", &TrackingOptions::regularizers)
      .def_readwrite("xi", &TrackingOptions::xi)
      .def_readwrite("omp_tol", &TrackingOptions::omp_tol);

  py::class_<TrackingRun>(m, "TrackingRun")
      .def_readonly("mse_per_step", &TrackingRun::mse_per_step)
      .def_readonly("steady_mse", &TrackingRun::steady_mse)
      .def_readonly("steady_mse_se", &TrackingRun::steady_mse_se)
      .def_readonly("per_trial_steady_mse",
                    &TrackingRun::per_trial_steady_mse)
      .def_readonly("steady_window", &TrackingRun::steady_window)
      .def_readonly("states", &TrackingRun::states)
      .def_readonly("estimates", &TrackingRun::estimates)
      .def_readonly("inputs", &TrackingRun::inputs)
      .def_readonly("floor", &TrackingRun::floor)
      .def_readonly("bound", &TrackingRun::bound)
      .def_readonly("bound_condition_holds",
                    &TrackingRun::bound_condition_holds)
      .def(
          "csv",
          [](const TrackingRun& run,
             const std::vector<std::string>& metadata_lines) {
            std::ostringstream out;
            write_tracking_csv(out, run, metadata_lines);
            return out.str();
          },
          py::arg("metadata_lines") = std::vector<std::string>{});

  py::class_<EdgeListGraph>(m, "EdgeListGraph")
      .def_readonly("vertex_count", &EdgeListGraph::vertex_count)
      .def_readonly("edges", &EdgeListGraph::edges);

  py::enum_<BDistribution>(m, "BDistribution")
      .value("uniform01", BDistribution::uniform01)
      .value("gaussian", BDistribution::gaussian)
      .value("identity", BDistribution::identity);

  py::class_<ExperimentSpec>(m, "ExperimentSpec")
      .def(py::init<>())
      .def_readwrite("experiment", &ExperimentSpec::experiment)
      .def_readwrite("n", &ExperimentSpec::n)
      .def_readwrite("m", &ExperimentSpec::m)
      .def_readwrite("p", &ExperimentSpec::p)
      .def_readwrite("s_values", &ExperimentSpec::s_values)
      .def_readwrite("m_values", &ExperimentSpec::m_values)
      .def_readwrite("k", &ExperimentSpec::k)
      .def_readwrite("horizon", &ExperimentSpec::horizon)
      .def_readwrite("trials", &ExperimentSpec::trials)
      .def_readwrite("sigma2", &ExperimentSpec::sigma2)
      .def_readwrite("sigma2_values", &ExperimentSpec::sigma2_values)
      .def_readwrite("b_dist", &ExperimentSpec::b_dist)
      .def_readwrite("seed", &ExperimentSpec::seed)
      .def_readwrite("has_seed", &ExperimentSpec::has_seed)
      .def_readwrite("out", &ExperimentSpec::out)
      .def_readwrite("graph_path", &ExperimentSpec::graph_path)
      .def_readwrite("edge_prob", &ExperimentSpec::edge_prob)
      .def_readwrite("xf_norms", &ExperimentSpec::xf_norms)
      .def_readwrite("x0_norms", &ExperimentSpec::x0_norms);

  py::class_<CsvTable>(m, "CsvTable")
      .def_readonly("metadata", &CsvTable::metadata)
      .def_readonly("columns", &CsvTable::columns)
      .def_readonly("rows", &CsvTable::rows)
      .def("text", [](const CsvTable& table) {
        std::ostringstream out;
        table.write(out);
        return out.str();
      });

  m.def("numerical_rank", &numerical_rank, py::arg("m"),
        py::arg("tol") = RankTolerance{});
  m.def("minimal_polynomial_degree", &minimal_polynomial_degree,
        py::arg("a"), py::arg("tol") = RankTolerance{});
  m.def("min_norm_solve", &min_norm_solve, py::arg("m"), py::arg("b"),
        py::arg("tol") = RankTolerance{});
  m.def("spectral_norm", &spectral_norm, py::arg("m"));

  m.def("controllability_matrix", &controllability_matrix, py::arg("sys"),
        py::arg("schedule"));
  m.def("full_controllability_matrix", &full_controllability_matrix,
        py::arg("sys"), py::arg("horizon"));
  m.def("schedule_gramian", &schedule_gramian, py::arg("sys"),
        py::arg("schedule"));
  m.def("selection_gramian", &selection_gramian, py::arg("sys"),
        py::arg("selection"));
  m.def("full_gramian", &full_gramian, py::arg("sys"), py::arg("horizon"));
  m.def("gramian", &gramian, py::arg("sys"), py::arg("schedule"),
        py::arg("tol") = RankTolerance{});
  m.def("report_for_gramian", &report_for_gramian, py::arg("w"),
        py::arg("tol") = RankTolerance{});
  m.def("avg_energy", &avg_energy, py::arg("report"));
  m.def("regularized_energy", &regularized_energy, py::arg("w"),
        py::arg("eps"));
  m.def("alpha_lower_bound", &alpha_lower_bound, py::arg("initial"),
        py::arg("full"));
  m.def("theorem2_bound", &theorem2_bound, py::arg("trace_inv_initial"),
        py::arg("optimal_cost"), py::arg("alpha"));
  m.def("sparse_controllability_check", &sparse_controllability_check,
        py::arg("sys"), py::arg("s"), py::arg("tol") = RankTolerance{});

  m.def("compute_inputs", &compute_inputs, py::arg("sys"),
        py::arg("schedule"), py::arg("x0"), py::arg("xf"),
        py::arg("tol") = RankTolerance{});
  m.def("simulate", &simulate, py::arg("sys"), py::arg("x0"),
        py::arg("input"), py::arg("noise") = std::nullopt,
        py::arg("seed") = 0);

  m.def("controllable_schedule", &controllable_schedule, py::arg("sys"),
        py::arg("s"), py::arg("k"), py::arg("tol") = RankTolerance{});
  m.def("energy_aware_controllable_schedule",
        &energy_aware_controllable_schedule, py::arg("sys"), py::arg("s"),
        py::arg("k"), py::arg("eps") = std::nullopt,
        py::arg("tol") = RankTolerance{});
  m.def("default_energy_eps", &default_energy_eps, py::arg("sys"));
  m.def("rbn_greedy", &rbn_greedy, py::arg("sys"), py::arg("s"),
        py::arg("k"), py::arg("initial"), py::arg("tol") = RankTolerance{});
  m.def("greedy_candidate_cost", &greedy_candidate_cost,
        py::arg("w_inverse"), py::arg("trace_w_inverse"), py::arg("column"));
  m.def("sensor_schedule", &sensor_schedule, py::arg("sys"),
        py::arg("sensor_budget"), py::arg("horizon"),
        py::arg("tol") = RankTolerance{});
  m.def("selected_observability_matrix", &selected_observability_matrix,
        py::arg("sys"), py::arg("schedule"));
  m.def("estimate_x0", &estimate_x0, py::arg("sys"), py::arg("schedule"),
        py::arg("measurements"),
        py::arg("applied_inputs") = std::vector<VectorXd>{},
        py::arg("tol") = RankTolerance{});
  m.def("schedule_to_string", &schedule_to_string, py::arg("schedule"));
  m.def("schedule_from_string", &schedule_from_string, py::arg("text"),
        py::arg("sparsity") = std::nullopt);

  m.def("omp", &omp, py::arg("dictionary"), py::arg("target"),
        py::arg("sparsity"), py::arg("tol") = 1e-12);
  m.def("decay_factor", &decay_factor, py::arg("b"),
        py::arg("sample_budget") = 10000, py::arg("seed") = 0);

  m.def("kalman_step", &kalman_step, py::arg("sys"), py::arg("state"),
        py::arg("u_prev"), py::arg("y"), py::arg("noise"),
        py::arg("tol") = RankTolerance{});
  m.def("steady_state_covariance", &steady_state_covariance, py::arg("sys"),
        py::arg("noise"), py::arg("tol") = RankTolerance{});
  m.def("mse_upper_bound", &mse_upper_bound, py::arg("inputs"));
  m.def("mse_floor", &mse_floor, py::arg("sys"), py::arg("noise"),
        py::arg("p"));
  m.def("track", &track, py::arg("sys"), py::arg("noise"), py::arg("xf"),
        py::arg("sparsity"), py::arg("horizon"), py::arg("trials"),
        py::arg("seed"), py::arg("options") = TrackingOptions{});

  m.def("load_edge_list", &load_edge_list, py::arg("path"));
  m.def("graph_to_system", &graph_to_system, py::arg("graph"));
  m.def("erdos_renyi_system", &erdos_renyi_system, py::arg("n"),
        py::arg("seed"), py::arg("edge_probability") = std::nullopt);
  m.def("random_b", &random_b, py::arg("n"), py::arg("m"), py::arg("dist"),
        py::arg("seed"));
  m.def("random_feasible_schedule", &random_feasible_schedule, py::arg("m"),
        py::arg("k"), py::arg("s"), py::arg("seed"));
  m.def("parse_b_distribution", &parse_b_distribution, py::arg("name"));
  m.def("run_experiment", &run_experiment, py::arg("spec"));
}
