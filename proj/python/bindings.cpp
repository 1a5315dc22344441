#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "genlearn/error.hpp"
#include "genlearn/experiments.hpp"
#include "genlearn/plot.hpp"

namespace py = pybind11;
using namespace genlearn;

namespace {

// Python objects cross the boundary as JSON text.
// Looked up per call: cached interpreter objects would outlive finalization.
json from_py(const py::object& o) {
  const py::object dumps = py::module_::import("json").attr("dumps");
  return json::parse(dumps(o).cast<std::string>());
}

py::object to_py(const json& j) {
  const py::object loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

struct Errors {
  py::handle base, bad_input, capability, numerical, convergence, io;
};
Errors errors;

py::handle new_error(py::module_& m, const char* name, py::handle base) {
  // Owned by the module for the life of the interpreter.
  py::object type = py::reinterpret_steal<py::object>(PyErr_NewException(
      (std::string("genlearn._core.") + name).c_str(), base.ptr(), nullptr));
  m.attr(name) = type;
  return type.release();
}

Eigen::MatrixXd points_matrix(const std::vector<Point>& pts) {
  Eigen::MatrixXd m(pts.size(), pts.empty() ? 0 : pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(i) = pts[i].transpose();
  return m;
}

std::vector<Functional> functionals(const py::list& items) {
  std::vector<Functional> out;
  for (const auto& it : items) {
    out.push_back(functional_from_json(from_py(py::reinterpret_borrow<py::object>(it))));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Regularized learning from generalized data";

  errors.base = new_error(m, "GenlearnError", PyExc_RuntimeError);
  errors.bad_input = new_error(m, "InvalidInput", errors.base);
  errors.capability = new_error(m, "CapabilityError", errors.base);
  errors.numerical = new_error(m, "NumericalError", errors.base);
  errors.convergence = new_error(m, "ConvergenceError", errors.base);
  errors.io = new_error(m, "IOError", errors.base);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const invalid_input& e) {
      py::set_error(errors.bad_input, e.what());
    } catch (const capability_error& e) {
      py::set_error(errors.capability, e.what());
    } catch (const numerical_error& e) {
      py::set_error(errors.numerical, e.what());
    } catch (const convergence_error& e) {
      py::set_error(errors.convergence, e.what());
    } catch (const io_error& e) {
      py::set_error(errors.io, e.what());
    } catch (const error& e) {
      py::set_error(errors.base, e.what());
    } catch (const json::exception& e) {
      py::set_error(errors.bad_input, e.what());
    }
  });

  m.def("eval_kernel",
        [](const py::object& kernel, const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
          return eval_kernel(kernel_from_json(from_py(kernel)), x, z);
        },
        py::arg("kernel"), py::arg("x"), py::arg("z"));
  m.def("gram",
        [](const py::object& kernel, const py::list& items) {
          return gram(kernel_from_json(from_py(kernel)), functionals(items));
        },
        py::arg("kernel"), py::arg("functionals"));
  m.def("dual_norm",
        [](const py::object& kernel, const py::object& xi) {
          return dual_norm(kernel_from_json(from_py(kernel)), functional_from_json(from_py(xi)));
        },
        py::arg("kernel"), py::arg("functional"));
  m.def("epsilon_net_size",
        [](const py::object& kernel, const py::list& items, double eps) {
          return epsilon_net_size(FunctionalSet(kernel_from_json(from_py(kernel)), functionals(items)),
                                  eps);
        },
        py::arg("kernel"), py::arg("functionals"), py::arg("eps"));

  m.def("prox",
        [](const std::string& loss, double y, double v, double step, double weight) {
          return prox(Loss{loss_kind_from_string(loss), weight}, y, v, step);
        },
        py::arg("loss"), py::arg("y"), py::arg("v"), py::arg("step"), py::arg("weight") = 1.0);

  m.def("solve",
        [](const py::object& dataset, const py::object& config) {
          const GeneralizedDataset ds = dataset_from_json(from_py(dataset));
          const SolverConfig cfg =
              config.is_none() ? SolverConfig{} : solver_config_from_json(from_py(config));
          Solution f = [&] {
            py::gil_scoped_release release;
            return solve(ds, cfg);
          }();
          return to_py(to_json(f));
        },
        py::arg("dataset"), py::arg("config") = py::none());
  m.def("solve_tikhonov",
        [](const py::object& dataset, double lambda) {
          return to_py(to_json(solve_tikhonov(dataset_from_json(from_py(dataset)), lambda)));
        },
        py::arg("dataset"), py::arg("lam"));
  m.def("solve_douglas_rachford",
        [](const py::object& a, const py::object& b, const py::object& config) {
          const SolverConfig cfg =
              config.is_none() ? SolverConfig{} : solver_config_from_json(from_py(config));
          return to_py(to_json(solve_douglas_rachford(dataset_from_json(from_py(a)),
                                                      dataset_from_json(from_py(b)), cfg)));
        },
        py::arg("dataset_a"), py::arg("dataset_b"), py::arg("config") = py::none());
  m.def("evaluate",
        [](const py::object& solution, const Eigen::MatrixXd& points) {
          const Solution f = solution_from_json(from_py(solution));
          Eigen::VectorXd out(points.rows());
          for (Eigen::Index i = 0; i < points.rows(); ++i) {
            out[i] = f.evaluate(points.row(i).transpose());
          }
          return out;
        },
        py::arg("solution"), py::arg("points"));
  m.def("empirical_risk",
        [](const py::object& dataset, const py::object& solution) {
          return empirical_risk(dataset_from_json(from_py(dataset)),
                                solution_from_json(from_py(solution)));
        },
        py::arg("dataset"), py::arg("solution"));
  m.def("verify_representer",
        [](const py::object& dataset, const py::object& solution, double tol) {
          return to_py(to_json(verify_representer(dataset_from_json(from_py(dataset)),
                                                  solution_from_json(from_py(solution)), tol)));
        },
        py::arg("dataset"), py::arg("solution"), py::arg("tol") = 1e-8);

  m.def("halton", [](int count, int dims) { return points_matrix(halton(count, dims)); },
        py::arg("count"), py::arg("dims"));
  m.def("boundary_grid", [](int n) { return points_matrix(boundary_grid(n)); }, py::arg("n"));
  m.def("builtin_names", &builtin_names);
  m.def("builtin_dataset",
        [](const std::string& name, int n, std::uint64_t seed, double noise) {
          BuiltinOptions opt;
          opt.seed = seed;
          opt.noise = noise;
          GeneralizedDataset ds = make_builtin(name, opt).sequence.generate(n);
          ds.stage = n;
          return to_py(to_json(ds));
        },
        py::arg("name"), py::arg("n"), py::arg("seed") = 0, py::arg("noise") = 1.0);
  m.def("run_experiment",
        [](const py::object& config) {
          const ExperimentConfig cfg = experiment_from_json(from_py(config));
          OutputBundle out = [&] {
            py::gil_scoped_release release;
            return run(cfg);
          }();
          json j = out.verdict;
          j["files"] = out.files;
          return to_py(j);
        },
        py::arg("config"));
  m.def("render_svg",
        [](const std::string& csv, const std::string& x, const std::vector<std::string>& y,
           bool log_x, bool log_y, const std::string& title) {
          int skipped = 0;
          std::string svg = render_svg(csv, {x, y, log_x, log_y, title}, &skipped);
          return py::make_tuple(svg, skipped);
        },
        py::arg("csv"), py::arg("x"), py::arg("y"), py::arg("log_x") = false,
        py::arg("log_y") = false, py::arg("title") = "");
}
