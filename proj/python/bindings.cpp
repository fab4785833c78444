// Python bindings for the core operations of the Boussinesq toolkit.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bsq/brackets.hpp"
#include "bsq/ergodics.hpp"
#include "bsq/malliavin.hpp"
#include "bsq/trajectory_io.hpp"

namespace py = pybind11;
using namespace bsq;

namespace {

Kind kind_from_string(const std::string& s) {
  if (s == "sigma") return Kind::Sigma;
  if (s == "psi") return Kind::Psi;
  throw std::invalid_argument("kind must be 'sigma' or 'psi'");
}

py::array_t<double> state_array(const SpectralState& u) {
  const auto& d = u.data();
  py::array_t<double> out({(py::ssize_t)(d.size() / 4), (py::ssize_t)4});
  std::copy(d.begin(), d.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_bsq, m) {
  m.doc() = "pseudo-spectral stochastic Boussinesq toolkit (C++ core)";

  py::class_<ModeIndex>(m, "ModeIndex")
      .def(py::init<int, int>(), py::arg("j1"), py::arg("j2"))
      .def_readwrite("j1", &ModeIndex::j1)
      .def_readwrite("j2", &ModeIndex::j2)
      .def("norm2", &ModeIndex::norm2)
      .def("__repr__", [](const ModeIndex& j) {
        return "ModeIndex(" + std::to_string(j.j1) + "," + std::to_string(j.j2) + ")";
      });

  py::class_<PhysParams>(m, "PhysParams")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("nu1"), py::arg("nu2"), py::arg("g"))
      .def_readwrite("nu1", &PhysParams::nu1)
      .def_readwrite("nu2", &PhysParams::nu2)
      .def_readwrite("g", &PhysParams::g)
      .def("noise_dim", &PhysParams::noise_dim);

  py::class_<SpectralState>(m, "SpectralState")
      .def(py::init<int>(), py::arg("n_trunc"))
      .def("n_trunc", &SpectralState::n_trunc)
      .def("n_modes", &SpectralState::n_modes)
      .def("coefficients", &state_array,
           "coefficient table, one row per canonical mode: [om_cos, om_sin, th_cos, th_sin]")
      .def("set_coeff",
           [](SpectralState& u, const std::string& kind, int j1, int j2, int parity, double v) {
             u.coeff({j1, j2}, BasisElement{kind_from_string(kind), {j1, j2}, parity}.slot()) = v;
           })
      .def("get_coeff",
           [](const SpectralState& u, const std::string& kind, int j1, int j2, int parity) {
             return u.coeff({j1, j2},
                            BasisElement{kind_from_string(kind), {j1, j2}, parity}.slot());
           })
      .def("__add__", [](const SpectralState& a, const SpectralState& b) { return a + b; })
      .def("__sub__", [](const SpectralState& a, const SpectralState& b) { return a - b; })
      .def("__rmul__", [](const SpectralState& a, double c) { return c * a; });

  m.def("basis_vector",
        [](const std::string& kind, int j1, int j2, int parity, int n_trunc) {
          return basis_vector({kind_from_string(kind), {j1, j2}, parity}, n_trunc);
        },
        py::arg("kind"), py::arg("j1"), py::arg("j2"), py::arg("parity"), py::arg("n_trunc"));
  m.def("inner", &inner);
  m.def("norm", [](const SpectralState& u) { return norm(u); });
  m.def("weighted_inner", &weighted_inner);
  m.def("weighted_norm", &weighted_norm);
  m.def("sobolev_norm", &sobolev_norm);
  m.def("advect_B", &advect_B);
  m.def("buoyancy_G", &buoyancy_G);
  m.def("dissipation_A", &dissipation_A);
  m.def("drift_F", &drift_F);
  m.def("project_low", [](const SpectralState& u, int n) { return project(u, n, Band::Low); });
  m.def("project_high", [](const SpectralState& u, int n) { return project(u, n, Band::High); });

  py::class_<NoisePath>(m, "NoisePath")
      .def_readonly("dt", &NoisePath::dt)
      .def_readonly("d", &NoisePath::d)
      .def_readonly("seed", &NoisePath::seed)
      .def("n_steps", &NoisePath::n_steps);
  m.def("make_noise_path", &make_noise_path, py::arg("seed"), py::arg("dt"), py::arg("n_steps"),
        py::arg("d"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("dt", &Trajectory::dt)
      .def_readonly("noise_seed", &Trajectory::noise_seed)
      .def("n_steps", &Trajectory::n_steps)
      .def("times", &Trajectory::times)
      .def("state", &Trajectory::state, py::return_value_policy::copy);
  m.def("evolve",
        [](const SpectralState& u0, const PhysParams& p, double T, const NoisePath& path) {
          return evolve(u0, p, T, path);
        });
  m.def("save_trajectory", &save_trajectory);
  m.def("load_trajectory", &load_trajectory);

  m.def("tangent_J",
        [](const Trajectory& t, double s, double tt, const SpectralState& xi) {
          return tangent_J(t, s, tt, xi);
        });
  m.def("adjoint_K",
        [](const Trajectory& t, double s, double tt, const SpectralState& phi) {
          return adjoint_K(t, s, tt, phi);
        });

  py::class_<GramMatrix>(m, "GramMatrix")
      .def("dim", &GramMatrix::dim)
      .def("trace", &GramMatrix::trace)
      .def("array", [](const GramMatrix& gm) {
        py::array_t<double> out({(py::ssize_t)gm.dim(), (py::ssize_t)gm.dim()});
        std::copy(gm.entries.begin(), gm.entries.end(), out.mutable_data());
        return out;
      });
  m.def("assemble_M", [](const Trajectory& t, int is, int it) { return assemble_M(t, is, it); });
  m.def("cone_min", [](const GramMatrix& gm, double alpha, int N) {
    auto r = cone_min(gm, {alpha, N});
    return py::make_tuple(r.value, r.min_eigenvalue);
  });

  m.def("field_Y", &field_Y);
  m.def("field_Z", &field_Z);
  m.def("psi_with_error", [](const ModeIndex& j, int m, const SpectralState& u,
                             const PhysParams& p) {
    auto r = psi_with_error(j, m, u, p);
    return py::make_tuple(r.combo, r.junk);
  });
  m.def("generate_span",
        [](const std::vector<std::pair<int, int>>& forced, int n, int depth_cap) {
          std::vector<ModeIndex> f;
          for (auto& [a, b] : forced) f.push_back({a, b});
          auto ledger = generate_span(f, n, depth_cap);
          py::dict out;
          out["covered"] = ledger.covered;
          out["depth_reached"] = ledger.depth_reached;
          py::list sigma;
          for (const auto& mmode : ledger.sigma_modes)
            sigma.append(py::make_tuple(mmode.j1, mmode.j2));
          out["sigma_modes"] = sigma;
          return out;
        });
  m.def("quad_form_Q", &quad_form_Q);

  m.def("rho_r_distance",
        [](const SpectralState& a, const SpectralState& b, double r, double vs,
           const PhysParams& p) {
          auto d = rho_r_distance(a, b, r, vs, p);
          return py::make_tuple(d.value, d.lower, d.upper);
        });
  m.def("time_average", [](const Trajectory& t, const std::string& kind, double burn) {
    Observable phi = kind == "energy" ? Observable::weighted_energy() : Observable::enstrophy();
    return time_average(t, phi, burn);
  });
}
