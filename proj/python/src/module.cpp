#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bccf/analysis.hpp"
#include "bccf/classical.hpp"
#include "bccf/io.hpp"
#include "bccf/pointgame.hpp"
#include "bccf/quantum.hpp"

namespace py = pybind11;
using namespace bccf;

namespace {

BccfProtocol make_protocol(std::vector<std::size_t> ad, std::vector<std::size_t> bd, std::vector<double> a0,
                           std::vector<double> a1, std::vector<double> b0, std::vector<double> b1) {
  return BccfProtocol(std::move(ad), std::move(bd), ProbDist(std::move(a0)), ProbDist(std::move(a1)),
                      ProbDist(std::move(b0)), ProbDist(std::move(b1)));
}

std::vector<double> as_vec(const ProbDist& d) { return {d.values().begin(), d.values().end()}; }

// numerator and denominator as Python ints; the wrapper turns them into a Fraction
py::tuple rational_parts(const Rational& r) {
  std::ostringstream n, d;
  n << boost::multiprecision::numerator(r);
  d << boost::multiprecision::denominator(r);
  return py::make_tuple(py::int_(py::str(n.str())), py::int_(py::str(d.str())));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "BCCF coin-flipping protocols: cheating probabilities, dual certificates, point games";

  auto base = py::register_exception<BccfError>(m, "BccfError", PyExc_ValueError);
  py::register_exception<NormalizationError>(m, "NormalizationError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InfeasibleDualError>(m, "InfeasibleDualError", base.ptr());
  py::register_exception<PointGameError>(m, "PointGameError", base.ptr());
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", base.ptr());
  py::register_exception<TheoremViolation>(m, "TheoremViolation", base.ptr());

  py::enum_<Party>(m, "Party").value("ALICE", Party::Alice).value("BOB", Party::Bob);
  py::enum_<FwVariant>(m, "Variant")
      .value("VANILLA", FwVariant::Vanilla)
      .value("AWAY", FwVariant::Away)
      .value("PAIRWISE", FwVariant::Pairwise)
      .value("CORRECTIVE", FwVariant::Corrective)
      .value("BARRIER", FwVariant::Barrier)
      .value("AUTO", FwVariant::Auto);

  py::class_<BccfProtocol>(m, "Protocol")
      .def(py::init(&make_protocol), py::arg("alice_dims"), py::arg("bob_dims"), py::arg("alpha0"), py::arg("alpha1"),
           py::arg("beta0"), py::arg("beta1"))
      .def_property_readonly("alice_dims", &BccfProtocol::alice_dims)
      .def_property_readonly("bob_dims", &BccfProtocol::bob_dims)
      .def_property_readonly("rounds", &BccfProtocol::rounds)
      .def("alpha", [](const BccfProtocol& p, int a) { return as_vec(p.alpha(a)); })
      .def("beta", [](const BccfProtocol& p, int b) { return as_vec(p.beta(b)); })
      .def("with_swapped_betas", &BccfProtocol::with_swapped_betas)
      .def("to_json", [](const BccfProtocol& p) { return protocol_to_json(p); })
      .def_static("from_json", &protocol_from_json)
      .def_static("load", [](const std::string& path) { return load_protocol(path); })
      .def(py::self == py::self);

  m.def("three_quarters_protocol", &three_quarters_protocol);

  m.def("fidelity", [](const std::vector<double>& p, const std::vector<double>& q) { return fidelity(p, q); });
  m.def("trace_distance",
        [](const std::vector<double>& p, const std::vector<double>& q) { return trace_distance(p, q); });

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("max_iter", &SolveOptions::max_iter)
      .def_readwrite("gap_tol", &SolveOptions::gap_tol)
      .def_readwrite("seed", &SolveOptions::seed)
      .def_readwrite("variant", &SolveOptions::variant);

  py::class_<BobDual>(m, "BobDual")
      .def(py::init([](int outcome, std::vector<double> v0, std::vector<double> v1) {
             return BobDual{outcome_from_int(outcome), std::move(v0), std::move(v1)};
           }),
           py::arg("outcome"), py::arg("v0"), py::arg("v1"))
      .def_property_readonly("outcome", [](const BobDual& d) { return to_int(d.outcome); })
      .def_readonly("v0", &BobDual::v0)
      .def_readonly("v1", &BobDual::v1);
  py::class_<AliceDual>(m, "AliceDual")
      .def(py::init([](int outcome, std::vector<double> z) { return AliceDual{outcome_from_int(outcome), std::move(z)}; }),
           py::arg("outcome"), py::arg("z"))
      .def_property_readonly("outcome", [](const AliceDual& d) { return to_int(d.outcome); })
      .def_readonly("z", &AliceDual::z);

  py::class_<QuantumResult>(m, "QuantumResult")
      .def_readonly("party", &QuantumResult::party)
      .def_property_readonly("outcome", [](const QuantumResult& r) { return to_int(r.outcome); })
      .def_readonly("value", &QuantumResult::value)
      .def_readonly("dual_value", &QuantumResult::dual_value)
      .def_readonly("gap", &QuantumResult::gap)
      .def_readonly("iterations", &QuantumResult::iterations)
      .def_readonly("converged", &QuantumResult::converged)
      .def_readonly("primal", &QuantumResult::primal)
      .def_readonly("bob_dual", &QuantumResult::bob_dual)
      .def_readonly("alice_dual", &QuantumResult::alice_dual)
      .def("to_json", [](const QuantumResult& r) { return quantum_result_json(r); });

  m.def(
      "solve_quantum",
      [](const BccfProtocol& p, Party party, int outcome, const SolveOptions& o) {
        py::gil_scoped_release nogil;
        return solve_quantum(p, party, outcome_from_int(outcome), o);
      },
      py::arg("protocol"), py::arg("party"), py::arg("outcome"), py::arg("options") = SolveOptions{});

  m.def(
      "classical_cheat",
      [](const BccfProtocol& p, Party party, int outcome) {
        return classical_cheat(p, party, outcome_from_int(outcome)).prob;
      },
      py::arg("protocol"), py::arg("party"), py::arg("outcome"));
  m.def(
      "_classical_cheat_exact",
      [](const BccfProtocol& p, Party party, int outcome) {
        return rational_parts(classical_cheat_exact(p, party, outcome_from_int(outcome)));
      },
      py::arg("protocol"), py::arg("party"), py::arg("outcome"));
  m.def("classical_bob_dual", [](const BccfProtocol& p, int c) { return classical_bob_dual(p, outcome_from_int(c)); });
  m.def("classical_alice_dual",
        [](const BccfProtocol& p, int c) { return classical_alice_dual(p, outcome_from_int(c)); });

  m.def("eval_dual_bob", &eval_dual_bob);
  m.def("eval_dual_alice", &eval_dual_alice);

  m.def(
      "_bias_report_json",
      [](const BccfProtocol& p, const std::string& mode, const SolveOptions& o) {
        const ReportMode rm = mode == "quantum" ? ReportMode::Quantum
                              : mode == "classical" ? ReportMode::Classical
                                                    : ReportMode::Both;
        BiasReport r;
        {
          py::gil_scoped_release nogil;
          r = bias_report(p, o, rm);
        }
        return bias_report_json(r);
      },
      py::arg("protocol"), py::arg("mode") = "both", py::arg("options") = SolveOptions{});

  py::class_<PointGame>(m, "PointGame")
      .def_property_readonly("kind", [](const PointGame& g) { return std::string(to_string(g.kind)); })
      .def_property_readonly("final_point", [](const PointGame& g) { return py::make_tuple(g.zeta_b, g.zeta_a); })
      .def_property_readonly("num_moves", [](const PointGame& g) { return g.moves.size(); })
      .def_property_readonly("move_kinds",
                             [](const PointGame& g) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& mv : g.moves) out.emplace_back(to_string(mv.kind), to_string(mv.axis));
                               return out;
                             })
      .def("verify",
           [](const PointGame& g) {
             const auto c = verify_game(g);
             return py::make_tuple(c.ok, c.bad_transition, c.message);
           })
      .def("compact", &compact_view)
      .def("final_point_theorem", &classical_final_point_theorem)
      .def("to_json", [](const PointGame& g) { return point_game_json(g); })
      .def("to_svg", &point_game_svg);

  m.def("build_quantum_game", &build_quantum_game, py::arg("protocol"), py::arg("bob1"), py::arg("alice0"));
  m.def("build_classical_game", &build_classical_game, py::arg("protocol"), py::arg("bob1"), py::arg("alice0"));
}
