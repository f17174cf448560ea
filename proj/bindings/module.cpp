#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <variant>

#include "kref/covers.hpp"
#include "kref/csp.hpp"
#include "kref/decompose.hpp"
#include "kref/instances.hpp"
#include "kref/kikuchi.hpp"
#include "kref/refute.hpp"
#include "kref/specnorm.hpp"
#include "kref/wam_experiment.hpp"

namespace py = pybind11;
using namespace kref;

namespace {

Rat rat_from_str(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

std::string rat_to_str(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

InstanceFormat format_by_name(const std::string& name) {
    if (name == "xor") return InstanceFormat::Xor;
    if (name == "cnf" || name == "dimacs-cnf") return InstanceFormat::DimacsCnf;
    if (name == "json") return InstanceFormat::Json;
    throw std::invalid_argument("unknown format '" + name + "'");
}

CoverStrategy strategy_by_name(const std::string& name) {
    if (name == "exhaustive") return CoverStrategy::Exhaustive;
    if (name == "gf2-kernel") return CoverStrategy::Gf2Kernel;
    if (name == "kikuchi-cycle") return CoverStrategy::KikuchiCycle;
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_kikref, m) {
    m.doc() = "refutation toolkit for semirandom and smoothed Boolean CSPs";

    py::class_<XorInstance>(m, "XorInstance")
        .def(py::init<>())
        .def_readwrite("n", &XorInstance::n)
        .def_readwrite("k", &XorInstance::k)
        .def_readwrite("clauses", &XorInstance::clauses)
        .def_property(
            "coeffs",
            [](const XorInstance& inst) {
                std::vector<std::string> out;
                for (const auto& b : inst.coeffs) out.push_back(rat_to_str(b));
                return out;
            },
            [](XorInstance& inst, const std::vector<std::string>& coeffs) {
                inst.coeffs.clear();
                for (const auto& s : coeffs) inst.coeffs.push_back(rat_from_str(s));
            })
        .def_property_readonly("m", &XorInstance::m)
        .def("validate", &XorInstance::validate)
        .def("digest", [](const XorInstance& inst) { return instance_digest(inst); })
        .def("__repr__", [](const XorInstance& inst) {
            std::ostringstream os;
            os << "XorInstance(n=" << inst.n << ", k=" << inst.k << ", m=" << inst.m() << ")";
            return os.str();
        });

    py::class_<Predicate>(m, "Predicate")
        .def_readonly("k", &Predicate::k)
        .def_readonly("name", &Predicate::name)
        .def_readonly("truth_table", &Predicate::truth_table)
        .def_property_readonly("fourier", [](const Predicate& p) {
            py::dict out;
            for (const auto& [mask, coeff] : p.fourier) out[py::int_(mask)] = rat_to_str(coeff);
            return out;
        });

    py::class_<CspInstance>(m, "CspInstance")
        .def(py::init<>())
        .def_readwrite("n", &CspInstance::n)
        .def_readwrite("k", &CspInstance::k)
        .def_readwrite("predicate", &CspInstance::predicate)
        .def_readwrite("scopes", &CspInstance::scopes)
        .def_readwrite("literals", &CspInstance::literals)
        .def_property_readonly("m", &CspInstance::m)
        .def("validate", &CspInstance::validate)
        .def("__repr__", [](const CspInstance& inst) {
            std::ostringstream os;
            os << "CspInstance(n=" << inst.n << ", k=" << inst.k << ", m=" << inst.m()
               << ", predicate=" << inst.predicate.name << ")";
            return os.str();
        });

    m.def(
        "gen_random_xor",
        [](int n, int k, int mm, std::uint64_t seed, const std::string& dist) {
            return gen_random_xor(n, k, mm, seed,
                                  dist == "dyadic" ? CoeffDist::UniformDyadic : CoeffDist::PlusMinusOne);
        },
        py::arg("n"), py::arg("k"), py::arg("m"), py::arg("seed"), py::arg("coeff_dist") = "pm1");
    m.def("gen_random_csp", &gen_random_csp, py::arg("n"), py::arg("m"), py::arg("predicate"),
          py::arg("seed"));
    m.def(
        "smooth_csp",
        [](const CspInstance& inst, const std::vector<std::vector<double>>& probabilities,
           std::uint64_t seed) {
            SmoothingPlan plan;
            plan.probabilities = probabilities;
            plan.seed = seed;
            auto res = smooth_csp(inst, plan);
            return py::make_tuple(res.instance, res.q);
        },
        py::arg("instance"), py::arg("probabilities"), py::arg("seed"));
    m.def(
        "smooth_csp_uniform",
        [](const CspInstance& inst, double p, std::uint64_t seed) {
            SmoothingPlan plan;
            plan.probabilities.assign(inst.m(), std::vector<double>(inst.k, p));
            plan.seed = seed;
            auto res = smooth_csp(inst, plan);
            return py::make_tuple(res.instance, res.q);
        },
        py::arg("instance"), py::arg("p"), py::arg("seed"));

    m.def(
        "read_instance",
        [](const std::string& path, const std::string& format) -> py::object {
            auto any = read_instance(path, format_by_name(format));
            if (std::holds_alternative<XorInstance>(any)) return py::cast(std::get<XorInstance>(any));
            return py::cast(std::get<CspInstance>(any));
        },
        py::arg("path"), py::arg("format"));
    m.def(
        "write_instance",
        [](const XorInstance& inst, const std::string& path, const std::string& format) {
            write_instance(inst, path, format_by_name(format));
        },
        py::arg("instance"), py::arg("path"), py::arg("format") = "xor");
    m.def(
        "write_csp_instance",
        [](const CspInstance& inst, const std::string& path, const std::string& format) {
            write_instance(inst, path, format_by_name(format));
        },
        py::arg("instance"), py::arg("path"), py::arg("format") = "cnf");

    m.def(
        "decompose_summary",
        [](const XorInstance& inst, const std::string& eps, long ell) {
            const Hypergraph h = inst.hypergraph();
            const Rat e = rat_from_str(eps);
            const auto bc = decompose(h, e, ell);
            const auto rep = verify_contraction(h, bc, e, ell);
            py::dict out;
            out["discarded"] = bc.discarded.m();
            py::dict levels;
            for (const auto& level : bc.levels)
                levels[py::int_(level.t)] = py::make_tuple(level.bh.p(), level.m());
            out["levels"] = levels;
            out["verified"] = rep.all_pass();
            out["report"] = rep.to_string();
            out["json"] = bc.to_json();
            return out;
        },
        py::arg("instance"), py::arg("eps") = "1/2", py::arg("ell") = 2);

    m.def("compute_D", [](int k, long n, long ell) { return compute_D(k, n, ell).str(); },
          py::arg("k"), py::arg("n"), py::arg("ell"));

    m.def(
        "refute_poly",
        [](const XorInstance& inst, long ell, const std::string& eps, double tau,
           std::size_t dense_cap) {
            RefuteOptions opts;
            opts.dense_cap = dense_cap;
            const auto res = refute_poly(inst, ell, rat_from_str(eps), tau, opts);
            py::dict out;
            out["alg_val"] = res.alg_val;
            out["certificate"] = res.cert.to_json();
            out["levels"] = res.cert.levels.size();
            return out;
        },
        py::arg("instance"), py::arg("ell"), py::arg("eps") = "1/2", py::arg("tau") = 1e-2,
        py::arg("dense_cap") = 4096);

    m.def(
        "refute_csp",
        [](const CspInstance& inst, long ell, const std::string& eps, double tau,
           std::size_t dense_cap) {
            RefuteOptions opts;
            opts.dense_cap = dense_cap;
            const auto res = refute_csp(inst, ell, rat_from_str(eps), tau, opts);
            py::dict out;
            out["alg_val"] = res.alg_val;
            out["t"] = res.t;
            out["delta"] = rat_to_str(res.delta);
            out["certificate"] = res.to_json();
            return out;
        },
        py::arg("instance"), py::arg("ell"), py::arg("eps") = "1/2", py::arg("tau") = 1e-2,
        py::arg("dense_cap") = 4096);

    m.def(
        "replay_certificate",
        [](const std::string& cert_json) {
            const auto replay = replay_certificate(RefutationCertificate::from_json(cert_json));
            return py::make_tuple(replay.ok, replay.recomputed, replay.detail);
        },
        py::arg("certificate_json"));

    m.def("brute_force_val",
          [](const XorInstance& inst) { return rat_to_str(brute_force_val(inst)); });
    m.def("brute_force_val_fraction",
          [](const CspInstance& inst) { return rat_to_str(brute_force_val_fraction(inst)); });

    m.def("or_predicate", &or_predicate, py::arg("k"));
    m.def("parity_predicate", &parity_predicate, py::arg("k"));
    m.def("nae_predicate", &nae_predicate, py::arg("k"));
    m.def("hadamard_q1_predicate", &hadamard_q1_predicate);
    m.def("predicate_from_truth_table", &predicate_from_truth_table, py::arg("bits"),
          py::arg("name") = "");
    m.def("has_t_wise_support", &has_t_wise_support, py::arg("predicate"), py::arg("t"));
    m.def("uniformity_degree", &uniformity_degree, py::arg("predicate"));
    m.def(
        "separating_polynomial",
        [](const Predicate& p, int t) {
            const auto sep = separating_polynomial(p, t);
            py::dict qhat;
            for (const auto& [mask, coeff] : sep.qhat) qhat[py::int_(mask)] = rat_to_str(coeff);
            py::dict out;
            out["t"] = sep.t;
            out["delta"] = rat_to_str(sep.delta);
            out["qhat"] = qhat;
            return out;
        },
        py::arg("predicate"), py::arg("t"));

    m.def(
        "find_even_cover",
        [](const XorInstance& inst, std::size_t max_len, const std::string& strategy,
           std::uint64_t seed) -> py::object {
            CoverSearchOptions opts;
            opts.seed = seed;
            const auto c = find_even_cover(inst.hypergraph(), max_len, strategy_by_name(strategy), opts);
            if (!c) return py::none();
            return py::cast(c->edge_ids);
        },
        py::arg("instance"), py::arg("max_len"), py::arg("strategy") = "gf2-kernel",
        py::arg("seed") = 1);
    m.def(
        "verify_even_cover",
        [](const XorInstance& inst, const std::vector<std::size_t>& ids) {
            const auto check = verify_even_cover(inst.hypergraph(), ids);
            return py::make_tuple(check.ok, check.reason);
        },
        py::arg("instance"), py::arg("edge_ids"));
    m.def(
        "build_fko_witness",
        [](const XorInstance& inst, std::size_t max_len, std::size_t want, std::uint64_t seed) {
            CoverSearchOptions opts;
            opts.seed = seed;
            const auto w = build_fko_witness(inst, max_len, want, CoverStrategy::Gf2Kernel, opts);
            return w.to_json();
        },
        py::arg("instance"), py::arg("max_len"), py::arg("want"), py::arg("seed") = 1);
    m.def(
        "verify_fko_witness",
        [](const XorInstance& inst, const std::string& witness_json) {
            const auto check = verify_fko_witness(inst, FkoWitness::from_json(witness_json));
            py::dict out;
            out["ok"] = check.ok;
            out["reason"] = check.reason;
            out["bound"] = check.bound;
            out["bound_exact"] = rat_to_str(check.bound_exact);
            out["violated_covers"] = check.violated_covers;
            return out;
        },
        py::arg("instance"), py::arg("witness_json"));

    m.def(
        "graph_girth",
        [](int n, const std::vector<std::pair<int, int>>& edges) {
            const auto res = graph_girth({n, edges});
            return py::make_tuple(res.is_finite() ? py::cast(res.length) : py::none(), res.cycle);
        },
        py::arg("n"), py::arg("edges"));

    m.def(
        "wam_experiment",
        [](int n, int mm, long ell, std::uint64_t seed) {
            const auto ex = run_wam_experiment(n, mm, ell, seed);
            py::dict out;
            out["ell_prime"] = ex.ell_prime;
            out["estimate"] = ex.estimate;
            out["expected_row_ones"] = ex.expected_row_ones;
            out["submatrix_rows_ok"] = ex.submatrix_rows_ok;
            return out;
        },
        py::arg("n"), py::arg("m"), py::arg("ell"), py::arg("seed") = 1);

    m.attr("__version__") = "0.1.0";
}
