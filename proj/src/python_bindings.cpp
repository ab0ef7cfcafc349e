#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stvf/analysis.hpp"
#include "stvf/experiments.hpp"
#include "stvf/version.hpp"

namespace py = pybind11;

namespace {

using namespace stvf;

FormulationInstance instance_for(const std::string& name, double lambda,
                                 double T, int nt) {
    const FormulationId id = formulation_from_name(name);
    if (formulation_is_time_dependent(id))
        return assemble_formulation(id, lambda, build_time_grid(T, nt));
    return assemble_formulation(id, lambda);
}

py::dict report_dict(const ConstantReport& rep) {
    py::dict d;
    d["name"] = rep.name;
    d["bound"] = rep.bound;
    d["observed"] = rep.observed;
    d["satisfied"] = rep.satisfied;
    d["note"] = rep.note;
    return d;
}

py::object cell_to_py(const Cell& cell) {
    switch (cell.kind) {
        case Cell::Kind::Null: return py::none();
        case Cell::Kind::Text: return py::str(cell.text);
        case Cell::Kind::Number:
            if (cell.text == "true") return py::bool_(true);
            if (cell.text == "false") return py::bool_(false);
            return py::float_(std::strtod(cell.text.c_str(), nullptr));
    }
    return py::none();
}

py::dict result_dict(const ExperimentResult& res) {
    py::dict out;
    out["experiment"] = res.experiment;
    out["columns"] = res.columns;
    py::list rows;
    for (const auto& row : res.rows) {
        py::list r;
        for (const auto& cell : row) r.append(cell_to_py(cell));
        rows.append(r);
    }
    out["rows"] = rows;
    py::list summary;
    for (const auto& a : res.summary) {
        py::dict d;
        d["name"] = a.name;
        d["passed"] = a.passed;
        d["value"] = a.value;
        d["threshold"] = a.threshold;
        d["detail"] = a.detail;
        summary.append(d);
    }
    out["summary"] = summary;
    out["passed"] = res.passed();
    return out;
}

ExperimentConfig config_from_args(const std::string& name, std::optional<double> T,
                                  std::optional<int> modes, std::optional<int> nt,
                                  std::optional<std::vector<double>> domain_lengths,
                                  std::optional<std::uint64_t> seed,
                                  std::optional<int> samples) {
    ExperimentConfig cfg;
    cfg.experiment = name;
    if (T) { cfg.T = *T; cfg.T_set = true; }
    if (modes) { cfg.modes = *modes; cfg.modes_set = true; }
    if (nt) { cfg.nt = *nt; cfg.nt_set = true; }
    if (domain_lengths) { cfg.domain_lengths = *domain_lengths; cfg.domain_set = true; }
    if (seed) { cfg.seed = *seed; cfg.seed_set = true; }
    if (samples) { cfg.samples = *samples; cfg.samples_set = true; }
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "modal space-time variational formulation workbench";
    m.attr("__version__") = kVersion;

    m.def("formulations", [] {
        std::vector<std::string> names;
        for (FormulationId id :
             {FormulationId::PoissonStrong, FormulationId::PoissonWeak,
              FormulationId::PoissonUltraweak, FormulationId::HeatStrongT,
              FormulationId::HeatWeakT, FormulationId::WaveStrongT,
              FormulationId::WaveWeakT, FormulationId::WaveUltraweakT})
            names.push_back(formulation_name(id));
        return names;
    }, "names of the formulation catalog");

    m.def("experiments", [] {
        std::vector<std::string> names;
        for (const auto& info : experiment_registry()) names.push_back(info.name);
        return names;
    }, "names of the experiment registry");

    m.def(
        "infsup_constants",
        [](const std::string& formulation, double lambda, double T, int nt) {
            return infsup_constants(instance_for(formulation, lambda, T, nt));
        },
        py::arg("formulation"), py::arg("lambda_"), py::arg("T") = 1.0,
        py::arg("nt") = 256,
        "per-mode (beta, gamma) of the formulation at the given eigenvalue");

    m.def(
        "norm_identity_residual",
        [](const std::string& formulation, double lambda, double T, int nt) {
            return norm_identity_residual(formulation_from_name(formulation), lambda,
                                          build_time_grid(T, nt));
        },
        py::arg("formulation"), py::arg("lambda_"), py::arg("T") = 1.0,
        py::arg("nt") = 256,
        "relative max-entry residual of the trial-norm representation formula");

    m.def(
        "counterexample_closed_forms",
        [](double lambda, double T) {
            const CounterexampleForms f = counterexample_closed_forms(lambda, T);
            return py::make_tuple(f.u_norm_sq, f.f_norm_sq, f.mixed);
        },
        py::arg("lambda_"), py::arg("T") = 1.0,
        "(||u||^2, ||f||^2, mixed) closed forms for one wave mode");

    m.def(
        "adjoint_conjugation_check",
        [](double lambda, double T, int nt, bool omit_d_sign_flip) {
            return adjoint_conjugation_check(lambda, build_time_grid(T, nt),
                                             omit_d_sign_flip);
        },
        py::arg("lambda_"), py::arg("T") = 1.0, py::arg("nt") = 16,
        py::arg("omit_d_sign_flip") = false,
        "max entry deviation of the ultra-weak operator from the conjugated"
        " strong adjoint");

    m.def(
        "embedding_cq",
        [](double T, const std::vector<double>& domain_lengths, int modes) {
            return embedding_cq(T, build_box_spectrum(domain_lengths, modes));
        },
        py::arg("T") = 1.0, py::arg("domain_lengths") = std::vector<double>{1.0},
        py::arg("modes") = 16, "embedding constant C_Q of the space-time cylinder");

    m.def(
        "stability_constant",
        [](const std::string& kind, double T, int nt,
           const std::vector<double>& domain_lengths, int modes) {
            StabilityKind k;
            if (kind == "wave-chat") k = StabilityKind::WaveStrongChat;
            else if (kind == "wave-weak") k = StabilityKind::WaveWeakTSqrt2;
            else throw std::invalid_argument(
                "stability kind must be 'wave-chat' or 'wave-weak'");
            return report_dict(stability_constant(k, build_time_grid(T, nt),
                                                  build_box_spectrum(domain_lengths,
                                                                     modes)));
        },
        py::arg("kind"), py::arg("T") = 1.0, py::arg("nt") = 256,
        py::arg("domain_lengths") = std::vector<double>{1.0}, py::arg("modes") = 8,
        "observed stability constant against its bound");

    m.def(
        "run_experiment",
        [](const std::string& name, std::optional<double> T, std::optional<int> modes,
           std::optional<int> nt, std::optional<std::vector<double>> domain_lengths,
           std::optional<std::uint64_t> seed, std::optional<int> samples) {
            return result_dict(run_experiment(config_from_args(
                name, T, modes, nt, domain_lengths, seed, samples)));
        },
        py::arg("name"), py::arg("T") = py::none(), py::arg("modes") = py::none(),
        py::arg("nt") = py::none(), py::arg("domain_lengths") = py::none(),
        py::arg("seed") = py::none(), py::arg("samples") = py::none(),
        "run a registered experiment; returns columns, rows and the summary");

    m.def(
        "convergence_study",
        [](const std::string& name, int nt_doublings, int mode_doublings,
           std::optional<double> T, std::optional<int> modes, std::optional<int> nt,
           std::optional<std::vector<double>> domain_lengths,
           std::optional<std::uint64_t> seed, std::optional<int> samples) {
            return result_dict(convergence_study(
                config_from_args(name, T, modes, nt, domain_lengths, seed, samples),
                StudyRefinement{nt_doublings, mode_doublings}));
        },
        py::arg("name"), py::arg("nt_doublings"), py::arg("mode_doublings") = 0,
        py::arg("T") = py::none(), py::arg("modes") = py::none(),
        py::arg("nt") = py::none(), py::arg("domain_lengths") = py::none(),
        py::arg("seed") = py::none(), py::arg("samples") = py::none(),
        "rerun an experiment over a refinement ladder");
}
