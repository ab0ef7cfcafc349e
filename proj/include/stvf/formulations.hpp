#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stvf/gram.hpp"
#include "stvf/modal_field.hpp"
#include "stvf/spectrum.hpp"
#include "stvf/time_grid.hpp"

namespace stvf {

enum class FormulationId {
    PoissonStrong,
    PoissonWeak,
    PoissonUltraweak,
    HeatStrongT,
    HeatWeakT,
    WaveStrongT,
    WaveWeakT,
    WaveUltraweakT,
};

const char* formulation_name(FormulationId id);
FormulationId formulation_from_name(const std::string& name);
bool formulation_is_time_dependent(FormulationId id);

// Per-mode operator triple. B rows are test dofs, cols are trial dofs.
// extended_correction is the C with B^T G_V^{-1} B = G_U + C exact; it exists
// only where a norm representation formula does (heat and wave strong-in-time).
struct FormulationInstance {
    FormulationId id = FormulationId::PoissonWeak;
    double lambda = 0.0;
    Eigen::MatrixXd B;
    GramMatrix G_U;
    GramMatrix G_V;
    std::optional<Eigen::MatrixXd> extended_correction;
    SpaceTimeNormSpec trial_spec;
    SpaceTimeNormSpec test_spec;

    std::vector<Constraint> trial_constraints() const;
    std::vector<Constraint> test_constraints() const;
};

FormulationInstance assemble_formulation(FormulationId id, double lambda,
                                         const TimeGrid& grid);
// Poisson ids are scalar per mode and take no grid
FormulationInstance assemble_formulation(FormulationId id, double lambda);

// Closed forms of the single-mode family that defeats boundedly-invertible
// extension of the strong wave operator. Squared norms plus the cross term;
// identity u_norm_sq + 2*mixed - f_norm_sq = 0 holds exactly.
struct CounterexampleForms {
    double u_norm_sq = 0.0; // ||u^k||^2 in the graph-type trial norm
    double f_norm_sq = 0.0; // ||f^k||^2 in the dual test norm
    double mixed = 0.0;     // <d_t u, J u> pairing
};

CounterexampleForms counterexample_closed_forms(double lambda, double T);

// Interpolated trial field u^k = ((sin(at) - at cos(at))/lambda, t sin(at))
// with a = sqrt(lambda_k), plus the test-space load of f^k = (0, 2 sin(at))
// for the wave strong-in-time formulation. k is 1-based.
struct Counterexample {
    ModalField u;
    Eigen::VectorXd load;
    CounterexampleForms closed;
};

Counterexample counterexample_field(int k, const TimeGrid& grid,
                                    const SpatialSpectrum& spec);

// Test-space load <f, v> per component; the catalog pairings carry no extra
// spatial weight (dual weights sit in G_V).
Eigen::VectorXd assemble_rhs(const std::vector<Integrand>& f, FormulationId id,
                             double lambda, const TimeGrid& grid,
                             int quad_order = 5);

} // namespace stvf
