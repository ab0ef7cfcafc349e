#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "stvf/formulations.hpp"
#include "stvf/rng.hpp"

namespace stvf {

struct ModeConstants {
    double lambda = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

struct SpectrumReport {
    FormulationId formulation = FormulationId::PoissonWeak;
    std::vector<ModeConstants> per_mode;
    double global_beta = 0.0;
    double global_gamma = 0.0;
    // resolution echo; nt/T stay 0 for the scalar Poisson formulations
    int modes = 0;
    int nt = 0;
    double T = 0.0;
};

// Extreme singular values of L_V^{-1} B L_U^{-T} per mode via the
// generalized eigenproblem (B^T G_V^{-1} B) x = sigma^2 G_U x. Rejects
// formulations with more trial than test dofs, whose discrete inf-sup is
// identically zero.
std::pair<double, double> infsup_constants(const FormulationInstance& inst);
SpectrumReport infsup_spectrum(const std::vector<FormulationInstance>& instances,
                               int nt = 0, double T = 0.0);

// ||B u||_{V'} summed over modes; equals the trial norm in the extension
double extended_norm(const ModalField& u, const std::vector<FormulationInstance>& instances,
                     const TimeGrid& grid);

// per mode v_k = G_V^{-1} B u_k; realizes <Bu, v> = ||v||_V^2 = ||Bu||_{V'}^2
ModalField supremizer(const ModalField& u, const std::vector<FormulationInstance>& instances,
                      const TimeGrid& grid);

// ||B^T G_V^{-1} B - G_U - C||_max / ||G_U||_max for the two ids carrying a
// representation formula
double norm_identity_residual(FormulationId id, double lambda, const TimeGrid& grid);

struct CounterexampleRow {
    int k = 0;
    double lambda = 0.0;
    double u_norm_h = 0.0;
    double u_norm_exact = 0.0;
    double f_norm_h = 0.0;
    double f_norm_exact = 0.0;
    double ratio = 0.0; // f_norm_h / u_norm_h
    double mixed_h = 0.0;
    double mixed_exact = 0.0;
};

std::vector<CounterexampleRow> counterexample_scan(const std::vector<int>& ks,
                                                   const TimeGrid& grid,
                                                   const SpatialSpectrum& spec);

// Sparse route for the k -> infinity mixed-term limit; no Gram assembly, so
// it stays cheap at large nt
struct MixedLimitRow {
    int k = 0;
    double lambda = 0.0;
    double mixed_h = 0.0;
    double mixed_exact = 0.0;
    double limit = 0.0; // -T^3/3
};

MixedLimitRow counterexample_mixed(int k, const TimeGrid& grid,
                                   const SpatialSpectrum& spec);

enum class StabilityKind { WaveStrongChat, WaveWeakTSqrt2 };

struct ConstantReport {
    std::string name;
    double bound = 0.0;
    double observed = 0.0;
    bool satisfied = false; // observed <= bound * (1 + 1e-6)
    std::string note;
};

// sup_f energy(u_f)/||f||_{L2}^2 over all modes as a generalized eigenvalue.
// WaveStrongChat measures the second-order energy of u1 against T^2/2 through
// an energy-conservative square restriction of the first-order system (see
// ConstantReport.note); WaveWeakTSqrt2 measures the trial-space norm of the
// weak solution against (T/sqrt(2))^2.
ConstantReport stability_constant(StabilityKind kind, const TimeGrid& grid,
                                  const SpatialSpectrum& spec);

struct EmbeddingReport {
    ConstantReport cq;        // ||u||_{L2(Q)^2} vs extended norm, bound C_Q
    ConstantReport extension; // extended norm vs trial norm, bound sqrt(2)
    int samples = 0;
    int violations = 0;
};

// C_Q = sqrt(max{1, C_Omega^2} + max{3T^2, (3/2)T^4})
double embedding_cq(double T, const SpatialSpectrum& spec);

EmbeddingReport embedding_check(int samples, const TimeGrid& grid,
                                const SpatialSpectrum& spec, std::uint64_t seed);

// Max-entry deviation between the ultra-weak operator and the flip/reversal
// conjugate of the strong one. omit_d_sign_flip negates the derivative blocks
// of the prediction, the negative control for the identity.
double adjoint_conjugation_check(double lambda, const TimeGrid& grid,
                                 bool omit_d_sign_flip = false);

struct MinresSolution {
    ModalField u;
    double residual = 0.0; // ||B u - f||_{V'} over all modes
};

// Normal-equation least squares per mode; restricted to the time-dependent
// formulations with at least as many test as trial dofs
MinresSolution minres_solve(const std::vector<Eigen::VectorXd>& loads,
                            const std::vector<FormulationInstance>& instances,
                            const SpatialSpectrum& spec, const TimeGrid& grid);

// One random consistent problem: f = B u0, returns
// | ||B(u - u0)||_{V'} - ||B u - f||_{V'} | / ||f||_{V'}
double error_residual_gap(const FormulationInstance& inst, GaussianSource& rng);

} // namespace stvf
