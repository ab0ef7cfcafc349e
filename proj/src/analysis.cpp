#include "stvf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "stvf/errors.hpp"

namespace stvf {

namespace {

Eigen::MatrixXd symmetrized(Eigen::MatrixXd A) {
    return 0.5 * (A + A.transpose()).eval();
}

// largest eigenvalue of A x = mu G x with A symmetric PSD, G SPD
double top_generalized_eigenvalue(const Eigen::MatrixXd& A, const Eigen::MatrixXd& G,
                                  const char* where) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        A, G, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success)
        throw NumericError(std::string(where) + ": generalized eigensolver failed");
    return std::max(0.0, es.eigenvalues().maxCoeff());
}

} // namespace

std::pair<double, double> infsup_constants(const FormulationInstance& inst) {
    if (inst.B.cols() > inst.B.rows()) {
        std::ostringstream msg;
        msg << "infsup_constants: " << formulation_name(inst.id)
            << " has more trial than test dofs; the discrete inf-sup over the"
               " full trial space is identically zero";
        throw std::invalid_argument(msg.str());
    }
    const Eigen::MatrixXd N =
        symmetrized(inst.B.transpose() * inst.G_V.factor().solve_matrix(inst.B));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        N, inst.G_U.matrix(), Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "infsup_constants: eigensolver failed for " << formulation_name(inst.id)
            << " at lambda=" << inst.lambda;
        throw NumericError(msg.str());
    }
    const auto& ev = es.eigenvalues();
    return {std::sqrt(std::max(0.0, ev(0))),
            std::sqrt(std::max(0.0, ev(ev.size() - 1)))};
}

SpectrumReport infsup_spectrum(const std::vector<FormulationInstance>& instances,
                               int nt, double T) {
    if (instances.empty())
        throw std::invalid_argument("infsup_spectrum: empty instance list");
    SpectrumReport rep;
    rep.formulation = instances.front().id;
    rep.modes = static_cast<int>(instances.size());
    rep.nt = nt;
    rep.T = T;
    rep.global_beta = std::numeric_limits<double>::infinity();
    rep.global_gamma = 0.0;
    for (const auto& inst : instances) {
        const auto [beta, gamma] = infsup_constants(inst);
        rep.per_mode.push_back({inst.lambda, beta, gamma});
        rep.global_beta = std::min(rep.global_beta, beta);
        rep.global_gamma = std::max(rep.global_gamma, gamma);
    }
    return rep;
}

double extended_norm(const ModalField& u, const std::vector<FormulationInstance>& instances,
                     const TimeGrid& grid) {
    validate_field(u, grid);
    if (u.modes() != static_cast<int>(instances.size()))
        throw std::invalid_argument("extended_norm: one instance per mode required");
    double acc = 0.0;
    for (int k = 0; k < u.modes(); ++k) {
        const auto& inst = instances[static_cast<std::size_t>(k)];
        const auto& x = u.coeffs[static_cast<std::size_t>(k)];
        if (x.size() != inst.B.cols())
            throw std::invalid_argument("extended_norm: field shape does not match the trial space");
        acc += inst.G_V.factor().forward(inst.B * x).squaredNorm();
    }
    return std::sqrt(acc);
}

ModalField supremizer(const ModalField& u, const std::vector<FormulationInstance>& instances,
                      const TimeGrid& grid) {
    validate_field(u, grid);
    if (u.modes() != static_cast<int>(instances.size()))
        throw std::invalid_argument("supremizer: one instance per mode required");
    ModalField v;
    v.spectrum = u.spectrum;
    v.components = instances.front().test_spec.component_count();
    v.constraints = instances.front().test_constraints();
    for (int k = 0; k < u.modes(); ++k) {
        const auto& inst = instances[static_cast<std::size_t>(k)];
        v.coeffs.push_back(
            riesz_apply_inverse(inst.B * u.coeffs[static_cast<std::size_t>(k)], inst.G_V));
    }
    return v;
}

double norm_identity_residual(FormulationId id, double lambda, const TimeGrid& grid) {
    const FormulationInstance inst = assemble_formulation(id, lambda, grid);
    if (!inst.extended_correction) {
        std::ostringstream msg;
        msg << "norm_identity_residual: " << formulation_name(id)
            << " carries no norm representation formula";
        throw std::invalid_argument(msg.str());
    }
    const Eigen::MatrixXd N = inst.B.transpose() * inst.G_V.factor().solve_matrix(inst.B);
    const Eigen::MatrixXd R = N - inst.G_U.matrix() - *inst.extended_correction;
    return R.cwiseAbs().maxCoeff() / inst.G_U.matrix().cwiseAbs().maxCoeff();
}

std::vector<CounterexampleRow> counterexample_scan(const std::vector<int>& ks,
                                                   const TimeGrid& grid,
                                                   const SpatialSpectrum& spec) {
    std::vector<CounterexampleRow> rows;
    for (int k : ks) {
        const Counterexample ce = counterexample_field(k, grid, spec);
        const double lambda = spec.lambda(k - 1);
        const FormulationInstance inst =
            assemble_formulation(FormulationId::WaveStrongT, lambda, grid);
        const auto& x = ce.u.coeffs[static_cast<std::size_t>(k - 1)];

        CounterexampleRow row;
        row.k = k;
        row.lambda = lambda;
        row.u_norm_h = std::sqrt(x.dot(inst.G_U.matrix() * x));
        row.mixed_h = 0.5 * x.dot(*inst.extended_correction * x);
        row.f_norm_h = dual_norm(ce.load, inst.G_V);
        row.u_norm_exact = std::sqrt(ce.closed.u_norm_sq);
        row.f_norm_exact = std::sqrt(ce.closed.f_norm_sq);
        row.mixed_exact = ce.closed.mixed;
        row.ratio = row.f_norm_h / row.u_norm_h;
        rows.push_back(row);
    }
    return rows;
}

MixedLimitRow counterexample_mixed(int k, const TimeGrid& grid,
                                   const SpatialSpectrum& spec) {
    if (k < 1 || k > spec.size())
        throw std::invalid_argument("counterexample_mixed: mode index out of range");
    const double lambda = spec.lambda(k - 1);
    const double a = std::sqrt(lambda);
    const Eigen::VectorXd u1 = interpolate_nodal(
        [&](double t) { return (std::sin(a * t) - a * t * std::cos(a * t)) / lambda; },
        grid, Constraint::Left);
    const Eigen::VectorXd u2 = interpolate_nodal(
        [&](double t) { return t * std::sin(a * t); }, grid, Constraint::Left);
    const Eigen::SparseMatrix<double> Dc =
        constrain(grid.D, Constraint::Left, Constraint::Left);

    MixedLimitRow row;
    row.k = k;
    row.lambda = lambda;
    // u1^T (Dc - Dc^T) u2 without forming the difference
    row.mixed_h = u1.dot(Dc * u2) - (Dc * u1).dot(u2);
    row.mixed_exact = counterexample_closed_forms(lambda, grid.T).mixed;
    row.limit = -grid.T * grid.T * grid.T / 3.0;
    return row;
}

namespace {

// P0-test moment matrices on the trial grid: D0[e][j] = int_e phi_j',
// M0[e][j] = int_e phi_j
void p0_matrices(const TimeGrid& grid, Eigen::MatrixXd& D0, Eigen::MatrixXd& M0) {
    const int nt = grid.nt;
    const double h = grid.h();
    D0 = Eigen::MatrixXd::Zero(nt, nt + 1);
    M0 = Eigen::MatrixXd::Zero(nt, nt + 1);
    for (int e = 0; e < nt; ++e) {
        D0(e, e) = -1.0;
        D0(e, e + 1) = 1.0;
        M0(e, e) += h / 2.0;
        M0(e, e + 1) += h / 2.0;
    }
}

// Square restriction of the first-order system with piecewise-constant test
// functions (energy-conservative trapezoidal stepping). The least-squares
// route is unusable here: its u1 component carries grid-scale noise whose
// primal energy diverges under refinement while the dual-norm residual stays
// small, so the energy quotient would blow past the continuum bound.
double chat_mode_value(double lambda, const TimeGrid& grid) {
    const int nt = grid.nt;
    Eigen::MatrixXd D0, M0;
    p0_matrices(grid, D0, M0);
    const Eigen::MatrixXd Dc = D0.rightCols(nt);
    const Eigen::MatrixXd Mc = M0.rightCols(nt);

    Eigen::MatrixXd Bsq(2 * nt, 2 * nt);
    Bsq.topLeftCorner(nt, nt) = Dc;
    Bsq.topRightCorner(nt, nt) = -Mc;
    Bsq.bottomLeftCorner(nt, nt) = lambda * Mc;
    Bsq.bottomRightCorner(nt, nt) = Dc;

    // load basis: f = nodal hat functions entering the second equation
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * nt, nt + 1);
    L.bottomRows(nt) = M0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Bsq);
    const Eigen::MatrixXd X = lu.solve(L);
    const double rel = (Bsq * X - L).norm() / L.norm();
    if (rel > 1e-8)
        throw NumericError("stability_constant: time-stepping system is numerically singular");

    const Eigen::MatrixXd U1 = X.topRows(nt);
    const Eigen::MatrixXd E =
        dense(constrain(grid.K, Constraint::Left, Constraint::Left)) +
        lambda * dense(constrain(grid.M, Constraint::Left, Constraint::Left));
    const Eigen::MatrixXd A = symmetrized(U1.transpose() * E * U1);
    return top_generalized_eigenvalue(A, dense(grid.M), "stability_constant");
}

double weak_mode_value(double lambda, const TimeGrid& grid) {
    const FormulationInstance inst =
        assemble_formulation(FormulationId::WaveWeakT, lambda, grid);
    // loads <f, v_i> for nodal f
    const Eigen::MatrixXd L = dense(constrain(grid.M, Constraint::Right, Constraint::None));
    const Eigen::MatrixXd N =
        symmetrized(inst.B.transpose() * inst.G_V.factor().solve_matrix(inst.B));
    const CholeskyFactor nf = CholeskyFactor::compute(N);
    const Eigen::MatrixXd X =
        nf.solve_matrix(inst.B.transpose() * inst.G_V.factor().solve_matrix(L));
    const Eigen::MatrixXd A = symmetrized(X.transpose() * inst.G_U.matrix() * X);
    return top_generalized_eigenvalue(A, dense(grid.M), "stability_constant");
}

} // namespace

ConstantReport stability_constant(StabilityKind kind, const TimeGrid& grid,
                                  const SpatialSpectrum& spec) {
    const double T = grid.T;
    ConstantReport rep;
    rep.bound = T * T / 2.0;

    double best = 0.0;
    for (int k = 0; k < spec.size(); ++k) {
        const double lambda = spec.lambda(k);
        const double value = (kind == StabilityKind::WaveStrongChat)
                                 ? chat_mode_value(lambda, grid)
                                 : weak_mode_value(lambda, grid);
        best = std::max(best, value);
    }
    rep.observed = best;
    rep.satisfied = rep.observed <= rep.bound * (1.0 + 1e-6);
    if (kind == StabilityKind::WaveStrongChat) {
        rep.name = "C_hat";
        rep.note = "second-order energy of u1 via the trapezoidal square restriction"
                   " of the first-order system";
    } else {
        rep.name = "T_over_sqrt2";
        rep.note = "bound checked in the trial-space norm of the weak formulation";
    }
    const double rec = 8.0 * std::sqrt(spec.lambdas.back()) * T / std::numbers::pi;
    if (static_cast<double>(grid.nt) < rec) {
        std::ostringstream msg;
        msg << "; under-resolved: nt=" << grid.nt << " below the recommended "
            << static_cast<int>(std::ceil(rec));
        rep.note += msg.str();
    }
    return rep;
}

double embedding_cq(double T, const SpatialSpectrum& spec) {
    const double comega = poincare_constant(spec);
    return std::sqrt(std::max(1.0, comega * comega) +
                     std::max(3.0 * T * T, 1.5 * T * T * T * T));
}

EmbeddingReport embedding_check(int samples, const TimeGrid& grid,
                                const SpatialSpectrum& spec, std::uint64_t seed) {
    if (samples < 1)
        throw std::invalid_argument("embedding_check: sample count must be positive");

    std::vector<FormulationInstance> instances;
    for (int k = 0; k < spec.size(); ++k)
        instances.push_back(
            assemble_formulation(FormulationId::WaveStrongT, spec.lambda(k), grid));
    const Eigen::MatrixXd Mt = dense(constrain(grid.M, Constraint::Left, Constraint::Left));
    const double cq = embedding_cq(grid.T, spec);
    const double sqrt2 = std::numbers::sqrt2;

    GaussianSource rng(seed);
    const int nt = grid.nt;
    EmbeddingReport rep;
    rep.samples = samples;
    double worst_l2 = 0.0, worst_ext = 0.0;
    Eigen::VectorXd x(2 * nt);
    for (int s = 0; s < samples; ++s) {
        double l2_sq = 0.0, ubar_sq = 0.0, uhat_sq = 0.0;
        for (const auto& inst : instances) {
            // mode-decaying draws keep the trial norms balanced across modes
            const double sd = 1.0 / std::sqrt(inst.lambda);
            for (int i = 0; i < 2 * nt; ++i) x[i] = sd * rng.normal();
            l2_sq += x.head(nt).dot(Mt * x.head(nt)) + x.tail(nt).dot(Mt * x.tail(nt));
            ubar_sq += inst.G_V.factor().forward(inst.B * x).squaredNorm();
            uhat_sq += x.dot(inst.G_U.matrix() * x);
        }
        const double l2 = std::sqrt(l2_sq);
        const double ubar = std::sqrt(ubar_sq);
        const double uhat = std::sqrt(uhat_sq);
        if (l2 > cq * ubar * (1.0 + 1e-9)) ++rep.violations;
        if (ubar > sqrt2 * uhat * (1.0 + 1e-9)) ++rep.violations;
        worst_l2 = std::max(worst_l2, l2 / ubar);
        worst_ext = std::max(worst_ext, ubar / uhat);
    }

    rep.cq.name = "C_Q";
    rep.cq.bound = cq;
    rep.cq.observed = worst_l2;
    rep.cq.satisfied = worst_l2 <= cq * (1.0 + 1e-6);
    rep.extension.name = "sqrt2_extension";
    rep.extension.bound = sqrt2;
    rep.extension.observed = worst_ext;
    rep.extension.satisfied = worst_ext <= sqrt2 * (1.0 + 1e-6);
    return rep;
}

double adjoint_conjugation_check(double lambda, const TimeGrid& grid,
                                 bool omit_d_sign_flip) {
    const FormulationInstance strong =
        assemble_formulation(FormulationId::WaveStrongT, lambda, grid);
    const FormulationInstance uw =
        assemble_formulation(FormulationId::WaveUltraweakT, lambda, grid);
    const int nt = grid.nt;

    const Eigen::MatrixXd Bt = strong.B.transpose(); // 2nt x 2(nt+1)
    const Eigen::MatrixXd F = flip(Bt);
    Eigen::MatrixXd pred(2 * nt, 2 * (nt + 1));
    // time reversal acts per block as full index reversal; block splits follow
    // the swapped constraint patterns (trial left, test none)
    for (int bi = 0; bi < 2; ++bi)
        for (int bj = 0; bj < 2; ++bj)
            pred.block(bi * nt, bj * (nt + 1), nt, nt + 1) =
                F.block(bi * nt, bj * (nt + 1), nt, nt + 1).reverse();
    if (omit_d_sign_flip) {
        // negative control: reversal without the sign change of the
        // derivative blocks
        pred.topLeftCorner(nt, nt + 1) *= -1.0;
        pred.bottomRightCorner(nt, nt + 1) *= -1.0;
    }
    if (pred.rows() != uw.B.rows() || pred.cols() != uw.B.cols())
        throw std::invalid_argument("adjoint_conjugation_check: constraint patterns do not match");
    return (pred - uw.B).cwiseAbs().maxCoeff();
}

MinresSolution minres_solve(const std::vector<Eigen::VectorXd>& loads,
                            const std::vector<FormulationInstance>& instances,
                            const SpatialSpectrum& spec, const TimeGrid& grid) {
    if (instances.empty() || loads.size() != instances.size())
        throw std::invalid_argument("minres_solve: one load per instance required");
    if (static_cast<int>(instances.size()) != spec.size())
        throw std::invalid_argument("minres_solve: one instance per spectrum mode required");
    if (!formulation_is_time_dependent(instances.front().id))
        throw std::invalid_argument("minres_solve: scalar Poisson modes solve directly");

    MinresSolution sol;
    sol.u.spectrum = spec;
    sol.u.components = instances.front().trial_spec.component_count();
    sol.u.constraints = instances.front().trial_constraints();

    double acc = 0.0;
    for (std::size_t k = 0; k < instances.size(); ++k) {
        const auto& inst = instances[k];
        const auto& f = loads[k];
        if (f.size() != inst.B.rows())
            throw std::invalid_argument("minres_solve: load shape does not match the test space");
        const Eigen::MatrixXd N =
            symmetrized(inst.B.transpose() * inst.G_V.factor().solve_matrix(inst.B));
        Eigen::VectorXd u_k;
        try {
            const CholeskyFactor nf = CholeskyFactor::compute(N);
            u_k = nf.solve(inst.B.transpose() * inst.G_V.factor().solve(f));
        } catch (const AssemblyError&) {
            std::ostringstream msg;
            msg << "minres_solve: singular normal matrix for " << formulation_name(inst.id)
                << " at mode " << k + 1 << " (underdetermined trial space)";
            throw NumericError(msg.str());
        }
        acc += inst.G_V.factor().forward(inst.B * u_k - f).squaredNorm();
        sol.u.coeffs.push_back(std::move(u_k));
    }
    sol.residual = std::sqrt(acc);
    return sol;
}

double error_residual_gap(const FormulationInstance& inst, GaussianSource& rng) {
    const Eigen::Index n = inst.B.cols();
    Eigen::VectorXd u(n), u0(n);
    for (Eigen::Index i = 0; i < n; ++i) u[i] = rng.normal();
    for (Eigen::Index i = 0; i < n; ++i) u0[i] = rng.normal();
    const Eigen::VectorXd f = inst.B * u0;
    const double err = dual_norm(inst.B * (u - u0), inst.G_V);
    const double res = dual_norm(inst.B * u - f, inst.G_V);
    const double fn = dual_norm(f, inst.G_V);
    return std::abs(err - res) / (fn > 0.0 ? fn : 1.0);
}

} // namespace stvf
