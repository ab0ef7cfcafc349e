#include "stvf/formulations.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "stvf/errors.hpp"

namespace stvf {

namespace {

struct NameEntry {
    FormulationId id;
    const char* name;
};

constexpr NameEntry kNames[] = {
    {FormulationId::PoissonStrong, "poisson_strong"},
    {FormulationId::PoissonWeak, "poisson_weak"},
    {FormulationId::PoissonUltraweak, "poisson_ultraweak"},
    {FormulationId::HeatStrongT, "heat_strong_t"},
    {FormulationId::HeatWeakT, "heat_weak_t"},
    {FormulationId::WaveStrongT, "wave_strong_t"},
    {FormulationId::WaveWeakT, "wave_weak_t"},
    {FormulationId::WaveUltraweakT, "wave_ultraweak_t"},
};

Eigen::MatrixXd constrained(const Eigen::SparseMatrix<double>& A,
                            Constraint rows, Constraint cols) {
    return dense(constrain(A, rows, cols));
}

NormTerm mass(SobolevWeight w) { return NormTerm{TimePart::Mass, w}; }
NormTerm stiffness(SobolevWeight w) { return NormTerm{TimePart::Stiffness, w}; }
NormTerm deriv_dual(SobolevWeight w) {
    return NormTerm{TimePart::DerivativeDual, w, Constraint::None};
}

} // namespace

const char* formulation_name(FormulationId id) {
    for (const auto& e : kNames)
        if (e.id == id) return e.name;
    throw std::invalid_argument("formulation_name: unknown formulation id");
}

FormulationId formulation_from_name(const std::string& name) {
    for (const auto& e : kNames)
        if (name == e.name) return e.id;
    throw std::invalid_argument("formulation_from_name: unknown formulation '" + name + "'");
}

bool formulation_is_time_dependent(FormulationId id) {
    return id != FormulationId::PoissonStrong && id != FormulationId::PoissonWeak &&
           id != FormulationId::PoissonUltraweak;
}

std::vector<Constraint> FormulationInstance::trial_constraints() const {
    std::vector<Constraint> out;
    for (const auto& c : trial_spec.components) out.push_back(c.constraint);
    return out;
}

std::vector<Constraint> FormulationInstance::test_constraints() const {
    std::vector<Constraint> out;
    for (const auto& c : test_spec.components) out.push_back(c.constraint);
    return out;
}

namespace {

FormulationInstance poisson_instance(FormulationId id, double lambda) {
    FormulationInstance inst;
    inst.id = id;
    inst.lambda = lambda;
    inst.B = Eigen::MatrixXd::Constant(1, 1, lambda);
    double wu = 0.0, wv = 0.0;
    switch (id) {
    case FormulationId::PoissonStrong:
        wu = weight_value(SobolevWeight::Graph, lambda);
        wv = 1.0;
        break;
    case FormulationId::PoissonWeak:
        wu = wv = weight_value(SobolevWeight::H1_0, lambda);
        break;
    case FormulationId::PoissonUltraweak:
        wu = 1.0;
        wv = weight_value(SobolevWeight::Graph, lambda);
        break;
    default:
        throw std::invalid_argument("assemble_formulation: time-dependent id needs a grid");
    }
    inst.G_U = GramMatrix(Eigen::MatrixXd::Constant(1, 1, wu));
    inst.G_V = GramMatrix(Eigen::MatrixXd::Constant(1, 1, wv));
    return inst;
}

FormulationInstance heat_strong(double lambda, const TimeGrid& grid) {
    FormulationInstance inst;
    inst.id = FormulationId::HeatStrongT;
    inst.lambda = lambda;
    inst.trial_spec.components = {
        {{deriv_dual(SobolevWeight::Hminus1), mass(SobolevWeight::H1_0)}, Constraint::Left}};
    inst.test_spec.components = {{{mass(SobolevWeight::H1_0)}, Constraint::None}};

    inst.B = constrained(grid.D, Constraint::None, Constraint::Left) +
             lambda * constrained(grid.M, Constraint::None, Constraint::Left);
    inst.G_U = assemble_gram(inst.trial_spec, lambda, grid);
    inst.G_V = assemble_gram(inst.test_spec, lambda, grid);

    // C = e_T e_T^T on the left-constrained trial space; the discrete trace
    // term from D + D^T = eT eT^T - e0 e0^T with e0 removed by the constraint
    Eigen::VectorXd eT = Eigen::VectorXd::Zero(grid.nt);
    eT[grid.nt - 1] = 1.0;
    inst.extended_correction = eT * eT.transpose();
    return inst;
}

FormulationInstance heat_weak(double lambda, const TimeGrid& grid) {
    FormulationInstance inst;
    inst.id = FormulationId::HeatWeakT;
    inst.lambda = lambda;
    inst.trial_spec.components = {{{mass(SobolevWeight::H1_0)}, Constraint::None}};
    inst.test_spec.components = {
        {{stiffness(SobolevWeight::Hminus1), mass(SobolevWeight::H1_0)}, Constraint::Right}};

    const Eigen::SparseMatrix<double> Dt = grid.D.transpose();
    inst.B = -constrained(Dt, Constraint::Right, Constraint::None) +
             lambda * constrained(grid.M, Constraint::Right, Constraint::None);
    inst.G_U = assemble_gram(inst.trial_spec, lambda, grid);
    inst.G_V = assemble_gram(inst.test_spec, lambda, grid);
    return inst;
}

FormulationInstance wave_strong(double lambda, const TimeGrid& grid) {
    FormulationInstance inst;
    inst.id = FormulationId::WaveStrongT;
    inst.lambda = lambda;
    inst.trial_spec.components = {
        {{deriv_dual(SobolevWeight::L2), mass(SobolevWeight::H1_0)}, Constraint::Left},
        {{deriv_dual(SobolevWeight::Hminus1), mass(SobolevWeight::L2)}, Constraint::Left}};
    inst.test_spec.components = {{{mass(SobolevWeight::L2)}, Constraint::None},
                                 {{mass(SobolevWeight::H1_0)}, Constraint::None}};

    const Eigen::MatrixXd Dc = constrained(grid.D, Constraint::None, Constraint::Left);
    const Eigen::MatrixXd Mc = constrained(grid.M, Constraint::None, Constraint::Left);
    const int nt = grid.nt;
    inst.B.resize(2 * (nt + 1), 2 * nt);
    inst.B.topLeftCorner(nt + 1, nt) = Dc;
    inst.B.topRightCorner(nt + 1, nt) = -Mc;
    inst.B.bottomLeftCorner(nt + 1, nt) = lambda * Mc;
    inst.B.bottomRightCorner(nt + 1, nt) = Dc;

    inst.G_U = assemble_gram(inst.trial_spec, lambda, grid);
    inst.G_V = assemble_gram(inst.test_spec, lambda, grid);

    // C realizes x^T C x = 2 u1^T (Dt - Dt^T) u2, the skew pairing
    // <d_t u, J u> on the constrained trial space
    const Eigen::MatrixXd Dt = constrained(grid.D, Constraint::Left, Constraint::Left);
    const Eigen::MatrixXd skew = Dt - Dt.transpose();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * nt, 2 * nt);
    C.topRightCorner(nt, nt) = skew;
    C.bottomLeftCorner(nt, nt) = skew.transpose();
    inst.extended_correction = std::move(C);
    return inst;
}

FormulationInstance wave_weak(double lambda, const TimeGrid& grid) {
    FormulationInstance inst;
    inst.id = FormulationId::WaveWeakT;
    inst.lambda = lambda;
    inst.trial_spec.components = {
        {{stiffness(SobolevWeight::L2), mass(SobolevWeight::H1_0)}, Constraint::Left}};
    inst.test_spec.components = {
        {{stiffness(SobolevWeight::L2), mass(SobolevWeight::H1_0)}, Constraint::Right}};

    inst.B = -constrained(grid.K, Constraint::Right, Constraint::Left) +
             lambda * constrained(grid.M, Constraint::Right, Constraint::Left);
    inst.G_U = assemble_gram(inst.trial_spec, lambda, grid);
    inst.G_V = assemble_gram(inst.test_spec, lambda, grid);
    return inst;
}

FormulationInstance wave_ultraweak(double lambda, const TimeGrid& grid) {
    FormulationInstance inst;
    inst.id = FormulationId::WaveUltraweakT;
    inst.lambda = lambda;
    inst.trial_spec.components = {{{mass(SobolevWeight::H1_0)}, Constraint::None},
                                  {{mass(SobolevWeight::L2)}, Constraint::None}};
    inst.test_spec.components = {
        {{stiffness(SobolevWeight::Hminus1), mass(SobolevWeight::L2)}, Constraint::Right},
        {{stiffness(SobolevWeight::L2), mass(SobolevWeight::H1_0)}, Constraint::Right}};

    const Eigen::SparseMatrix<double> DtT = grid.D.transpose();
    const Eigen::MatrixXd mDt = -constrained(DtT, Constraint::Right, Constraint::None);
    const Eigen::MatrixXd Mc = constrained(grid.M, Constraint::Right, Constraint::None);
    const int nt = grid.nt;
    inst.B.resize(2 * nt, 2 * (nt + 1));
    // rows: test components of <u1,-v1'> + <u1,lam v2> + <u2,-v2'> + <u2,-v1>
    inst.B.topLeftCorner(nt, nt + 1) = mDt;
    inst.B.topRightCorner(nt, nt + 1) = -Mc;
    inst.B.bottomLeftCorner(nt, nt + 1) = lambda * Mc;
    inst.B.bottomRightCorner(nt, nt + 1) = mDt;

    inst.G_U = assemble_gram(inst.trial_spec, lambda, grid);
    inst.G_V = assemble_gram(inst.test_spec, lambda, grid);
    return inst;
}

} // namespace

FormulationInstance assemble_formulation(FormulationId id, double lambda,
                                         const TimeGrid& grid) {
    if (lambda <= 0.0)
        throw std::invalid_argument("assemble_formulation: eigenvalue must be positive");
    switch (id) {
    case FormulationId::PoissonStrong:
    case FormulationId::PoissonWeak:
    case FormulationId::PoissonUltraweak:
        return poisson_instance(id, lambda);
    case FormulationId::HeatStrongT:
        return heat_strong(lambda, grid);
    case FormulationId::HeatWeakT:
        return heat_weak(lambda, grid);
    case FormulationId::WaveStrongT:
        return wave_strong(lambda, grid);
    case FormulationId::WaveWeakT:
        return wave_weak(lambda, grid);
    case FormulationId::WaveUltraweakT:
        return wave_ultraweak(lambda, grid);
    }
    throw std::invalid_argument("assemble_formulation: unknown formulation id");
}

FormulationInstance assemble_formulation(FormulationId id, double lambda) {
    if (formulation_is_time_dependent(id))
        throw std::invalid_argument("assemble_formulation: time-dependent id needs a grid");
    if (lambda <= 0.0)
        throw std::invalid_argument("assemble_formulation: eigenvalue must be positive");
    return poisson_instance(id, lambda);
}

CounterexampleForms counterexample_closed_forms(double lambda, double T) {
    if (lambda <= 0.0 || T <= 0.0)
        throw std::invalid_argument("counterexample_closed_forms: lambda and T must be positive");
    const double a = std::sqrt(lambda);
    const double a3 = a * a * a;
    const double s2 = std::sin(2.0 * a * T);
    CounterexampleForms cf;
    cf.u_norm_sq = (2.0 / 3.0) * T * T * T + T / lambda - s2 / (2.0 * a3);
    cf.f_norm_sq = 2.0 * T / lambda - s2 / a3;
    cf.mixed = -T * T * T / 3.0 - s2 / (4.0 * a3) + T / (2.0 * lambda);
    return cf;
}

Counterexample counterexample_field(int k, const TimeGrid& grid,
                                    const SpatialSpectrum& spec) {
    if (k < 1 || k > spec.size())
        throw std::invalid_argument("counterexample_field: mode index out of range");
    const double lambda = spec.lambda(k - 1);
    const double a = std::sqrt(lambda);

    Counterexample ce;
    ce.u.spectrum = spec;
    ce.u.components = 2;
    ce.u.constraints = {Constraint::Left, Constraint::Left};
    ce.u.coeffs.assign(static_cast<std::size_t>(spec.size()),
                       Eigen::VectorXd::Zero(2 * grid.nt));

    const Eigen::VectorXd u1 = interpolate_nodal(
        [&](double t) { return (std::sin(a * t) - a * t * std::cos(a * t)) / lambda; },
        grid, Constraint::Left);
    const Eigen::VectorXd u2 = interpolate_nodal(
        [&](double t) { return t * std::sin(a * t); }, grid, Constraint::Left);
    Eigen::VectorXd stacked(2 * grid.nt);
    stacked.head(grid.nt) = u1;
    stacked.tail(grid.nt) = u2;
    ce.u.coeffs[static_cast<std::size_t>(k - 1)] = std::move(stacked);

    ce.load = assemble_rhs({Integrand::poly({}), Integrand::sin(a, 2.0)},
                           FormulationId::WaveStrongT, lambda, grid);
    ce.closed = counterexample_closed_forms(lambda, grid.T);
    return ce;
}

Eigen::VectorXd assemble_rhs(const std::vector<Integrand>& f, FormulationId id,
                             double lambda, const TimeGrid& grid, int quad_order) {
    if (lambda <= 0.0)
        throw std::invalid_argument("assemble_rhs: eigenvalue must be positive");
    std::vector<Constraint> pattern;
    switch (id) {
    case FormulationId::HeatStrongT:
        pattern = {Constraint::None};
        break;
    case FormulationId::HeatWeakT:
        pattern = {Constraint::Right};
        break;
    case FormulationId::WaveStrongT:
        pattern = {Constraint::None, Constraint::None};
        break;
    case FormulationId::WaveWeakT:
        pattern = {Constraint::Right};
        break;
    case FormulationId::WaveUltraweakT:
        pattern = {Constraint::Right, Constraint::Right};
        break;
    default:
        throw std::invalid_argument("assemble_rhs: scalar Poisson formulations take modal data directly");
    }
    if (f.size() != pattern.size())
        throw std::invalid_argument("assemble_rhs: one integrand per test component required");

    int total = 0;
    for (Constraint c : pattern) total += grid.dofs(c);
    Eigen::VectorXd load(total);
    int offset = 0;
    for (std::size_t c = 0; c < pattern.size(); ++c) {
        const Eigen::VectorXd m = exact_moments(f[c], grid, pattern[c], quad_order);
        load.segment(offset, m.size()) = m;
        offset += static_cast<int>(m.size());
    }
    return load;
}

} // namespace stvf
