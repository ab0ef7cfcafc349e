#include "stvf/gram.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "stvf/errors.hpp"

namespace stvf {

void validate_field(const ModalField& field, const TimeGrid& grid) {
    if (field.components < 1 || field.components > 2)
        throw std::invalid_argument("validate_field: component count must be 1 or 2");
    if (static_cast<int>(field.constraints.size()) != field.components)
        throw std::invalid_argument("validate_field: one constraint per component required");
    if (field.modes() != field.spectrum.size())
        throw std::invalid_argument("validate_field: mode count does not match the spectrum");
    int total = 0;
    for (Constraint c : field.constraints) total += grid.dofs(c);
    for (const auto& v : field.coeffs) {
        if (static_cast<int>(v.size()) != total)
            throw std::invalid_argument("validate_field: stacked coefficient length mismatch");
    }
}

Eigen::VectorXd field_component(const ModalField& field, const TimeGrid& grid,
                                int mode, int component) {
    if (mode < 0 || mode >= field.modes())
        throw std::invalid_argument("field_component: mode out of range");
    if (component < 0 || component >= field.components)
        throw std::invalid_argument("field_component: component out of range");
    int offset = 0;
    for (int c = 0; c < component; ++c) offset += grid.dofs(field.constraints[static_cast<std::size_t>(c)]);
    const int len = grid.dofs(field.constraints[static_cast<std::size_t>(component)]);
    return field.coeffs[static_cast<std::size_t>(mode)].segment(offset, len);
}

int SpaceTimeNormSpec::dofs(int nt) const {
    int total = 0;
    for (const auto& comp : components)
        total += (comp.constraint == Constraint::None) ? nt + 1 : nt;
    return total;
}

CholeskyFactor CholeskyFactor::compute(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols())
        throw std::invalid_argument("CholeskyFactor: matrix must be square");
    const Eigen::Index n = A.rows();
    double max_diag = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(A(i, i)));
    const double pivot_floor = 1e-14 * max_diag;

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double d = A(j, j) - L.row(j).head(j).squaredNorm();
        if (!(d > pivot_floor)) {
            std::ostringstream msg;
            msg << "CholeskyFactor: pivot " << d << " at index " << j
                << " below floor " << pivot_floor << ", matrix is not positive definite";
            throw AssemblyError(msg.str());
        }
        L(j, j) = std::sqrt(d);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double s = A(i, j) - L.row(i).head(j).dot(L.row(j).head(j));
            L(i, j) = s / L(j, j);
        }
    }
    return CholeskyFactor(std::move(L));
}

Eigen::VectorXd CholeskyFactor::forward(const Eigen::VectorXd& b) const {
    return L_.triangularView<Eigen::Lower>().solve(b);
}

Eigen::VectorXd CholeskyFactor::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd y = L_.triangularView<Eigen::Lower>().solve(b);
    return L_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Eigen::MatrixXd CholeskyFactor::solve_matrix(const Eigen::MatrixXd& B) const {
    Eigen::MatrixXd Y = L_.triangularView<Eigen::Lower>().solve(B);
    return L_.transpose().triangularView<Eigen::Upper>().solve(Y);
}

const CholeskyFactor& GramMatrix::factor() const {
    if (!factor_) factor_.emplace(CholeskyFactor::compute(mat_));
    return *factor_;
}

namespace {

Eigen::MatrixXd assemble_component(const ComponentNormSpec& comp, double lambda,
                                   const TimeGrid& grid) {
    if (comp.terms.empty())
        throw std::invalid_argument("assemble_gram: a component needs at least one term");
    const int n = grid.dofs(comp.constraint);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
    for (const auto& term : comp.terms) {
        const double w = weight_value(term.spatial_weight, lambda);
        switch (term.time_part) {
        case TimePart::Mass:
            block += w * dense(constrain(grid.M, comp.constraint, comp.constraint));
            break;
        case TimePart::Stiffness:
            block += w * dense(constrain(grid.K, comp.constraint, comp.constraint));
            break;
        case TimePart::DerivativeDual: {
            const Eigen::MatrixXd Dt =
                dense(constrain(grid.D, term.pairing_constraint, comp.constraint));
            const Eigen::MatrixXd Mhat =
                dense(constrain(grid.M, term.pairing_constraint, term.pairing_constraint));
            const CholeskyFactor mf = CholeskyFactor::compute(Mhat);
            Eigen::MatrixXd dual = Dt.transpose() * mf.solve_matrix(Dt);
            // symmetrize away solve round-off before summation
            dual = 0.5 * (dual + dual.transpose()).eval();
            block += w * dual;
            break;
        }
        }
    }
    return block;
}

} // namespace

GramMatrix assemble_gram(const SpaceTimeNormSpec& spec, double lambda,
                         const TimeGrid& grid) {
    if (lambda <= 0.0)
        throw std::invalid_argument("assemble_gram: eigenvalue must be positive");
    const int nc = spec.component_count();
    if (nc < 1 || nc > 2)
        throw std::invalid_argument("assemble_gram: component count must be 1 or 2");

    const int total = spec.dofs(grid.nt);
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(total, total);
    int offset = 0;
    for (const auto& comp : spec.components) {
        const Eigen::MatrixXd block = assemble_component(comp, lambda, grid);
        full.block(offset, offset, block.rows(), block.cols()) = block;
        offset += static_cast<int>(block.rows());
    }

    GramMatrix G(std::move(full));
    try {
        G.factor();
    } catch (const AssemblyError& e) {
        std::ostringstream msg;
        msg << e.what() << " (lambda=" << lambda << ")";
        throw AssemblyError(msg.str());
    }
    return G;
}

double dual_norm(const Eigen::VectorXd& g, const GramMatrix& G) {
    if (g.size() != G.size())
        throw std::invalid_argument("dual_norm: load size does not match the Gram dimension");
    return G.factor().forward(g).norm();
}

Eigen::VectorXd riesz_apply_inverse(const Eigen::VectorXd& g, const GramMatrix& G) {
    if (g.size() != G.size())
        throw std::invalid_argument("riesz_apply_inverse: load size does not match the Gram dimension");
    const double gnorm = g.norm();
    if (gnorm == 0.0) return Eigen::VectorXd::Zero(G.size());

    Eigen::VectorXd x = G.factor().solve(g);
    Eigen::VectorXd r = g - G.matrix() * x;
    x += G.factor().solve(r);
    r = g - G.matrix() * x;
    const double rel = r.norm() / gnorm;
    if (rel > 1e-12) {
        std::ostringstream msg;
        msg << "riesz_apply_inverse: relative residual " << rel << " exceeds 1e-12";
        throw NumericError(msg.str());
    }
    return x;
}

Eigen::VectorXd flip(const Eigen::VectorXd& x) {
    if (x.size() % 2 != 0)
        throw std::invalid_argument("flip: vector length must split into two equal components");
    const Eigen::Index h = x.size() / 2;
    Eigen::VectorXd y(x.size());
    y.head(h) = x.tail(h);
    y.tail(h) = x.head(h);
    return y;
}

Eigen::MatrixXd flip(const Eigen::MatrixXd& A) {
    if (A.rows() % 2 != 0 || A.cols() % 2 != 0)
        throw std::invalid_argument("flip: matrix blocks must split into two equal components");
    const Eigen::Index hr = A.rows() / 2;
    const Eigen::Index hc = A.cols() / 2;
    Eigen::MatrixXd B(A.rows(), A.cols());
    B.topLeftCorner(hr, hc) = A.bottomRightCorner(hr, hc);
    B.topRightCorner(hr, hc) = A.bottomLeftCorner(hr, hc);
    B.bottomLeftCorner(hr, hc) = A.topRightCorner(hr, hc);
    B.bottomRightCorner(hr, hc) = A.topLeftCorner(hr, hc);
    return B;
}

SpaceTimeNormSpec flip(const SpaceTimeNormSpec& spec) {
    if (spec.component_count() != 2)
        throw std::invalid_argument("flip: norm spec must have exactly 2 components");
    SpaceTimeNormSpec out = spec;
    std::swap(out.components[0], out.components[1]);
    return out;
}

ModalField flip(const ModalField& field) {
    if (field.components != 2)
        throw std::invalid_argument("flip: field must have exactly 2 components");
    if (field.constraints[0] != field.constraints[1])
        throw std::invalid_argument("flip: component constraints must match to swap blocks");
    ModalField out = field;
    std::swap(out.constraints[0], out.constraints[1]);
    for (auto& v : out.coeffs) v = flip(v);
    return out;
}

} // namespace stvf
