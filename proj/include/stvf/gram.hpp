#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "stvf/modal_field.hpp"
#include "stvf/spectrum.hpp"
#include "stvf/time_grid.hpp"

namespace stvf {

// Time factor of one norm term. DerivativeDual stands for a time-derivative
// measured in the dual norm of the discrete pairing space and assembles as
// D~^T Mhat^{-1} D~ instead of the primal stiffness.
enum class TimePart { Mass, Stiffness, DerivativeDual };

struct NormTerm {
    TimePart time_part;
    SobolevWeight spatial_weight;
    // rows of D~ and the extent of Mhat for DerivativeDual; ignored otherwise
    Constraint pairing_constraint = Constraint::None;
};

struct ComponentNormSpec {
    std::vector<NormTerm> terms;
    Constraint constraint = Constraint::None;
};

// Composite space-time norm, one term list per component. Two-component
// specs assemble to block-diagonal Grams with the component order preserved.
struct SpaceTimeNormSpec {
    std::vector<ComponentNormSpec> components;

    int component_count() const { return static_cast<int>(components.size()); }
    int dofs(int nt) const;
};

// Lower-triangular factorization with a hard pivot floor. A pivot below
// 1e-14 * max|diagonal| aborts instead of regularizing.
class CholeskyFactor {
public:
    static CholeskyFactor compute(const Eigen::MatrixXd& A);

    // L^{-1} b; squared norm of the result is b^T A^{-1} b
    Eigen::VectorXd forward(const Eigen::VectorXd& b) const;
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    Eigen::MatrixXd solve_matrix(const Eigen::MatrixXd& B) const;
    const Eigen::MatrixXd& lower() const { return L_; }

private:
    explicit CholeskyFactor(Eigen::MatrixXd L) : L_(std::move(L)) {}
    Eigen::MatrixXd L_;
};

class GramMatrix {
public:
    GramMatrix() = default;
    explicit GramMatrix(Eigen::MatrixXd m) : mat_(std::move(m)) {}

    const Eigen::MatrixXd& matrix() const { return mat_; }
    Eigen::Index size() const { return mat_.rows(); }
    // factors on first use and caches per instance
    const CholeskyFactor& factor() const;

private:
    Eigen::MatrixXd mat_;
    mutable std::optional<CholeskyFactor> factor_;
};

// Per-mode Gram of the composite norm at eigenvalue lambda. The returned
// matrix is factored once before returning so an indefinite result surfaces
// here with the offending lambda.
GramMatrix assemble_gram(const SpaceTimeNormSpec& spec, double lambda,
                         const TimeGrid& grid);

// sqrt(g^T G^{-1} g) through the cached factor
double dual_norm(const Eigen::VectorXd& g, const GramMatrix& G);

// Solves G x = g with one refinement step; residual above 1e-12 * |g| is an
// error, not a warning.
Eigen::VectorXd riesz_apply_inverse(const Eigen::VectorXd& g, const GramMatrix& G);

// Component swap for two-component objects. Vectors and matrices split at
// the midpoint, so both component blocks must have equal dof counts.
Eigen::VectorXd flip(const Eigen::VectorXd& x);
Eigen::MatrixXd flip(const Eigen::MatrixXd& A);
SpaceTimeNormSpec flip(const SpaceTimeNormSpec& spec);
ModalField flip(const ModalField& field);

} // namespace stvf
