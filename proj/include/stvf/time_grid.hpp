#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace stvf {

// Temporal boundary constraint, realized by deleting the corresponding node:
// Left drops node 0 (functions vanishing at t=0), Right drops node n_t.
enum class Constraint { None, Left, Right };

// Retained node numbers (0..n_t) for a constraint pattern.
std::vector<int> pattern_indices(Constraint c, int nt);

// Uniform P1 grid on (0, T) with n_t elements. M, K, D are the full
// (n_t+1)^2 mass, stiffness and first-derivative matrices with the
// convention A[i][j] = a(phi_j, phi_i) (rows test, columns trial), so
// D[i][j] = int phi_j' phi_i dt and D + D^T = eT eT^T - e0 e0^T exactly.
struct TimeGrid {
    double T = 0.0;
    int nt = 0;
    Eigen::VectorXd nodes;
    Eigen::SparseMatrix<double> M;
    Eigen::SparseMatrix<double> K;
    Eigen::SparseMatrix<double> D;

    double h() const { return T / nt; }
    int dofs(Constraint c) const { return c == Constraint::None ? nt + 1 : nt; }
    Eigen::VectorXd e0() const;
    Eigen::VectorXd eT() const;
};

TimeGrid build_time_grid(double T, int nt);

// Principal submatrix after deleting the constrained rows/columns.
Eigen::SparseMatrix<double> constrain(const Eigen::SparseMatrix<double>& A,
                                      Constraint rows, Constraint cols);

Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& A);

// Nodal interpolant on the retained nodes of the pattern.
Eigen::VectorXd interpolate_nodal(const std::function<double(double)>& f,
                                  const TimeGrid& grid, Constraint c);

// Node-reversal permutation P (i -> n_t - i) on the full grid; P = P^T,
// P^2 = Id, P M P = M and P D P = -D.
Eigen::SparseMatrix<double> time_reversal(const TimeGrid& grid);

// Closed catalog of right-hand-side integrands in time. SinIntegral is the
// antiderivative of t sin(a t), namely (sin(a t) - a t cos(a t)) / a^2.
struct Integrand {
    enum class Kind { Sin, TSin, SinIntegral, Poly };
    Kind kind = Kind::Poly;
    double a = 0.0;              // frequency for the trigonometric kinds
    double scale = 1.0;
    std::vector<double> coeffs;  // polynomial coefficients, ascending degree

    double operator()(double t) const;

    static Integrand sin(double a, double scale = 1.0);
    static Integrand t_sin(double a, double scale = 1.0);
    static Integrand sin_integral(double a, double scale = 1.0);
    static Integrand poly(std::vector<double> coeffs, double scale = 1.0);
    // tag in {"sin", "t*sin", "sin-integral", "poly"}; unknown tags are rejected
    static Integrand from_tag(const std::string& tag, double a,
                              std::vector<double> coeffs = {});
};

// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

// Loads m_i = int_0^T f(t) phi_i(t) dt on the retained test nodes,
// element-wise Gauss-Legendre of the given order.
Eigen::VectorXd exact_moments(const Integrand& f, const TimeGrid& grid,
                              Constraint rows = Constraint::None, int quad_order = 5);

} // namespace stvf
