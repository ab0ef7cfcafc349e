#include "stvf/time_grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace stvf {

std::vector<int> pattern_indices(Constraint c, int nt) {
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(nt + 1));
    const int first = (c == Constraint::Left) ? 1 : 0;
    const int last = (c == Constraint::Right) ? nt - 1 : nt;
    for (int i = first; i <= last; ++i) idx.push_back(i);
    return idx;
}

Eigen::VectorXd TimeGrid::e0() const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(nt + 1);
    v[0] = 1.0;
    return v;
}

Eigen::VectorXd TimeGrid::eT() const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(nt + 1);
    v[nt] = 1.0;
    return v;
}

TimeGrid build_time_grid(double T, int nt) {
    if (T <= 0.0)
        throw std::invalid_argument("build_time_grid: T must be positive");
    if (nt <= 0)
        throw std::invalid_argument("build_time_grid: nt must be positive");

    TimeGrid g;
    g.T = T;
    g.nt = nt;
    const int n = nt + 1;
    const double h = T / nt;
    g.nodes = Eigen::VectorXd::LinSpaced(n, 0.0, T);
    // exact last node regardless of LinSpaced rounding
    g.nodes[nt] = T;

    std::vector<Eigen::Triplet<double>> tm, tk, td;
    tm.reserve(static_cast<std::size_t>(4 * nt));
    tk.reserve(static_cast<std::size_t>(4 * nt));
    td.reserve(static_cast<std::size_t>(4 * nt));
    // element matrices: mass h/6 [[2,1],[1,2]], stiffness 1/h [[1,-1],[-1,1]],
    // derivative 1/2 [[-1,1],[-1,1]]
    for (int e = 0; e < nt; ++e) {
        const int i0 = e, i1 = e + 1;
        tm.emplace_back(i0, i0, 2.0 * h / 6.0);
        tm.emplace_back(i0, i1, h / 6.0);
        tm.emplace_back(i1, i0, h / 6.0);
        tm.emplace_back(i1, i1, 2.0 * h / 6.0);
        tk.emplace_back(i0, i0, 1.0 / h);
        tk.emplace_back(i0, i1, -1.0 / h);
        tk.emplace_back(i1, i0, -1.0 / h);
        tk.emplace_back(i1, i1, 1.0 / h);
        td.emplace_back(i0, i0, -0.5);
        td.emplace_back(i0, i1, 0.5);
        td.emplace_back(i1, i0, -0.5);
        td.emplace_back(i1, i1, 0.5);
    }
    g.M.resize(n, n);
    g.K.resize(n, n);
    g.D.resize(n, n);
    g.M.setFromTriplets(tm.begin(), tm.end());
    g.K.setFromTriplets(tk.begin(), tk.end());
    g.D.setFromTriplets(td.begin(), td.end());
    return g;
}

Eigen::SparseMatrix<double> constrain(const Eigen::SparseMatrix<double>& A,
                                      Constraint rows, Constraint cols) {
    const int nt = static_cast<int>(A.rows()) - 1;
    if (A.rows() != A.cols() || nt < 1)
        throw std::invalid_argument("constrain: expected a square (nt+1) matrix");
    const auto ri = pattern_indices(rows, nt);
    const auto ci = pattern_indices(cols, nt);
    // node -> retained position, -1 if deleted
    std::vector<int> rpos(static_cast<std::size_t>(nt + 1), -1);
    std::vector<int> cpos(static_cast<std::size_t>(nt + 1), -1);
    for (std::size_t p = 0; p < ri.size(); ++p) rpos[static_cast<std::size_t>(ri[p])] = static_cast<int>(p);
    for (std::size_t p = 0; p < ci.size(); ++p) cpos[static_cast<std::size_t>(ci[p])] = static_cast<int>(p);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(A.nonZeros()));
    for (int outer = 0; outer < A.outerSize(); ++outer) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, outer); it; ++it) {
            const int r = rpos[static_cast<std::size_t>(it.row())];
            const int c = cpos[static_cast<std::size_t>(it.col())];
            if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
        }
    }
    Eigen::SparseMatrix<double> out(static_cast<int>(ri.size()), static_cast<int>(ci.size()));
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& A) {
    return Eigen::MatrixXd(A);
}

Eigen::VectorXd interpolate_nodal(const std::function<double(double)>& f,
                                  const TimeGrid& grid, Constraint c) {
    const auto idx = pattern_indices(c, grid.nt);
    Eigen::VectorXd v(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t p = 0; p < idx.size(); ++p)
        v[static_cast<Eigen::Index>(p)] = f(grid.nodes[idx[p]]);
    return v;
}

Eigen::SparseMatrix<double> time_reversal(const TimeGrid& grid) {
    const int n = grid.nt + 1;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) trip.emplace_back(i, grid.nt - i, 1.0);
    Eigen::SparseMatrix<double> P(n, n);
    P.setFromTriplets(trip.begin(), trip.end());
    return P;
}

double Integrand::operator()(double t) const {
    switch (kind) {
    case Kind::Sin:
        return scale * std::sin(a * t);
    case Kind::TSin:
        return scale * t * std::sin(a * t);
    case Kind::SinIntegral:
        return scale * (std::sin(a * t) - a * t * std::cos(a * t)) / (a * a);
    case Kind::Poly: {
        double acc = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * t + coeffs[i];
        return scale * acc;
    }
    }
    throw std::invalid_argument("Integrand: unknown kind");
}

Integrand Integrand::sin(double a, double scale) {
    Integrand f;
    f.kind = Kind::Sin;
    f.a = a;
    f.scale = scale;
    return f;
}

Integrand Integrand::t_sin(double a, double scale) {
    Integrand f;
    f.kind = Kind::TSin;
    f.a = a;
    f.scale = scale;
    return f;
}

Integrand Integrand::sin_integral(double a, double scale) {
    if (a == 0.0)
        throw std::invalid_argument("Integrand::sin_integral: frequency must be nonzero");
    Integrand f;
    f.kind = Kind::SinIntegral;
    f.a = a;
    f.scale = scale;
    return f;
}

Integrand Integrand::poly(std::vector<double> coeffs, double scale) {
    Integrand f;
    f.kind = Kind::Poly;
    f.coeffs = std::move(coeffs);
    f.scale = scale;
    return f;
}

Integrand Integrand::from_tag(const std::string& tag, double a, std::vector<double> coeffs) {
    if (tag == "sin") return sin(a);
    if (tag == "t*sin") return t_sin(a);
    if (tag == "sin-integral") return sin_integral(a);
    if (tag == "poly") return poly(std::move(coeffs));
    throw std::invalid_argument("Integrand::from_tag: unknown integrand tag '" + tag + "'");
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 1 || order > 64)
        throw std::invalid_argument("gauss_legendre: order out of range");
    const int n = order;
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev initial guess, Newton on P_n
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
}

Eigen::VectorXd exact_moments(const Integrand& f, const TimeGrid& grid,
                              Constraint rows, int quad_order) {
    std::vector<double> xg, wg;
    gauss_legendre(quad_order, xg, wg);
    const double h = grid.h();
    Eigen::VectorXd full = Eigen::VectorXd::Zero(grid.nt + 1);
    for (int e = 0; e < grid.nt; ++e) {
        const double t0 = grid.nodes[e];
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t q = 0; q < xg.size(); ++q) {
            const double t = t0 + (xg[q] + 1.0) * h / 2.0;
            const double w = wg[q] * h / 2.0;
            const double fv = f(t);
            const double s = (t - t0) / h;
            m0 += w * fv * (1.0 - s);
            m1 += w * fv * s;
        }
        full[e] += m0;
        full[e + 1] += m1;
    }
    if (rows == Constraint::None) return full;
    const auto idx = pattern_indices(rows, grid.nt);
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t p = 0; p < idx.size(); ++p) out[static_cast<Eigen::Index>(p)] = full[idx[p]];
    return out;
}

} // namespace stvf
