#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "stvf/errors.hpp"
#include "stvf/gram.hpp"
#include "stvf/rng.hpp"

using namespace stvf;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd random_spd(int n, std::uint64_t seed) {
    GaussianSource rng(seed);
    Eigen::MatrixXd R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R(i, j) = rng.normal();
    return R * R.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
    GaussianSource rng(seed);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

SpaceTimeNormSpec heat_trial_spec() {
    SpaceTimeNormSpec spec;
    ComponentNormSpec comp;
    comp.constraint = Constraint::Left;
    comp.terms = {
        {TimePart::DerivativeDual, SobolevWeight::Hminus1, Constraint::None},
        {TimePart::Mass, SobolevWeight::H1_0, Constraint::None},
    };
    spec.components = {comp};
    return spec;
}

} // namespace

TEST_CASE("gaussian source is seed-deterministic") {
    GaussianSource a(7), b(7), c(8);
    bool all_equal = true;
    bool any_differs = false;
    for (int i = 0; i < 16; ++i) {
        const double x = a.normal();
        all_equal = all_equal && (x == b.normal());
        any_differs = any_differs || (x != c.normal());
    }
    CHECK(all_equal);
    CHECK(any_differs);

    GaussianSource u(3);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform01();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("cholesky factor reproduces the matrix and solves") {
    const int n = 12;
    const Eigen::MatrixXd A = random_spd(n, 17);
    const CholeskyFactor chol = CholeskyFactor::compute(A);
    const Eigen::MatrixXd L = chol.lower();
    CHECK((L * L.transpose() - A).norm() / A.norm() <= 1e-12);
    // strictly lower storage only
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) CHECK(L(i, j) == 0.0);

    const Eigen::VectorXd b = random_vector(n, 5);
    const Eigen::VectorXd x = chol.solve(b);
    CHECK((A * x - b).norm() / b.norm() <= 1e-12);

    // forward substitution realizes the inverse-weighted inner product
    const Eigen::VectorXd w = chol.forward(b);
    const Eigen::LLT<Eigen::MatrixXd> ref(A);
    CHECK(w.squaredNorm() == doctest::Approx(b.dot(ref.solve(b))).epsilon(1e-12));

    const Eigen::MatrixXd B = random_spd(n, 23);
    CHECK((A * chol.solve_matrix(B) - B).norm() / B.norm() <= 1e-12);
}

TEST_CASE("cholesky pivot floor rejects semidefinite input") {
    Eigen::MatrixXd singular(2, 2);
    singular << 1.0, 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(CholeskyFactor::compute(singular), AssemblyError);
    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(CholeskyFactor::compute(indefinite), AssemblyError);
}

TEST_CASE("scalar heat trial gram on one element") {
    // nt = 1, lambda = pi^2: dual derivative term gives 1/lambda, the
    // weighted mass gives lambda/3
    const TimeGrid grid = build_time_grid(1.0, 1);
    const double lambda = kPi * kPi;
    const GramMatrix G = assemble_gram(heat_trial_spec(), lambda, grid);
    REQUIRE(G.size() == 1);
    CHECK(G.matrix()(0, 0) ==
          doctest::Approx(1.0 / lambda + lambda / 3.0).epsilon(1e-14));
}

TEST_CASE("gram assembly rejects nonpositive eigenvalues") {
    const TimeGrid grid = build_time_grid(1.0, 4);
    CHECK_THROWS_AS(assemble_gram(heat_trial_spec(), 0.0, grid),
                    std::invalid_argument);
    CHECK_THROWS_AS(assemble_gram(heat_trial_spec(), -2.0, grid),
                    std::invalid_argument);
}

TEST_CASE("two-component grams are block diagonal in component order") {
    SpaceTimeNormSpec spec;
    ComponentNormSpec first, second;
    first.constraint = Constraint::Left;
    first.terms = {{TimePart::Mass, SobolevWeight::L2, Constraint::None}};
    second.constraint = Constraint::Left;
    second.terms = {{TimePart::Stiffness, SobolevWeight::Hminus1, Constraint::None}};
    spec.components = {first, second};

    const TimeGrid grid = build_time_grid(1.0, 3);
    const double lambda = 4.0;
    REQUIRE(spec.dofs(3) == 6);
    const GramMatrix G = assemble_gram(spec, lambda, grid);
    REQUIRE(G.size() == 6);
    const Eigen::MatrixXd M =
        dense(constrain(grid.M, Constraint::Left, Constraint::Left));
    const Eigen::MatrixXd K =
        dense(constrain(grid.K, Constraint::Left, Constraint::Left));
    CHECK((G.matrix().topLeftCorner(3, 3) - M).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((G.matrix().bottomRightCorner(3, 3) - K / lambda).cwiseAbs().maxCoeff() <=
          1e-14);
    CHECK(G.matrix().topRightCorner(3, 3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dual norm agrees with an independent solver and is a supremum") {
    const TimeGrid grid = build_time_grid(1.0, 6);
    const GramMatrix G = assemble_gram(heat_trial_spec(), 7.3, grid);
    const Eigen::VectorXd g = random_vector(static_cast<int>(G.size()), 11);

    const Eigen::LLT<Eigen::MatrixXd> ref(G.matrix());
    const double expected = std::sqrt(g.dot(ref.solve(g)));
    const double dual = dual_norm(g, G);
    CHECK(dual == doctest::Approx(expected).epsilon(1e-12));

    // no test direction beats the dual norm, the Riesz representative
    // attains it
    GaussianSource rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd v(G.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
        const double quotient = g.dot(v) / std::sqrt(v.dot(G.matrix() * v));
        CHECK(quotient <= dual * (1.0 + 1e-10));
    }
    const Eigen::VectorXd riesz = riesz_apply_inverse(g, G);
    CHECK(g.dot(riesz) / std::sqrt(riesz.dot(G.matrix() * riesz)) ==
          doctest::Approx(dual).epsilon(1e-10));

    CHECK(dual_norm(Eigen::VectorXd::Zero(G.size()), G) == 0.0);

    // triangle inequality on random functionals
    const Eigen::VectorXd g2 = random_vector(static_cast<int>(G.size()), 31);
    CHECK(dual_norm(g + g2, G) <= dual_norm(g, G) + dual_norm(g2, G) + 1e-12);
}

TEST_CASE("riesz representative solves the gram system") {
    const TimeGrid grid = build_time_grid(0.7, 5);
    const GramMatrix G = assemble_gram(heat_trial_spec(), 12.0, grid);
    const Eigen::VectorXd g = random_vector(static_cast<int>(G.size()), 41);
    const Eigen::VectorXd v = riesz_apply_inverse(g, G);
    CHECK((G.matrix() * v - g).norm() / g.norm() <= 1e-12);
    CHECK(std::sqrt(v.dot(G.matrix() * v)) ==
          doctest::Approx(dual_norm(g, G)).epsilon(1e-12));
    CHECK(riesz_apply_inverse(Eigen::VectorXd::Zero(G.size()), G).norm() == 0.0);
}

TEST_CASE("derivative dual term never exceeds the primal stiffness") {
    // sup_v (u' , v)^2 / ||v||^2 <= ||u'||^2 per mode, so the dual-derivative
    // gram is dominated by the constrained stiffness
    const TimeGrid grid = build_time_grid(1.0, 8);
    SpaceTimeNormSpec dual_spec;
    ComponentNormSpec comp;
    comp.constraint = Constraint::Left;
    comp.terms = {{TimePart::DerivativeDual, SobolevWeight::L2, Constraint::None}};
    dual_spec.components = {comp};
    const GramMatrix Gdual = assemble_gram(dual_spec, 1.0, grid);
    const Eigen::MatrixXd K =
        dense(constrain(grid.K, Constraint::Left, Constraint::Left));
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        Gdual.matrix(), K);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("component flip swaps the block halves") {
    Eigen::VectorXd x(4);
    x << 1, 2, 3, 4;
    const Eigen::VectorXd y = flip(x);
    CHECK(y[0] == 3.0);
    CHECK(y[1] == 4.0);
    CHECK(y[2] == 1.0);
    CHECK(y[3] == 2.0);
    CHECK((flip(y) - x).norm() == 0.0);
    Eigen::VectorXd odd(3);
    odd.setZero();
    CHECK_THROWS_AS(flip(odd), std::invalid_argument);

    Eigen::MatrixXd A(2, 4);
    A << 1, 2, 3, 4, 5, 6, 7, 8;
    const Eigen::MatrixXd B = flip(A);
    CHECK(B(0, 0) == 7.0);
    CHECK(B(0, 2) == 5.0);
    CHECK(B(1, 0) == 3.0);
    CHECK(B(1, 2) == 1.0);
    CHECK((flip(B) - A).norm() == 0.0);

    SpaceTimeNormSpec one;
    one.components = {ComponentNormSpec{}};
    CHECK_THROWS_AS(flip(one), std::invalid_argument);
}

TEST_CASE("field validation pins shapes and component extraction") {
    const TimeGrid grid = build_time_grid(1.0, 4);
    ModalField field;
    field.spectrum = build_interval_spectrum(1.0, 2);
    field.components = 2;
    field.constraints = {Constraint::Left, Constraint::None};
    field.coeffs = {Eigen::VectorXd::Zero(9), Eigen::VectorXd::Zero(9)};
    field.coeffs[0] << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    CHECK_NOTHROW(validate_field(field, grid));

    const Eigen::VectorXd first = field_component(field, grid, 0, 0);
    REQUIRE(first.size() == 4);
    CHECK(first[3] == 4.0);
    const Eigen::VectorXd second = field_component(field, grid, 0, 1);
    REQUIRE(second.size() == 5);
    CHECK(second[0] == 5.0);

    ModalField broken = field;
    broken.coeffs[1] = Eigen::VectorXd::Zero(8);
    CHECK_THROWS_AS(validate_field(broken, grid), std::invalid_argument);
    ModalField missing = field;
    missing.coeffs.pop_back();
    CHECK_THROWS_AS(validate_field(missing, grid), std::invalid_argument);
}
