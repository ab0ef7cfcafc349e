#pragma once

#include <vector>

#include <Eigen/Core>

namespace stvf {

// Sobolev scale used to weight modal coefficients. For a Dirichlet Laplacian
// eigenpair (lambda, phi) with ||phi||_{L2} = 1 the squared norms per unit
// coefficient are 1, lambda, 1/lambda and lambda + lambda^2 respectively.
enum class SobolevWeight { L2, H1_0, Hminus1, Graph };

double weight_value(SobolevWeight w, double lambda);

// Dirichlet spectrum of -Laplace on a box, one entry per retained mode,
// sorted ascending by eigenvalue (ties resolved by multi-index order).
struct SpatialSpectrum {
    std::vector<double> lambdas;
    std::vector<std::vector<int>> indices; // per-mode multi-index, 1-based per axis
    std::vector<double> lengths;

    int size() const { return static_cast<int>(lambdas.size()); }
    double lambda(int mode) const { return lambdas.at(static_cast<std::size_t>(mode)); }
};

// K lowest modes on an interval of given length: lambda_k = (k pi / length)^2.
SpatialSpectrum build_interval_spectrum(double length, int K);

// Tensor-product box spectrum, K_per_dim modes per axis before sorting:
// lambda = sum_i (k_i pi / L_i)^2.
SpatialSpectrum build_box_spectrum(const std::vector<double>& lengths, int K_per_dim);

// C_Omega = 1/sqrt(lambda_1); the sharp constant in ||u|| <= C ||grad u||.
double poincare_constant(const SpatialSpectrum& spectrum);

// sqrt(sum_k w(lambda_k) c_k^2); coeffs must match the spectrum size.
double modal_norm(const Eigen::VectorXd& coeffs, const SpatialSpectrum& spectrum,
                  SobolevWeight weight);

} // namespace stvf
