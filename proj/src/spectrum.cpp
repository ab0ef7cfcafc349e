#include "stvf/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stvf {

double weight_value(SobolevWeight w, double lambda) {
    if (lambda <= 0.0)
        throw std::invalid_argument("weight_value: eigenvalue must be positive");
    switch (w) {
    case SobolevWeight::L2: return 1.0;
    case SobolevWeight::H1_0: return lambda;
    case SobolevWeight::Hminus1: return 1.0 / lambda;
    case SobolevWeight::Graph: return lambda + lambda * lambda;
    }
    throw std::invalid_argument("weight_value: unknown weight");
}

SpatialSpectrum build_interval_spectrum(double length, int K) {
    if (length <= 0.0)
        throw std::invalid_argument("build_interval_spectrum: length must be positive");
    if (K <= 0)
        throw std::invalid_argument("build_interval_spectrum: K must be positive");
    SpatialSpectrum s;
    s.lengths = {length};
    s.lambdas.reserve(static_cast<std::size_t>(K));
    s.indices.reserve(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) {
        const double f = static_cast<double>(k) * std::numbers::pi / length;
        s.lambdas.push_back(f * f);
        s.indices.push_back({k});
    }
    return s;
}

SpatialSpectrum build_box_spectrum(const std::vector<double>& lengths, int K_per_dim) {
    if (lengths.empty())
        throw std::invalid_argument("build_box_spectrum: at least one length required");
    for (double L : lengths)
        if (L <= 0.0)
            throw std::invalid_argument("build_box_spectrum: lengths must be positive");
    if (K_per_dim <= 0)
        throw std::invalid_argument("build_box_spectrum: K_per_dim must be positive");

    const int dim = static_cast<int>(lengths.size());
    std::vector<int> idx(static_cast<std::size_t>(dim), 1);
    std::vector<std::pair<double, std::vector<int>>> modes;
    // enumerate the full tensor grid of multi-indices; desk scale keeps this small
    for (;;) {
        double lam = 0.0;
        for (int d = 0; d < dim; ++d) {
            const double f = static_cast<double>(idx[static_cast<std::size_t>(d)]) *
                             std::numbers::pi / lengths[static_cast<std::size_t>(d)];
            lam += f * f;
        }
        modes.emplace_back(lam, idx);
        int d = dim - 1;
        while (d >= 0 && idx[static_cast<std::size_t>(d)] == K_per_dim) {
            idx[static_cast<std::size_t>(d)] = 1;
            --d;
        }
        if (d < 0) break;
        ++idx[static_cast<std::size_t>(d)];
    }
    std::stable_sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });

    SpatialSpectrum s;
    s.lengths = lengths;
    s.lambdas.reserve(modes.size());
    s.indices.reserve(modes.size());
    for (auto& [lam, mi] : modes) {
        s.lambdas.push_back(lam);
        s.indices.push_back(mi);
    }
    return s;
}

double poincare_constant(const SpatialSpectrum& spectrum) {
    if (spectrum.lambdas.empty())
        throw std::invalid_argument("poincare_constant: empty spectrum");
    return 1.0 / std::sqrt(spectrum.lambdas.front());
}

double modal_norm(const Eigen::VectorXd& coeffs, const SpatialSpectrum& spectrum,
                  SobolevWeight weight) {
    if (coeffs.size() != static_cast<Eigen::Index>(spectrum.lambdas.size()))
        throw std::invalid_argument("modal_norm: coefficient count does not match spectrum");
    double acc = 0.0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        const double w = weight_value(weight, spectrum.lambdas[static_cast<std::size_t>(k)]);
        acc += w * coeffs[k] * coeffs[k];
    }
    return std::sqrt(acc);
}

} // namespace stvf
