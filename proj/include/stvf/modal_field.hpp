#pragma once

#include <vector>

#include <Eigen/Core>

#include "stvf/spectrum.hpp"
#include "stvf/time_grid.hpp"

namespace stvf {

// Space-time function in the spatial eigenbasis. coeffs[k] holds the
// time-nodal coefficients of mode k with the component blocks stacked;
// constrained components store only the retained nodes.
struct ModalField {
    SpatialSpectrum spectrum;
    int components = 1;
    std::vector<Constraint> constraints; // one entry per component
    std::vector<Eigen::VectorXd> coeffs; // one stacked vector per mode

    int modes() const { return static_cast<int>(coeffs.size()); }
};

// Shape check against a grid: mode count matches the spectrum and every
// stacked vector has the summed constrained length.
void validate_field(const ModalField& field, const TimeGrid& grid);

// Component block of one mode. Blocks are located by the per-component
// constrained dof counts.
Eigen::VectorXd field_component(const ModalField& field, const TimeGrid& grid,
                                int mode, int component);

} // namespace stvf
