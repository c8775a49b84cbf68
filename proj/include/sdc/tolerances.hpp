#pragma once

namespace sdc {

// Every numerical threshold the library checks against lives here.
struct Tolerances
{
    double norm = 1e-10;
    double unitarity = 1e-8;
    double probability_floor = 1e-12;
    double hermiticity = 1e-8;
    double density_trace = 1e-10;
    double decode_overlap = 1e-9;
    double integrator_step = 1e-10;
};

inline constexpr Tolerances kTolerances{};

} // namespace sdc
