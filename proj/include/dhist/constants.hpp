// constants.hpp — Physical constants (cgs) for dimensional parameter sets

#pragma once

namespace dhist::constants {

// erg·s
inline constexpr double hbar_cgs = 1.0546e-27;
// erg/K
inline constexpr double k_boltzmann_cgs = 1.381e-16;

}  // namespace dhist::constants
