#pragma once

// Internal units: energies in cm^-1, times in fs, distances in Angstrom.

namespace eetsim::units {

inline constexpr double kBoltzmann = 0.69504;   // cm^-1 / K
inline constexpr double kHbar = 5308.8;         // cm^-1 * fs
inline constexpr double kFsPerPs = 1000.0;
inline constexpr double kAngstromPerNm = 10.0;

}  // namespace eetsim::units
