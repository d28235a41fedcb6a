#pragma once

// Physical constants and unit conversions. Every public quantity in fluxnet is
// expressed in GHz (energy divided by Planck's constant) unless its name says
// otherwise.

namespace fluxnet::units {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kFluxQuantum = 2.067833848e-15;  // Wb
inline constexpr double kPlanck = 6.62607015e-34;        // J s
inline constexpr double kBoltzmann = 1.380649e-23;       // J / K

inline constexpr double kNano = 1e-9;
inline constexpr double kPico = 1e-12;
inline constexpr double kMilli = 1e-3;
inline constexpr double kGiga = 1e9;

/// Energy in joules to frequency in GHz.
constexpr double joules_to_ghz(double joules) { return joules / kPlanck / kGiga; }

/// Frequency in GHz to energy in joules.
constexpr double ghz_to_joules(double ghz) { return ghz * kGiga * kPlanck; }

/// Current (nA) times a flux expressed in flux quanta, as a frequency in GHz.
constexpr double current_flux_to_ghz(double current_na, double flux_quanta) {
    return joules_to_ghz(current_na * kNano * flux_quanta * kFluxQuantum);
}

/// Parasitic direct resonator-resonator coupling below which it is ignored
/// (two Table-I resonators 100 um apart stay below the MHz scale).
inline constexpr double kParasiticCouplingThresholdGhz = 1e-3;

}  // namespace fluxnet::units
