#pragma once

namespace fluxfocus::constants {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// CODATA 2018
inline constexpr double mu0 = 1.25663706212e-6;        // N/A^2
inline constexpr double bohr_magneton = 9.2740100783e-24; // J/T
inline constexpr double electron_g = 2.00231930436256;   // |g_e|
inline constexpr double planck = 6.62607015e-34;         // J s

inline constexpr double gauss = 1e-4;  // tesla
inline constexpr double nm = 1e-9;

// spin-1 NV centre, m = 2 g mu_B
inline constexpr double nv_moment = 2.0 * electron_g * bohr_magneton;

}  // namespace fluxfocus::constants
