#pragma once

// Reference numbers computed once by an independent dense-diagonalization
// script and frozen here. Reference tensor (166.9, 122.9, 90.0, -90.3) MHz,
// D = 2870 MHz, γe = 2.8025 MHz/G, γn = 1.0705e-3 MHz/G, B = 40.3 G.

#include <array>

namespace frozen {

inline constexpr double kDeltaTheta40Phi90 = 6.237610666;
inline constexpr double kDeltaTheta40Phi0 = 9.593790913;
inline constexpr double kDeltaTheta40Phi45 = 8.092342520;

inline constexpr double kClosedFormPhi90 = 6.217534;
inline constexpr double kClosedFormPhi0 = 9.600106;
inline constexpr double kClosedFormPhi45 = 7.908820;

inline constexpr std::array<double, 6> kEigenvaluesTheta40Phi90{
    -9.42471907, -3.1871084, 2723.56406603, 2849.73093233, 2896.53868041, 3022.7781487};

inline constexpr std::array<double, 4> kMainLinesTheta40Phi90{
    2726.751174437, 2732.988785103, 2852.918040734, 2859.155651399};

inline constexpr double kOmegaPlusTheta40Phi90 = 0.51058;
inline constexpr double kOmegaMinusTheta40Phi90 = 0.48740;

/// Single-transition axis (polar angle, degrees; azimuth 0).
inline constexpr double kStaTheta = 5.00923;
inline constexpr std::array<double, 4> kMainLinesAtSta{
    2700.219220635, 2701.5821824, 2827.083938727, 2828.446900493};

inline constexpr double kSensitivityAxx = 0.0443927;
inline constexpr double kSensitivityAyy = 0.0329678;
inline constexpr double kSensitivityAzz = 0.3404953;
inline constexpr double kSensitivityA = 0.3745186;

inline constexpr double kPrincipalLow = 30.3048;
inline constexpr double kPrincipalHigh = 226.5953;

}  // namespace frozen
