#pragma once
// Generated by tests/oracles/gen_oracles.py (mpmath); do not edit.

#include <complex>

namespace oracle {

inline constexpr double kFriedR0 = 0.00016162840959000131;  // 632.8 nm, 5e-8 m^-2/3, 1 m
inline constexpr double kPsd100 = 0.0021616616615590365;
inline constexpr double kRayleigh = 19.858360642160514;
inline constexpr double kWaistAt1m = 0.002002534184057891;

struct KummerCase { double a, b; std::complex<double> x, value; };
inline const KummerCase kKummer[] = {
    {1.5, 2, {-3.0, 0.0}, {0.14839422163323267, 0.0}},
    {2, 3, {-30.0, -10.0}, {0.0016000000000037574, -0.0012000000000048005}},
    {3.5, 6, {0.5, 12.0}, {-0.081749325531648333, 0.064572137397741814}},
    {1.5, 2, {-2.0, -400.0}, {-0.0074831731514679171, 0.0016939844264022735}},
    {3, 5, {-1.5, -3000.0}, {2.902918512902106e-7, 6.6002691896076245e-8}},
    {2.5, 4, {0.040000000000000001, -50.0}, {-0.011496029046840192, 0.0073943658284951513}},
    {7, 13, {-20.0, -900.0}, {-1.6081425694638015e-15, 8.1677428383053179e-15}},
    {0.5, 1.5, {2.5, 0.0}, {3.1222774531290055, 0.0}},
    {4, 7, {-60.0, -0.5}, {2.42127414430352e-5, -7.7906954691699322e-7}},
    {1, 2, {1.0, 0.0}, {1.7182818284590452, 0.0}},
};

struct HyggCase { int ell; double r1, theta1, z; std::complex<double> value; };
inline const HyggCase kHygg[] = {
    {1, 0.5e-3, 0.3, 0.4, {-0.17048572435440055, -0.86138710500338572}},
    {3, 1.2e-3, -2.0, 0.7, {-0.2725281811148838, 0.45436865210077646}},
    {5, 0.9e-3, 1.0, 1.0, {-0.4587762883613378, 0.12196066702423954}},
    {0, 0.7e-3, 0, 1.0, {0.50821406789085529, -0.48892882512099753}},
    {4, 2.0e-3, 2.5, 0.5, {-0.19061477816780173, 0.26722172478871718}},
};

inline constexpr double kLogGammaHalf = 0.57236494292470009;
inline constexpr double kLogGamma5 = 3.1780538303479456;
inline constexpr double kLogGamma7_5 = 7.534364236758733;
inline constexpr double kLn65 = 4.1743872698956371;

}  // namespace oracle
