#pragma once

// Constants shared by the scalar and vector elementary functions.

#include <cstdint>

namespace rwrc::kmath::detail {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kLog2e = 1.44269504088896338700e+00;
inline constexpr double kShift = 6755399441055744.0;  // 1.5 * 2^52
inline constexpr double kExpMax = 709.0;
inline constexpr double kExpMin = -708.0;
inline constexpr double kSqrt2 = 1.41421356237309514547;
inline constexpr double kTwoM52 = 2.220446049250313080847e-16;

// Taylor coefficients 1/k!, k = 13 .. 2.
inline constexpr double kExpCoef[] = {
    1.6059043836821614599e-10, 2.0876756987868098979e-09, 2.5052108385441718775e-08,
    2.7557319223985890653e-07, 2.7557319223985890653e-06, 2.4801587301587301566e-05,
    1.9841269841269841253e-04, 1.3888888888888889419e-03, 8.3333333333333332177e-03,
    4.1666666666666664354e-02, 1.6666666666666665741e-01, 5.0000000000000000000e-01};
inline constexpr int kExpCoefCount = 12;

// 1/(2k+1), k = 11 .. 1, for log((1+s)/(1-s)) = 2s(1 + s^2/3 + ...).
inline constexpr double kLogCoef[] = {
    4.3478260869565216e-02, 4.7619047619047616e-02, 5.2631578947368418e-02,
    5.8823529411764705e-02, 6.6666666666666666e-02, 7.6923076923076927e-02,
    9.0909090909090912e-02, 1.1111111111111110e-01, 1.4285714285714285e-01,
    2.0000000000000001e-01, 3.3333333333333331e-01};
inline constexpr int kLogCoefCount = 11;

inline constexpr std::uint64_t kMixC1 = 0xbf58476d1ce4e5b9ULL;
inline constexpr std::uint64_t kMixC2 = 0x94d049bb133111ebULL;

}  // namespace rwrc::kmath::detail
