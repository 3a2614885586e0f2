#pragma once

#include <complex>
#include <random>
#include <vector>

#include "lemlab/poly_core.hpp"

namespace testing_support {

using lemlab::cplx;

inline constexpr std::uint64_t kSeed = 0x45485031;

inline cplx random_in_disk(std::mt19937_64& rng, double radius)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(rng));
    return std::polar(r, 2.0 * lemlab::kPi * u(rng));
}

/// Normalized spec with critical points drawn in D(0, spread), re-centred.
inline lemlab::CriticalSpec random_spec(std::mt19937_64& rng, int n, double spread, double c0_jitter = 0.0)
{
    std::vector<cplx> z;
    for (int k = 0; k < n - 1; ++k)
        z.push_back(random_in_disk(rng, spread));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double c0 = std::min(0.0, -1.0 + c0_jitter * u(rng));
    return lemlab::CriticalSpec::normalized(n, std::move(z), c0);
}

inline std::vector<cplx> random_monic(std::mt19937_64& rng, int n, double coeff_radius)
{
    std::vector<cplx> c;
    for (int k = 0; k < n; ++k)
        c.push_back(random_in_disk(rng, coeff_radius));
    c.push_back(1.0);
    return c;
}

} // namespace testing_support
