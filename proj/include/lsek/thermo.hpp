#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>

#include "error.hpp"

namespace lsek {

/// Thermodynamic parameters of the cluster-expansion entropy.
///
/// `prefactor` multiplies e^beta in the closed-form edge integral;
/// `well_depth` is the depth of the Lennard-Jones pair potential used by the
/// Mayer sum. The defaults give a closed-form edge integral of 10e - 10.
struct ThermoParams {
    double beta = 1.0;
    double prefactor = 10.0;
    double r_min = 1.0;
    double r_max = 2.0;
    double delta_r = 0.1;
    double sigma = 1.0;
    double well_depth = 1.0;

    /// R = -(r_max - r_min) / delta_r.
    double radial_offset() const { return -(r_max - r_min) / delta_r; }

    /// Throws ContractError on the first broken invariant.
    void validate() const {
        auto fail = [](const std::string& what) { throw ContractError("thermo params: " + what); };
        if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be positive and finite");
        if (!(r_min > 0.0)) fail("r_min must be positive");
        if (!(r_min < r_max)) fail("r_min must be below r_max");
        if (!(delta_r > 0.0)) fail("delta_r must be positive");
        if (!(sigma > 0.0)) fail("sigma must be positive");
        if (!std::isfinite(radial_offset())) fail("R is not finite");
    }

    friend bool operator==(const ThermoParams&, const ThermoParams&) = default;
};

enum class EntropyMode { closed, mayer };
enum class StirlingMode { leading, improved };

inline const char* to_string(EntropyMode mode) { return mode == EntropyMode::closed ? "closed" : "mayer"; }
inline const char* to_string(StirlingMode mode) { return mode == StirlingMode::leading ? "leading" : "improved"; }

namespace detail {

inline void require_radial_grid(const ThermoParams& p) {
    if (!(p.delta_r > 0.0) || !(p.r_min < p.r_max))
        throw ContractError("thermo params: need delta_r > 0 and r_min < r_max");
}

}  // namespace detail

/// Closed-form edge integral p e^beta + R. Nonpositive values are rejected
/// because the entropy takes ln of it.
inline double edge_integral_closed(const ThermoParams& p) {
    detail::require_radial_grid(p);
    const double value = p.prefactor * std::exp(p.beta) + p.radial_offset();
    if (!(value > 0.0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "edge integral nonpositive; ln epsilon undefined (epsilon = " << value << ")";
        throw DomainError(msg.str());
    }
    return value;
}

/// Number of radial grid points r_min, r_min + dr, ... not exceeding r_max.
inline std::size_t radial_grid_size(const ThermoParams& p) {
    detail::require_radial_grid(p);
    const double steps = (p.r_max - p.r_min) / p.delta_r;
    return static_cast<std::size_t>(std::floor(steps + 1e-9)) + 1;
}

/// Mayer-sum edge integral exp[beta * sum_r exp(-4 w ((s/r)^12 - (s/r)^6))] + R
/// over the radial grid, with no delta_r weight on the sum.
inline double edge_integral_mayer(const ThermoParams& p) {
    const std::size_t points = radial_grid_size(p);
    double sum = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
        const double r = p.r_min + static_cast<double>(k) * p.delta_r;
        const double s6 = std::pow(p.sigma / r, 6);
        sum += std::exp(-4.0 * p.well_depth * (s6 * s6 - s6));
    }
    const double exponent = p.beta * sum;
    if (!std::isfinite(exponent) || exponent > std::log(std::numeric_limits<double>::max())) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "mayer edge integral overflows: exp(" << exponent << ")";
        throw DomainError(msg.str());
    }
    const double value = std::exp(exponent) + p.radial_offset();
    if (!(value > 0.0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "edge integral nonpositive; ln epsilon undefined (epsilon = " << value << ")";
        throw DomainError(msg.str());
    }
    return value;
}

inline double edge_integral(const ThermoParams& p, EntropyMode mode) {
    return mode == EntropyMode::closed ? edge_integral_closed(p) : edge_integral_mayer(p);
}

/// Entropy of a population of n graphlets with l nodes and d edges:
///   S = n { d [ln eps - beta (eps - R)/eps] - l ln l - ln n },
/// zero when n = 0. The improved Stirling variant keeps the -n terms of
/// ln n! and ln l!, adding n (l + 1).
inline double graphlet_entropy(std::int64_t n, std::size_t l, std::size_t d, double epsilon, double beta,
                               double radial_offset, StirlingMode stirling = StirlingMode::leading) {
    if (!(epsilon > 0.0)) throw DomainError("edge integral nonpositive; ln epsilon undefined");
    if (n < 0) throw ContractError("graphlet count must be nonnegative");
    if (n == 0) return 0.0;
    const double count = static_cast<double>(n);
    const double nodes = static_cast<double>(l);
    const double edges = static_cast<double>(d);
    double per = edges * (std::log(epsilon) - beta * (epsilon - radial_offset) / epsilon) - nodes * std::log(nodes) -
                 std::log(count);
    if (stirling == StirlingMode::improved) per += nodes + 1.0;
    return count * per;
}

/// ln z for the same population (leading-order Stirling).
inline double log_partition(std::int64_t n, std::size_t l, std::size_t d, double epsilon) {
    if (n == 0) return 0.0;
    const double count = static_cast<double>(n);
    return count * (static_cast<double>(d) * std::log(epsilon) - static_cast<double>(l) * std::log(static_cast<double>(l))) -
           count * std::log(count);
}

/// Mean energy <U> = -d ln z / d beta with eps(beta) = p e^beta + R.
inline double mean_energy(std::int64_t n, std::size_t d, double epsilon, double radial_offset) {
    return -static_cast<double>(n) * static_cast<double>(d) * (epsilon - radial_offset) / epsilon;
}

/// 64-bit FNV-1a fingerprint of the parameter snapshot.
inline std::uint64_t fingerprint(const ThermoParams& p, EntropyMode mode, StirlingMode stirling) {
    std::uint64_t hash = 14695981039346656037ull;
    auto mix_bytes = [&](const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            hash ^= bytes[i];
            hash *= 1099511628211ull;
        }
    };
    for (double v : {p.beta, p.prefactor, p.r_min, p.r_max, p.delta_r, p.sigma, p.well_depth}) mix_bytes(&v, sizeof v);
    const int tags[2] = {static_cast<int>(mode), static_cast<int>(stirling)};
    mix_bytes(tags, sizeof tags);
    return hash;
}

}  // namespace lsek
