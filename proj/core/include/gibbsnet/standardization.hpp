#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gibbsnet {

/// Per-feature z-score statistics for descriptors and temperature, fitted
/// on the training split only. Mole fractions are never standardized.
struct StandardizationStats {
    std::vector<double> descriptor_mean;
    std::vector<double> descriptor_std;
    double T_mean = 0.0;
    double T_std = 1.0;

    /// mean 0, std 1 for `dim` descriptor features and for T.
    static StandardizationStats identity(std::size_t dim);

    std::size_t dim() const noexcept { return descriptor_mean.size(); }

    std::vector<double> apply(std::span<const double> descriptor) const;
    double apply_temperature(double T) const { return (T - T_mean) / T_std; }

    std::vector<double> invert(std::span<const double> standardized) const;
    double invert_temperature(double t_star) const { return t_star * T_std + T_mean; }

    /// Throws ValidationError unless sizes agree and every std is > 0.
    void validate() const;

    bool operator==(const StandardizationStats&) const = default;
};

}  // namespace gibbsnet
