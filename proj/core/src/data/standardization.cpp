#include "gibbsnet/standardization.hpp"

#include <cmath>
#include <string>

#include "gibbsnet/error.hpp"

namespace gibbsnet {

StandardizationStats StandardizationStats::identity(std::size_t dim) {
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0), 0.0, 1.0};
}

std::vector<double> StandardizationStats::apply(std::span<const double> descriptor) const {
    if (descriptor.size() != descriptor_mean.size()) {
        throw ShapeError("standardizer: descriptor has " + std::to_string(descriptor.size()) +
                         " entries, statistics have " + std::to_string(descriptor_mean.size()));
    }
    std::vector<double> out(descriptor.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (descriptor[i] - descriptor_mean[i]) / descriptor_std[i];
    }
    return out;
}

std::vector<double> StandardizationStats::invert(std::span<const double> standardized) const {
    if (standardized.size() != descriptor_mean.size()) {
        throw ShapeError("standardizer: dimension mismatch on invert");
    }
    std::vector<double> out(standardized.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = standardized[i] * descriptor_std[i] + descriptor_mean[i];
    }
    return out;
}

void StandardizationStats::validate() const {
    if (descriptor_mean.size() != descriptor_std.size()) {
        throw ValidationError("standardizer: mean and std lengths differ");
    }
    for (std::size_t i = 0; i < descriptor_std.size(); ++i) {
        if (!(descriptor_std[i] > 0.0) || !std::isfinite(descriptor_std[i]) || !std::isfinite(descriptor_mean[i])) {
            throw ValidationError("standardizer: invalid statistics for feature " + std::to_string(i));
        }
    }
    if (!(T_std > 0.0) || !std::isfinite(T_std) || !std::isfinite(T_mean)) {
        throw ValidationError("standardizer: invalid temperature statistics");
    }
}

}  // namespace gibbsnet
