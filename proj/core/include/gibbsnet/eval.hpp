#pragma once

/**
 * @file eval.hpp
 * @brief Error metrics and thermodynamic-consistency audits.
 */

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gibbsnet/data.hpp"
#include "gibbsnet/model/model.hpp"
#include "gibbsnet/thermo.hpp"

namespace gibbsnet::eval {

inline constexpr double kDefaultFiniteDifferenceStep = 1e-4;

/// Predicted ln γ aligned with a record (index i ↔ records[i]).
struct RecordPrediction {
    double ln_gamma1 = 0.0;
    double ln_gamma2 = 0.0;
};

/// Per-system mean of |pred − target| over every available target. A record
/// with both targets contributes two deviations. Throws ValidationError for
/// empty input, a size mismatch or a record without targets.
std::map<std::string, double> system_mae(std::span<const GammaRecord> records,
                                         std::span<const RecordPrediction> predictions);

/// Mean of |pred − target| over all available targets (no per-system weighting).
double point_mae(std::span<const GammaRecord> records, std::span<const RecordPrediction> predictions);

/// Share of values strictly below each threshold. Throws for empty `maes`.
std::vector<double> cumulative_fraction(std::span<const double> maes, std::span<const double> thresholds);

double median(std::vector<double> values);

/// x1·D1 + x2·D2 with D_i the central difference of ln γ_i over [x1 − h, x1 + h].
/// x1 is clamped to [h, 1 − h]. `f(x1)` returns something with members
/// ln_gamma1 and ln_gamma2.
template <class F>
double gibbs_duhem_residual(const F& f, double x1, double h = kDefaultFiniteDifferenceStep) {
    if (x1 < h) x1 = h;
    if (x1 > 1.0 - h) x1 = 1.0 - h;
    const auto hi = f(x1 + h);
    const auto lo = f(x1 - h);
    const double d1 = (hi.ln_gamma1 - lo.ln_gamma1) / (2.0 * h);
    const double d2 = (hi.ln_gamma2 - lo.ln_gamma2) / (2.0 * h);
    return x1 * d1 + (1.0 - x1) * d2;
}

/// Mean squared Gibbs-Duhem residual of a model over standardized queries.
double gibbs_duhem_msd(const model::ModelParameters& params, std::span<const model::StandardizedQuery> queries,
                       double h = kDefaultFiniteDifferenceStep);

/// The same metric for an analytic reference model at the given compositions.
double gibbs_duhem_msd(const thermo::ReferenceGeModel& m, std::span<const double> x1,
                       double h = kDefaultFiniteDifferenceStep);

/// Predicted ln γ for every record, via the checkpoint's standardization.
std::vector<RecordPrediction> predict_records(const model::Checkpoint& checkpoint,
                                              std::span<const GammaRecord> records, const DescriptorTable& table);

struct CertificateSpec {
    std::size_t samples = 100;
    std::uint64_t seed = 0;
    double h = kDefaultFiniteDifferenceStep;
    double gibbs_duhem_tolerance = 1e-6;
};

struct CriterionResult {
    std::string name;
    bool passed = false;
    double worst_residual = 0.0;
    double tolerance = 0.0;  // 0 means exact equality required
};

/// Pass/fail for the four consistency criteria over random queries:
///   pure_component_limit   ln γ1(x1 = 1) = 0 and ln γ2(x1 = 0) = 0 exactly
///   gibbs_duhem            |residual| below tolerance at interior x1
///   pseudo_binary          identical components give ln γ1 = ln γ2 = 0 exactly
///   permutation            swapping the components swaps the outputs bit-exactly
/// Queries use standard-normal standardized descriptors and temperatures and
/// x1 uniform on [h, 1 − h].
struct CertificateReport {
    std::string variant;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<CriterionResult> criteria;

    bool passed() const;
    nlohmann::json to_json() const;
};

CertificateReport consistency_certificate(const model::ModelParameters& params, const CertificateSpec& spec);

/// Histogram of per-system MAE with the given bin width, plus the cumulative
/// fraction at each upper bin edge. The baseline columns are filled when
/// `baseline` is non-empty. Columns:
/// `bin_lo,bin_hi,count,cumulative_fraction,baseline_count,baseline_cumulative_fraction`.
std::string format_mae_histogram_csv(std::span<const double> maes, double bin_width,
                                     std::span<const double> baseline = {});

/// Reads `system_id,mae` rows of externally computed baseline errors.
std::map<std::string, double> parse_baseline_csv(std::string_view text);

}  // namespace gibbsnet::eval
