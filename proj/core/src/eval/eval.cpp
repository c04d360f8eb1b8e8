#include "gibbsnet/eval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "gibbsnet/error.hpp"
#include "gibbsnet/io/text.hpp"

namespace gibbsnet::eval {

namespace {

void check_aligned(std::span<const GammaRecord> records, std::span<const RecordPrediction> predictions) {
    if (records.empty()) {
        throw ValidationError("no records to evaluate");
    }
    if (records.size() != predictions.size()) {
        throw ValidationError("prediction count does not match record count");
    }
}

template <class Visit>
void for_each_deviation(std::span<const GammaRecord> records, std::span<const RecordPrediction> predictions,
                        Visit visit) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        const GammaRecord& r = records[i];
        if (!r.ln_gamma1 && !r.ln_gamma2) {
            throw ValidationError("record of system '" + r.system_id + "' has no target");
        }
        if (r.ln_gamma1) visit(r, std::abs(predictions[i].ln_gamma1 - *r.ln_gamma1));
        if (r.ln_gamma2) visit(r, std::abs(predictions[i].ln_gamma2 - *r.ln_gamma2));
    }
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

}  // namespace

std::map<std::string, double> system_mae(std::span<const GammaRecord> records,
                                         std::span<const RecordPrediction> predictions) {
    check_aligned(records, predictions);
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for_each_deviation(records, predictions, [&](const GammaRecord& r, double dev) {
        auto& [sum, n] = acc[r.system_id];
        sum += dev;
        ++n;
    });
    std::map<std::string, double> out;
    for (const auto& [id, sn] : acc) {
        out.emplace(id, sn.first / static_cast<double>(sn.second));
    }
    return out;
}

double point_mae(std::span<const GammaRecord> records, std::span<const RecordPrediction> predictions) {
    check_aligned(records, predictions);
    double sum = 0.0;
    std::size_t n = 0;
    for_each_deviation(records, predictions, [&](const GammaRecord&, double dev) {
        sum += dev;
        ++n;
    });
    return sum / static_cast<double>(n);
}

std::vector<double> cumulative_fraction(std::span<const double> maes, std::span<const double> thresholds) {
    if (maes.empty()) {
        throw ValidationError("cumulative_fraction: no MAE values");
    }
    std::vector<double> sorted(maes.begin(), maes.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(thresholds.size());
    for (const double t : thresholds) {
        const auto below = std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        out.push_back(static_cast<double>(below) / static_cast<double>(sorted.size()));
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw ValidationError("median of an empty set");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double gibbs_duhem_msd(const model::ModelParameters& params, std::span<const model::StandardizedQuery> queries,
                       double h) {
    if (queries.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& q : queries) {
        const model::PairEvaluator ev(params, q.e1, q.e2, q.t_star);
        const double r =
            gibbs_duhem_residual([&](double x) { return ev.at(model::Composition::from_x1(x)); }, q.x.x1, h);
        sum += r * r;
    }
    return sum / static_cast<double>(queries.size());
}

double gibbs_duhem_msd(const thermo::ReferenceGeModel& m, std::span<const double> x1, double h) {
    if (x1.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const double x : x1) {
        const double r = gibbs_duhem_residual([&](double v) { return thermo::reference_gammas(m, v); }, x, h);
        sum += r * r;
    }
    return sum / static_cast<double>(x1.size());
}

std::vector<RecordPrediction> predict_records(const model::Checkpoint& checkpoint,
                                              std::span<const GammaRecord> records, const DescriptorTable& table) {
    if (const auto missing = missing_descriptors(records, table); !missing.empty()) {
        throw ValidationError("missing descriptor for '" + missing.front() + "' and " +
                              std::to_string(missing.size() - 1) + " more");
    }
    std::vector<RecordPrediction> out;
    out.reserve(records.size());
    for (const GammaRecord& r : records) {
        const auto p = checkpoint.predict(model::MixtureQuery::make(table.at(r.smiles_1), table.at(r.smiles_2), r.T, r.x1));
        out.push_back({p.ln_gamma1, p.ln_gamma2});
    }
    return out;
}

bool CertificateReport::passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
}

nlohmann::json CertificateReport::to_json() const {
    nlohmann::json j;
    j["variant"] = variant;
    j["samples"] = samples;
    j["seed"] = seed;
    j["passed"] = passed();
    j["criteria"] = nlohmann::json::array();
    for (const auto& c : criteria) {
        j["criteria"].push_back(
            {{"name", c.name}, {"passed", c.passed}, {"worst_residual", c.worst_residual}, {"tolerance", c.tolerance}});
    }
    return j;
}

CertificateReport consistency_certificate(const model::ModelParameters& params, const CertificateSpec& spec) {
    if (spec.samples == 0) {
        throw ValidationError("certificate needs at least one sample");
    }
    if (!(spec.h > 0.0 && spec.h < 0.5)) {
        throw ValidationError("finite-difference step must lie in (0, 0.5)");
    }
    const std::size_t dim = params.config().descriptor_dim;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(spec.h, 1.0 - spec.h);

    double pure = 0.0;
    double gd = 0.0;
    double pseudo = 0.0;
    double perm = 0.0;
    std::vector<double> e1(dim);
    std::vector<double> e2(dim);
    for (std::size_t s = 0; s < spec.samples; ++s) {
        for (auto& v : e1) v = normal(rng);
        for (auto& v : e2) v = normal(rng);
        const double t_star = normal(rng);
        const auto x = model::Composition::from_x1(uniform(rng));

        const model::PairEvaluator ev(params, e1, e2, t_star);
        pure = std::max({pure, std::abs(ev.at({1.0, 0.0}).ln_gamma1), std::abs(ev.at({0.0, 1.0}).ln_gamma2)});

        gd = std::max(gd, std::abs(gibbs_duhem_residual(
                              [&](double v) { return ev.at(model::Composition::from_x1(v)); }, x.x1, spec.h)));

        const auto same = model::PairEvaluator(params, e1, e1, t_star).at(x);
        pseudo = std::max({pseudo, std::abs(same.ln_gamma1), std::abs(same.ln_gamma2)});

        const auto fwd = ev.at(x);
        const auto rev = ev.swapped().at(x.swapped());
        if (!same_bits(fwd.ln_gamma1, rev.ln_gamma2) || !same_bits(fwd.ln_gamma2, rev.ln_gamma1) ||
            !same_bits(fwd.ge_over_rt, rev.ge_over_rt)) {
            perm = std::max({perm, std::abs(fwd.ln_gamma1 - rev.ln_gamma2), std::abs(fwd.ln_gamma2 - rev.ln_gamma1),
                             std::abs(fwd.ge_over_rt - rev.ge_over_rt)});
            if (perm == 0.0) {
                perm = std::numeric_limits<double>::min();  // signed zeros or NaN differ
            }
        }
    }

    CertificateReport r;
    r.variant = std::string(model::to_string(params.config().variant));
    r.samples = spec.samples;
    r.seed = spec.seed;
    r.criteria = {
        {"pure_component_limit", pure == 0.0, pure, 0.0},
        {"gibbs_duhem", gd < spec.gibbs_duhem_tolerance, gd, spec.gibbs_duhem_tolerance},
        {"pseudo_binary", pseudo == 0.0, pseudo, 0.0},
        {"permutation", perm == 0.0, perm, 0.0},
    };
    return r;
}

std::string format_mae_histogram_csv(std::span<const double> maes, double bin_width, std::span<const double> baseline) {
    if (!(bin_width > 0.0)) {
        throw ValidationError("histogram bin width must be positive");
    }
    if (maes.empty()) {
        throw ValidationError("histogram of an empty MAE set");
    }
    double hi = *std::max_element(maes.begin(), maes.end());
    if (!baseline.empty()) {
        hi = std::max(hi, *std::max_element(baseline.begin(), baseline.end()));
    }
    const auto bins = static_cast<std::size_t>(std::floor(hi / bin_width)) + 1;
    auto counts = [&](std::span<const double> v) {
        std::vector<std::size_t> c(bins, 0);
        for (const double m : v) {
            c[std::min(bins - 1, static_cast<std::size_t>(std::floor(m / bin_width)))]++;
        }
        return c;
    };
    const auto main = counts(maes);
    const auto base = counts(baseline);
    std::string out = "bin_lo,bin_hi,count,cumulative_fraction,baseline_count,baseline_cumulative_fraction\n";
    std::size_t cum = 0;
    std::size_t base_cum = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        cum += main[b];
        base_cum += base[b];
        out += io::format_double(static_cast<double>(b) * bin_width) + ',' +
               io::format_double(static_cast<double>(b + 1) * bin_width) + ',' + std::to_string(main[b]) + ',' +
               io::format_double(static_cast<double>(cum) / static_cast<double>(maes.size())) + ',';
        if (!baseline.empty()) {
            out += std::to_string(base[b]) + ',' +
                   io::format_double(static_cast<double>(base_cum) / static_cast<double>(baseline.size()));
        } else {
            out += ',';
        }
        out += '\n';
    }
    return out;
}

std::map<std::string, double> parse_baseline_csv(std::string_view text) {
    io::LineReader lines(text);
    std::string_view line;
    if (!lines.next(line) || line != "system_id,mae") {
        throw ParseError("baseline file line 1: expected header 'system_id,mae'", 1);
    }
    std::map<std::string, double> out;
    while (lines.next(line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = io::split_csv(line);
        try {
            if (cells.size() != 2) {
                throw ValidationError("expected 2 columns");
            }
            const double mae = io::parse_double(cells[1]);
            if (!(mae >= 0.0)) {
                throw ValidationError("MAE must be non-negative");
            }
            if (!out.emplace(std::string(cells[0]), mae).second) {
                throw ValidationError("duplicate system '" + std::string(cells[0]) + "'");
            }
        } catch (const ValidationError& e) {
            throw ParseError("baseline file line " + std::to_string(lines.line_number()) + ": " + e.what(),
                             lines.line_number());
        }
    }
    return out;
}

}  // namespace gibbsnet::eval
