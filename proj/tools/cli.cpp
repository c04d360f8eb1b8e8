#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gibbsnet/descriptors.hpp"
#include "gibbsnet/error.hpp"
#include "gibbsnet/eval.hpp"
#include "gibbsnet/io/text.hpp"
#include "gibbsnet/model/model.hpp"
#include "gibbsnet/thermo.hpp"
#include "gibbsnet/train.hpp"

namespace gibbsnet::cli {

namespace {

struct UsageError : Error {
    using Error::Error;
};

std::string num(double v) { return io::format_double(v + 0.0); }  // prints -0 as 0

std::vector<std::string> read_smiles_list(const std::string& path) {
    const std::string text = io::read_file(path);
    io::LineReader lines(text);
    std::string_view line;
    std::vector<std::string> out;
    while (lines.next(line)) {
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string_view::npos || line[b] == '#') {
            continue;
        }
        const auto e = line.find_last_not_of(" \t");
        const std::string smiles(line.substr(b, e - b + 1));
        try {
            tokenize_smiles(smiles);
        } catch (const ParseError& err) {
            throw ParseError(path + " line " + std::to_string(lines.line_number()) + ": " + err.what(),
                             lines.line_number());
        }
        out.push_back(smiles);
    }
    if (out.empty()) {
        throw ValidationError(path + ": no SMILES found");
    }
    return out;
}

// ---- featurize -------------------------------------------------------------

struct FeaturizeArgs {
    std::string smiles_file;
    std::optional<std::size_t> dim;
    std::uint64_t seed = kDefaultFeaturizerSeed;
    std::string out;
    std::string from_embeddings;
};

int featurize_cmd(const FeaturizeArgs& a, std::ostream& out) {
    DescriptorTable table;
    if (!a.from_embeddings.empty()) {
        const DescriptorTable ext = load_descriptor_table(a.from_embeddings);
        if (a.dim && *a.dim != ext.dim) {
            throw ValidationError(a.from_embeddings + ": descriptor dimension " + std::to_string(ext.dim) +
                                  " does not match --dim " + std::to_string(*a.dim));
        }
        if (a.smiles_file.empty()) {
            table = ext;
        } else {
            table.dim = ext.dim;
            table.source = ext.source;
            table.seed = ext.seed;
            for (const auto& s : read_smiles_list(a.smiles_file)) {
                const auto* v = ext.find(s);
                if (!v) {
                    throw ValidationError(a.from_embeddings + ": no embedding for '" + s + "'");
                }
                if (!table.find(s)) {
                    table.insert(s, *v);
                }
            }
        }
    } else {
        if (a.smiles_file.empty()) {
            throw UsageError("featurize needs --smiles-file or --from-embeddings");
        }
        auto list = read_smiles_list(a.smiles_file);
        std::vector<std::string> unique;
        for (auto& s : list) {
            if (std::find(unique.begin(), unique.end(), s) == unique.end()) {
                unique.push_back(std::move(s));
            }
        }
        table = featurize_all(unique, a.dim.value_or(kDefaultDescriptorDim), a.seed);
    }
    write_descriptor_table(table, a.out);
    out << "wrote " << table.order().size() << " descriptors (dim " << table.dim << ", source " << table.source
        << ") to " << a.out << '\n';
    return kSuccess;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
    std::size_t components = 20;
    std::string oracle = "mixed";
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string descriptors_out;
    std::size_t dim = kDefaultDescriptorDim;
};

int synth_cmd(const SynthArgs& a, std::ostream& out) {
    if (a.components < 2) {
        throw UsageError("--components must be at least 2");
    }
    if (!(a.noise >= 0.0)) {
        throw UsageError("--noise must be non-negative");
    }
    thermo::SynthesisSpec spec;
    spec.oracle = thermo::parse_oracle_kind(a.oracle);
    spec.noise_sigma = a.noise;
    spec.seed = a.seed;
    const auto corpus = builtin_smiles_corpus(a.components);
    const DescriptorTable table = featurize_all(corpus, a.dim);
    const auto records = thermo::synthesize_dataset(table, spec);
    write_dataset_csv(records, a.out);
    std::string desc_path = a.descriptors_out;
    if (desc_path.empty()) {
        desc_path = std::filesystem::path(a.out).replace_extension(".descriptors.csv").string();
    }
    write_descriptor_table(table, desc_path);
    out << "wrote " << records.size() << " records for " << system_ids(records).size() << " systems to " << a.out
        << " and " << table.order().size() << " descriptors to " << desc_path << '\n';
    return kSuccess;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
    std::string data;
    std::string descriptors;
    std::string config;
    std::string outdir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> variant;
    std::optional<std::size_t> max_epochs;
    std::optional<std::size_t> hidden;
    bool quiet = false;
};

int train_cmd(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    train::TrainConfig config;
    if (!a.config.empty()) {
        config = train::load_config(a.config, config);
    }
    if (a.seed) config.seed = *a.seed;
    if (a.variant) config.variant = model::parse_variant(*a.variant);
    if (a.max_epochs) config.max_epochs = *a.max_epochs;
    if (a.hidden) config.hidden = *a.hidden;
    config.validate();

    const IngestResult ingest = ingest_csv(a.data);
    for (const auto& r : ingest.rejected) {
        err << a.data << " line " << r.line << ": rejected: " << r.reason << '\n';
    }
    if (ingest.dropped_high_pressure > 0) {
        err << a.data << ": dropped " << ingest.dropped_high_pressure << " records above "
            << num(kMaxVlePressureBar) << " bar\n";
    }
    const DescriptorTable table = load_descriptor_table(a.descriptors);
    if (const auto missing = missing_descriptors(ingest.records, table); !missing.empty()) {
        err << "missing descriptors for " << missing.size() << " SMILES:\n";
        for (const auto& s : missing) {
            err << "  " << s << '\n';
        }
        return kFailure;
    }

    const auto run = train::run_training(ingest.records, table, config, [&](const train::EpochRecord& e) {
        if (!a.quiet) {
            err << "epoch " << e.epoch << " train " << num(e.train_loss) << " val " << num(e.val_loss) << " gd_msd "
                << num(e.gd_msd_val) << " lr " << num(e.lr) << '\n';
        }
    });
    train::write_run_directory(run, config, a.outdir);

    nlohmann::json summary = run.checkpoint.training;
    if (!run.split.test.empty()) {
        const auto preds = eval::predict_records(run.checkpoint, run.split.test, table);
        const auto maes = eval::system_mae(run.split.test, preds);
        std::vector<double> values;
        for (const auto& [id, m] : maes) values.push_back(m);
        const double threshold = 0.1;
        summary["test"] = {{"systems", maes.size()},
                           {"point_mae", eval::point_mae(run.split.test, preds)},
                           {"median_system_mae", eval::median(values)},
                           {"fraction_below_0.1", eval::cumulative_fraction(values, {&threshold, 1})[0]}};
    }
    io::write_file(std::filesystem::path(a.outdir) / "summary.json", summary.dump(2) + "\n");
    out << "stopped: " << train::to_string(run.result.stop) << " (" << run.result.message << ")\n"
        << "best epoch " << run.result.best_epoch << ", val loss " << num(run.result.best_val_loss) << '\n';
    if (summary.contains("test")) {
        out << "test point MAE " << num(summary["test"]["point_mae"].get<double>()) << ", median system MAE "
            << num(summary["test"]["median_system_mae"].get<double>()) << '\n';
    }
    out << "run directory: " << a.outdir << '\n';
    return run.result.stop == train::StopReason::diverged ? kFailure : kSuccess;
}

// ---- predict / vle ---------------------------------------------------------

struct PredictArgs {
    std::string checkpoint;
    std::string descriptors;
    std::string smiles1;
    std::string smiles2;
    double T = 298.15;
    std::optional<double> x1;
    std::optional<std::size_t> grid;
    std::string antoine;
};

std::vector<double> component_descriptor(const model::Checkpoint& c, const std::optional<DescriptorTable>& table,
                                         const std::string& smiles) {
    if (table) {
        const auto* v = table->find(smiles);
        if (!v) {
            throw ValidationError("no descriptor for '" + smiles + "'");
        }
        return *v;
    }
    if (c.descriptor_source != "featurizer") {
        throw UsageError("checkpoint was trained on '" + c.descriptor_source +
                         "' descriptors; pass --descriptors with the same source");
    }
    return featurize(smiles, c.config().descriptor_dim, c.descriptor_seed).vector;
}

int predict_cmd(const PredictArgs& a, bool with_vle, std::ostream& out, std::ostream& err) {
    if (a.x1.has_value() == a.grid.has_value()) {
        throw UsageError("give exactly one of --x1 and --grid");
    }
    if (a.grid && *a.grid < 2) {
        throw UsageError("--grid needs at least 2 points");
    }
    if (a.x1 && !(*a.x1 >= 0.0 && *a.x1 <= 1.0)) {
        throw UsageError("--x1 must lie in [0, 1]");
    }
    if (!(a.T > 0.0)) {
        throw UsageError("--T must be positive");
    }
    const model::Checkpoint c = model::load_checkpoint(a.checkpoint);
    std::optional<DescriptorTable> table;
    if (!a.descriptors.empty()) {
        table = load_descriptor_table(a.descriptors);
    }
    const auto e1 = component_descriptor(c, table, a.smiles1);
    const auto e2 = component_descriptor(c, table, a.smiles2);

    std::optional<thermo::Pressure> p1;
    std::optional<thermo::Pressure> p2;
    if (with_vle) {
        const auto antoine = thermo::load_antoine_table(a.antoine);
        const auto lookup = [&](const std::string& s) {
            const auto it = antoine.find(s);
            if (it == antoine.end()) {
                throw ValidationError(a.antoine + ": no Antoine parameters for '" + s + "'");
            }
            bool outside = false;
            const auto p = thermo::antoine_pressure(it->second, a.T, &outside);
            if (outside) {
                err << "warning: T = " << num(a.T) << " K is outside the Antoine range of '" << s << "'\n";
            }
            return p.to(thermo::PressureUnit::kpa);
        };
        p1 = lookup(a.smiles1);
        p2 = lookup(a.smiles2);
    }

    std::vector<double> xs;
    if (a.x1) {
        xs.push_back(*a.x1);
    } else {
        for (std::size_t i = 0; i < *a.grid; ++i) {
            xs.push_back(static_cast<double>(i) / static_cast<double>(*a.grid - 1));
        }
    }
    std::vector<double> e1s;
    std::vector<double> e2s;
    const auto q0 = c.standardize(model::MixtureQuery::make(e1, e2, a.T, 0.5), e1s, e2s);
    const model::PairEvaluator ev(c.params, q0.e1, q0.e2, q0.t_star);

    out << "x1,ge_over_rt,ln_gamma_1,ln_gamma_2" << (with_vle ? ",p_kPa,y1" : "") << '\n';
    for (const double x : xs) {
        const auto g = ev.at(model::Composition::from_x1(x));
        out << num(x) << ',' << num(g.ge_over_rt) << ',' << num(g.ln_gamma1) << ',' << num(g.ln_gamma2);
        if (with_vle) {
            const auto bp = thermo::bubble_point_isothermal(x, std::exp(g.ln_gamma1), std::exp(g.ln_gamma2), *p1, *p2);
            out << ',' << num(bp.p.value) << ',' << num(bp.y1);
        }
        out << '\n';
    }
    return kSuccess;
}

// ---- audit -----------------------------------------------------------------

struct AuditArgs {
    std::string checkpoint;
    long long samples = 100;
    std::uint64_t seed = 0;
};

int audit_cmd(const AuditArgs& a, std::ostream& out) {
    if (a.samples <= 0) {
        throw UsageError("--samples must be positive");
    }
    const model::Checkpoint c = model::load_checkpoint(a.checkpoint);
    eval::CertificateSpec spec;
    spec.samples = static_cast<std::size_t>(a.samples);
    spec.seed = a.seed;
    const auto report = eval::consistency_certificate(c.params, spec);
    out << report.to_json().dump(2) << '\n';
    return report.passed() ? kSuccess : kFailure;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
    std::string checkpoint;
    std::string data;
    std::string descriptors;
    std::string split;
    std::string part = "test";
    double bin_width = 0.02;
    std::string baseline;
    std::string out_prefix;
};

int evaluate_cmd(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    if (!(a.bin_width > 0.0)) {
        throw UsageError("--bin-width must be positive");
    }
    const model::Checkpoint c = model::load_checkpoint(a.checkpoint);
    const DescriptorTable table = load_descriptor_table(a.descriptors);
    const IngestResult ingest = ingest_csv(a.data);
    for (const auto& r : ingest.rejected) {
        err << a.data << " line " << r.line << ": rejected: " << r.reason << '\n';
    }
    std::vector<GammaRecord> records;
    if (a.split.empty()) {
        records = ingest.records;
    } else {
        const SystemSplit split = parse_split_csv(io::read_file(a.split));
        SplitPart part;
        if (a.part == "train") part = SplitPart::train;
        else if (a.part == "val") part = SplitPart::val;
        else if (a.part == "test") part = SplitPart::test;
        else throw UsageError("--part must be train, val or test");
        for (const auto& r : ingest.records) {
            if (split.part_of(r.system_id) == part) {
                records.push_back(r);
            }
        }
    }
    if (records.empty()) {
        throw ValidationError("no records to evaluate");
    }
    const auto preds = eval::predict_records(c, records, table);
    const auto maes = eval::system_mae(records, preds);

    std::vector<double> values;
    std::string mae_csv = "system_id,mae\n";
    for (const auto& [id, m] : maes) {
        values.push_back(m);
        mae_csv += id + ',' + num(m) + '\n';
    }
    std::vector<double> baseline_values;
    if (!a.baseline.empty()) {
        const auto base = eval::parse_baseline_csv(io::read_file(a.baseline));
        for (const auto& [id, m] : maes) {
            const auto it = base.find(id);
            if (it == base.end()) {
                throw ValidationError(a.baseline + ": no baseline MAE for system '" + id + "'");
            }
            baseline_values.push_back(it->second);
        }
    }
    const std::vector<double> thresholds{0.05, 0.1, 0.2, 0.3};
    const auto fractions = eval::cumulative_fraction(values, thresholds);
    nlohmann::json summary{{"records", records.size()},
                           {"systems", maes.size()},
                           {"point_mae", eval::point_mae(records, preds)},
                           {"median_system_mae", eval::median(values)},
                           {"fraction_below", nlohmann::json::object()}};
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        summary["fraction_below"][num(thresholds[i])] = fractions[i];
    }
    if (!a.out_prefix.empty()) {
        io::write_file(a.out_prefix + "system_mae.csv", mae_csv);
        io::write_file(a.out_prefix + "mae_histogram.csv",
                       eval::format_mae_histogram_csv(values, a.bin_width, baseline_values));
        io::write_file(a.out_prefix + "summary.json", summary.dump(2) + "\n");
    }
    out << summary.dump(2) << '\n';
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Thermodynamically consistent activity coefficients of binary mixtures"};
    app.name(args.empty() ? "gibbsnet" : args[0]);
    app.require_subcommand(1);

    FeaturizeArgs fa;
    auto* featurize = app.add_subcommand("featurize", "Build a descriptor table from SMILES");
    featurize->add_option("--smiles-file", fa.smiles_file, "One SMILES per line")->check(CLI::ExistingFile);
    featurize->add_option("--dim", fa.dim, "Descriptor width (default 384, the language-model embedding width)");
    featurize->add_option("--seed", fa.seed, "Featurizer hash seed")->capture_default_str();
    featurize->add_option("--out", fa.out, "Output descriptor CSV")->required();
    featurize->add_option("--from-embeddings", fa.from_embeddings, "Validate and pass through an external table")
        ->check(CLI::ExistingFile);

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset from Margules/NRTL reference models");
    synth->add_option("--components", sa.components, "Number of components N (C(N,2) systems)")->capture_default_str();
    synth->add_option("--oracle", sa.oracle, "margules, nrtl or mixed")->capture_default_str();
    synth->add_option("--noise", sa.noise, "Gaussian noise sigma on ln gamma")->capture_default_str();
    synth->add_option("--seed", sa.seed, "Noise seed")->capture_default_str();
    synth->add_option("--dim", sa.dim, "Descriptor width")->capture_default_str();
    synth->add_option("--out", sa.out, "Output dataset CSV")->required();
    synth->add_option("--descriptors-out", sa.descriptors_out,
                      "Output descriptor CSV (default: <out> with extension .descriptors.csv)");

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Train a model; defaults: lr 0.0005, batch 512, SmoothL1 beta 0.25, "
                                              "weight decay 1e-6, 96 hidden nodes, plateau factor 0.1 / patience 10, "
                                              "early stopping after 30 epochs");
    train->add_option("--data", ta.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--descriptors", ta.descriptors, "Descriptor CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--config", ta.config, "key=value file overriding training defaults")->check(CLI::ExistingFile);
    train->add_option("--outdir", ta.outdir, "Run directory")->required();
    train->add_option("--seed", ta.seed, "Initialization and shuffling seed (default 0)");
    train->add_option("--variant", ta.variant, "hanna, ablation1 or ablation2 (default hanna)");
    train->add_option("--max-epochs", ta.max_epochs, "Epoch limit (default 1000)");
    train->add_option("--hidden", ta.hidden, "Nodes per hidden layer (default 96)");
    train->add_flag("--quiet", ta.quiet, "No per-epoch progress on stderr");

    PredictArgs pa;
    auto add_predict_options = [&](CLI::App* cmd) {
        cmd->add_option("--checkpoint", pa.checkpoint, "Checkpoint JSON")->required()->check(CLI::ExistingFile);
        cmd->add_option("--descriptors", pa.descriptors, "Descriptor CSV (default: featurize with the checkpoint's seed)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--smiles1", pa.smiles1, "Component 1")->required();
        cmd->add_option("--smiles2", pa.smiles2, "Component 2")->required();
        cmd->add_option("--T", pa.T, "Temperature in K")->capture_default_str();
        cmd->add_option("--x1", pa.x1, "Single mole fraction of component 1");
        cmd->add_option("--grid", pa.grid, "Evenly spaced x1 grid with N points including 0 and 1");
    };
    auto* predict = app.add_subcommand("predict", "Predict gE/RT and ln gamma");
    add_predict_options(predict);
    auto* vle = app.add_subcommand("vle", "Isothermal bubble-point pressure and vapor composition");
    add_predict_options(vle);
    vle->add_option("--antoine", pa.antoine, "Antoine CSV")->required()->check(CLI::ExistingFile);

    AuditArgs aa;
    auto* audit = app.add_subcommand("audit", "Check the four consistency criteria on random queries");
    audit->add_option("--checkpoint", aa.checkpoint, "Checkpoint JSON")->required()->check(CLI::ExistingFile);
    audit->add_option("--samples", aa.samples, "Random queries")->capture_default_str();
    audit->add_option("--seed", aa.seed, "Query seed")->capture_default_str();

    EvaluateArgs ea;
    auto* evaluate = app.add_subcommand("evaluate", "System-specific MAE and cumulative fractions");
    evaluate->add_option("--checkpoint", ea.checkpoint, "Checkpoint JSON")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--data", ea.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--descriptors", ea.descriptors, "Descriptor CSV")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--split", ea.split, "split.csv from a training run")->check(CLI::ExistingFile);
    evaluate->add_option("--part", ea.part, "train, val or test")->capture_default_str();
    evaluate->add_option("--bin-width", ea.bin_width, "Histogram bin width")->capture_default_str();
    evaluate->add_option("--baseline", ea.baseline, "system_id,mae CSV of a baseline model")
        ->check(CLI::ExistingFile);
    evaluate->add_option("--out-prefix", ea.out_prefix, "Prefix for CSV/JSON outputs");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) {
        reversed.pop_back();
    }
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (*featurize) return featurize_cmd(fa, out);
        if (*synth) return synth_cmd(sa, out);
        if (*train) return train_cmd(ta, out, err);
        if (*predict) return predict_cmd(pa, false, out, err);
        if (*vle) return predict_cmd(pa, true, out, err);
        if (*audit) return audit_cmd(aa, out);
        if (*evaluate) return evaluate_cmd(ea, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace gibbsnet::cli
