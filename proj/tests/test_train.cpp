#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "gibbsnet/error.hpp"
#include "gibbsnet/io/text.hpp"
#include "gibbsnet/train.hpp"
#include "support/files.hpp"
#include "support/synthetic.hpp"

using namespace gibbsnet;
using namespace gibbsnet::train;

namespace {

struct Prepared {
    support::SyntheticSet set;
    DatasetSplit split;
    StandardizationStats stats;
    PreparedDataset train;
    PreparedDataset val;
};

Prepared prepared(std::size_t components, std::size_t dim, thermo::OracleKind oracle, double noise) {
    Prepared p;
    p.set = support::synthetic_set(components, dim, oracle, noise, 3);
    p.split = split_systems(p.set.records, {0.8, 0.1, 0.1, 0});
    p.stats = fit_standardizer(p.split.train, p.set.table).stats;
    p.train = prepare_dataset(p.split.train, p.set.table, p.stats);
    p.val = prepare_dataset(p.split.val, p.set.table, p.stats);
    return p;
}

model::ModelParameters small_model(std::size_t dim, std::size_t hidden, model::Variant v, std::uint64_t seed) {
    model::ArchitectureConfig c;
    c.descriptor_dim = dim;
    c.hidden = hidden;
    c.variant = v;
    return model::ModelParameters::random(c, seed);
}

TrainConfig quick_config() {
    TrainConfig c;
    c.hidden = 6;
    c.batch_size = 64;
    c.lr0 = 3e-3;
    c.max_epochs = 5;
    return c;
}

}  // namespace

TEST_CASE("smooth L1 values and slopes") {
    CHECK(smooth_l1(0.3, 0.3, 0.25) == 0.0);
    CHECK(smooth_l1(0.1, 0.0, 0.25) == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(smooth_l1(1.0, 0.0, 0.25) == doctest::Approx(0.875).epsilon(1e-15));
    CHECK(smooth_l1(-1.0, 0.0, 0.25) == doctest::Approx(0.875).epsilon(1e-15));
    CHECK(smooth_l1_grad(0.1, 0.0, 0.25) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(smooth_l1_grad(1.0, 0.0, 0.25) == 1.0);
    CHECK(smooth_l1_grad(-1.0, 0.0, 0.25) == -1.0);
    // Continuous value and slope at |d| = β.
    CHECK(smooth_l1(0.25, 0.0, 0.25) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(smooth_l1_grad(0.25 - 1e-12, 0.0, 0.25) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("one ADAM step by hand") {
    TrainConfig c;
    c.weight_decay = 0.0;
    std::vector<double> theta{1.0, -2.0};
    auto s = OptimizerState::init(2, 0.1);
    adam_step(theta, std::vector<double>{0.5, -3.0}, s, c);
    // m̂ = g and v̂ = g² after one step, so Δ = −lr·g/(|g| + ε).
    CHECK(theta[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-15));
    CHECK(theta[1] == doctest::Approx(-2.0 + 0.1 * 3.0 / (3.0 + 1e-8)).epsilon(1e-15));
    CHECK(s.step == 1);
    CHECK(s.m[0] == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(s.v[1] == doctest::Approx(0.009).epsilon(1e-15));
}

TEST_CASE("ADAM with zero gradient") {
    std::vector<double> theta{0.7, -0.4};
    const std::vector<double> zero{0.0, 0.0};
    TrainConfig c;
    c.weight_decay = 0.0;
    auto s = OptimizerState::init(2, 0.01);
    for (int k = 0; k < 5; ++k) adam_step(theta, zero, s, c);
    CHECK(theta == std::vector<double>{0.7, -0.4});

    c.weight_decay = 1e-2;
    s = OptimizerState::init(2, 0.01);
    for (int k = 0; k < 5; ++k) adam_step(theta, zero, s, c);
    CHECK(theta[0] < 0.7);
    CHECK(theta[0] > 0.0);
    CHECK(theta[1] > -0.4);
    CHECK(theta[1] < 0.0);
}

TEST_CASE("ADAM rejects non-finite gradients without touching state") {
    std::vector<double> theta{1.0, 2.0};
    TrainConfig c;
    auto s = OptimizerState::init(2, 0.01);
    CHECK_THROWS_AS(adam_step(theta, std::vector<double>{0.1, std::nan("")}, s, c), ValidationError);
    CHECK(theta == std::vector<double>{1.0, 2.0});
    CHECK(s.step == 0);
    CHECK_THROWS_AS(adam_step(theta, std::vector<double>{0.1}, s, c), ShapeError);
}

TEST_CASE("one ADAM step decreases a convex quadratic") {
    const std::vector<double> curv{1.0, 4.0, 0.5, 2.0};
    std::vector<double> theta{1.0, -0.5, 2.0, 0.3};
    auto loss = [&] {
        double l = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) l += 0.5 * curv[i] * theta[i] * theta[i];
        return l;
    };
    TrainConfig c;
    auto s = OptimizerState::init(theta.size(), 0.05);
    for (int k = 0; k < 20; ++k) {
        std::vector<double> g(theta.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = curv[i] * theta[i];
        const double before = loss();
        adam_step(theta, g, s, c);
        CHECK(loss() < before);
    }
}

TEST_CASE("batch loss counts every available target and its gradient matches finite differences") {
    auto p = prepared(6, 16, thermo::OracleKind::mixed, 0.0);
    auto params = small_model(16, 4, model::Variant::hanna, 9);
    TrainConfig c;

    std::vector<std::uint32_t> batch(40);
    std::iota(batch.begin(), batch.end(), 0u);
    const auto bl = batch_loss(params, p.train, batch, c);
    std::size_t targets = 0;
    for (const auto i : batch) {
        targets += (p.train.samples[i].ln_gamma1 ? 1 : 0) + (p.train.samples[i].ln_gamma2 ? 1 : 0);
    }
    CHECK(bl.targets == targets);
    CHECK(bl.targets < 2 * batch.size());
    REQUIRE(bl.grad.size() == params.size());

    const double h = 1e-6;
    for (std::size_t k = 0; k < params.size(); k += 5) {
        const double keep = params.values()[k];
        params.values()[k] = keep + h;
        const double up = batch_loss(params, p.train, batch, c).loss;
        params.values()[k] = keep - h;
        const double dn = batch_loss(params, p.train, batch, c).loss;
        params.values()[k] = keep;
        const double fd = (up - dn) / (2 * h);
        CAPTURE(k);
        CHECK(std::abs(bl.grad[k] - fd) <= 1e-4 * std::abs(fd) + 1e-8);
    }

    TrainConfig sharded = c;
    sharded.threads = 3;
    const auto bs = batch_loss(params, p.train, batch, sharded);
    CHECK(bs.loss == doctest::Approx(bl.loss).epsilon(1e-12));
    for (std::size_t k = 0; k < params.size(); ++k) {
        CHECK(std::abs(bs.grad[k] - bl.grad[k]) <= 1e-12 * (1 + std::abs(bl.grad[k])));
    }

    const std::vector<std::uint32_t> none;
    CHECK_THROWS_AS(batch_loss(params, p.train, none, c), ValidationError);
}

TEST_CASE("batch loss of a single target is that term") {
    auto p = prepared(4, 16, thermo::OracleKind::margules, 0.0);
    const auto params = small_model(16, 4, model::Variant::hanna, 2);
    std::uint32_t idx = 0;
    while (p.train.samples[idx].ln_gamma2) ++idx;  // x1 = 0 carries only ln γ1
    const std::vector<std::uint32_t> one{idx};
    const auto& s = p.train.samples[idx];
    const auto pred = model::predict_gammas(
        params, {p.train.components[s.c1], p.train.components[s.c2], s.t_star, model::Composition{s.x1, s.x2}});
    const auto bl = batch_loss(params, p.train, one, TrainConfig{});
    CHECK(bl.targets == 1);
    CHECK(bl.loss == doctest::Approx(smooth_l1(pred.ln_gamma1, *s.ln_gamma1, 0.25)).epsilon(1e-14));
}

TEST_CASE("configuration text round trip") {
    TrainConfig c;
    c.lr0 = 1.25e-3;
    c.hidden = 32;
    c.variant = model::Variant::ablation2;
    c.split.seed = 77;
    c.split.train = 0.7;
    c.split.val = 0.2;
    c.split.test = 0.1;
    const auto text = format_config(c);
    const auto back = parse_config(text);
    CHECK(format_config(back) == text);
    CHECK(back.lr0 == 1.25e-3);
    CHECK(back.variant == model::Variant::ablation2);
    CHECK(back.split.seed == 77);

    const auto partial = parse_config("# comment\nbatch_size = 128\n\nthreads=2  # trailing\n");
    CHECK(partial.batch_size == 128);
    CHECK(partial.threads == 2);
    CHECK(partial.lr0 == 5e-4);

    auto line_of = [](std::string_view text) -> std::size_t {
        try {
            parse_config(text);
        } catch (const ParseError& e) {
            return e.position();
        }
        return 0;
    };
    CHECK(line_of("lr0=1e-3\nlearning_rate=3\n") == 2);
    CHECK(line_of("lr0=abc\n") == 1);
    CHECK(line_of("hidden\n") == 1);
    CHECK(line_of("variant=big\n") == 1);

    TrainConfig bad;
    bad.lr0 = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = TrainConfig{};
    bad.batch_size = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("defaults follow the published training setup") {
    const TrainConfig c;
    CHECK(c.lr0 == 0.0005);
    CHECK(c.lr_decay_factor == 0.1);
    CHECK(c.lr_patience == 10);
    CHECK(c.early_stop_patience == 30);
    CHECK(c.batch_size == 512);
    CHECK(c.smoothl1_beta == 0.25);
    CHECK(c.weight_decay == 1e-6);
    CHECK(c.hidden == 96);
}

TEST_CASE("zero epochs returns the initial model") {
    auto p = prepared(6, 16, thermo::OracleKind::mixed, 0.0);
    const auto init = small_model(16, 6, model::Variant::hanna, 1);
    auto c = quick_config();
    c.max_epochs = 0;
    const auto r = fit(p.train, p.val, init, c);
    CHECK(r.history.empty());
    CHECK(r.best_epoch == 0);
    CHECK(r.stop == StopReason::max_epochs);
    CHECK(std::equal(r.best.values().begin(), r.best.values().end(), init.values().begin()));
    CHECK(r.best_val_loss == dataset_loss(init, p.val, c.smoothl1_beta));
}

TEST_CASE("fixed seed gives a bit-identical history; hanna stays Gibbs-Duhem consistent") {
    auto p = prepared(8, 16, thermo::OracleKind::mixed, 0.01);
    const auto init = small_model(16, 6, model::Variant::hanna, 4);
    auto c = quick_config();
    c.threads = 2;
    std::vector<EpochRecord> seen;
    const auto a = fit(p.train, p.val, init, c, [&](const EpochRecord& e) { seen.push_back(e); });
    const auto b = fit(p.train, p.val, init, c);
    CHECK(format_metrics_csv(a.history) == format_metrics_csv(b.history));
    CHECK(seen.size() == a.history.size());
    CHECK(std::equal(a.best.values().begin(), a.best.values().end(), b.best.values().begin()));

    c.seed = 1;
    CHECK(format_metrics_csv(fit(p.train, p.val, init, c).history) != format_metrics_csv(a.history));

    REQUIRE(a.history.size() == 5);
    for (const auto& e : a.history) {
        CHECK(e.gd_msd_train < 1e-12);
        CHECK(e.gd_msd_val < 1e-12);
    }
    CHECK(a.history.back().train_loss < a.history.front().train_loss);
    CHECK(format_metrics_csv(a.history).rfind("epoch,train_loss,val_loss,gd_msd_train,gd_msd_val,lr\n", 0) == 0);
}

TEST_CASE("improving validation loss never decays the learning rate") {
    auto p = prepared(8, 16, thermo::OracleKind::margules, 0.0);
    const auto init = small_model(16, 6, model::Variant::hanna, 5);
    auto c = quick_config();
    c.lr0 = 3e-4;
    c.lr_patience = 1;
    c.max_epochs = 6;
    // Validating on the training records makes steady improvement the expected course.
    const auto r = fit(p.train, p.train, init, c);
    REQUIRE(r.history.size() == 6);
    double prev = dataset_loss(init, p.train, c.smoothl1_beta);
    for (const auto& e : r.history) {
        REQUIRE(e.val_loss < prev);
        CHECK(e.lr == c.lr0);
        prev = e.val_loss;
    }
    CHECK(r.best_epoch == 6);
}

TEST_CASE("plateau decays the learning rate, then early stopping ends the run") {
    auto p = prepared(6, 16, thermo::OracleKind::mixed, 0.0);
    const auto init = small_model(16, 6, model::Variant::hanna, 6);
    auto c = quick_config();
    // Steps of order 1e-300 leave every parameter unchanged: a perfect plateau.
    c.lr0 = 1e-300;
    c.weight_decay = 0.0;
    c.lr_patience = 2;
    c.early_stop_patience = 5;
    c.max_epochs = 50;
    const auto r = fit(p.train, p.val, init, c);
    CHECK(r.stop == StopReason::early_stopping);
    REQUIRE(r.history.size() == 5);
    CHECK(r.best_epoch == 0);
    CHECK(r.history[0].lr == 1e-300);
    CHECK(r.history[2].lr == 1e-300);
    CHECK(r.history[3].lr == doctest::Approx(1e-301));
    CHECK(r.history[4].lr == doctest::Approx(1e-301));
    CHECK(std::equal(r.best.values().begin(), r.best.values().end(), init.values().begin()));
}

TEST_CASE("ablation training shows Gibbs-Duhem deviations") {
    auto p = prepared(8, 16, thermo::OracleKind::mixed, 0.01);
    for (const auto v : {model::Variant::ablation1, model::Variant::ablation2}) {
        auto c = quick_config();
        c.variant = v;
        c.max_epochs = 3;
        const auto r = fit(p.train, p.val, small_model(16, 6, v, 8), c);
        REQUIRE(r.history.size() == 3);
        for (const auto& e : r.history) CHECK(e.gd_msd_train > 1e-6);
    }
}

TEST_CASE("training run writes a complete run directory") {
    auto s = support::synthetic_set(6, 16, thermo::OracleKind::mixed, 0.0, 2);
    auto c = quick_config();
    c.max_epochs = 2;
    const auto run = run_training(s.records, s.table, c);
    CHECK(run.checkpoint.config().hidden == 6);
    CHECK(run.checkpoint.stats == run.standardizer.stats);
    CHECK(run.checkpoint.training.at("epochs_run") == 2);

    support::TempDir dir;
    write_run_directory(run, c, dir.path() / "run");
    for (const char* f : {"config.txt", "metrics.csv", "split.csv", "checkpoint.json"}) {
        CHECK(std::filesystem::exists(dir.path() / "run" / f));
    }
    const auto ck = model::load_checkpoint(dir.path() / "run" / "checkpoint.json");
    CHECK(std::equal(ck.params.values().begin(), ck.params.values().end(), run.result.best.values().begin()));
    const auto cfg = load_config(dir.path() / "run" / "config.txt");
    CHECK(format_config(cfg) == format_config(c));

    s.table = featurize_all(builtin_smiles_corpus(5), 16);
    CHECK_THROWS_AS(run_training(s.records, s.table, c), ValidationError);
}

TEST_CASE("noise-free Margules data is learned to the held-out composition target") {
    auto s = support::synthetic_set(12, 64, thermo::OracleKind::margules, 0.0, 0);
    for (const auto& id : system_ids(s.records)) {
        const auto bar = id.find('|');
        for (const double T : s.spec.temperatures) {
            const auto m = thermo::synthetic_model_for(s.table, id.substr(0, bar), id.substr(bar + 1), T, s.spec);
            CHECK(m.kind == thermo::ReferenceGeModel::Kind::margules);
            CHECK(std::abs(m.margules.A12) <= 2.0);
        }
    }
    TrainConfig c;
    c.hidden = 16;
    c.batch_size = 32;
    c.lr0 = 2e-3;
    c.max_epochs = 150;
    c.early_stop_patience = 20;
    c.lr_patience = 5;
    const auto run = run_training(s.records, s.table, c);
    for (const auto& e : run.result.history) CHECK(e.gd_msd_train < 1e-12);
    const double mae = support::composition_mae(run.checkpoint, s, run.split.systems.train);
    MESSAGE("held-out composition MAE " << mae << " after " << run.result.history.size() << " epochs");
    CHECK(mae < 0.02);
}
