#include "gibbsnet/model/model.hpp"

#include <cmath>
#include <string>

#include "gibbsnet/error.hpp"

namespace gibbsnet::model {

void MixtureQuery::validate() const {
    if (!(x.x1 >= 0.0 && x.x1 <= 1.0) || !(x.x2 >= 0.0 && x.x2 <= 1.0)) {
        throw DomainError("mole fraction outside [0, 1]");
    }
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw DomainError("temperature must be positive");
    }
}

std::vector<double> embed_component(const ModelParameters& params, std::span<const double> descriptor) {
    const DualBackend be(params);
    const auto out = model::embed_component(be, descriptor);
    std::vector<double> v(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        v[i] = out[i].value;
    }
    return v;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ShapeError("cosine_distance: lengths differ");
    }
    double aa = 0.0;
    double bb = 0.0;
    double ab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa += a[i] * a[i];
        bb += b[i] * b[i];
        ab += a[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) {
        throw DegenerateEmbeddingError("cosine_distance: zero-norm vector");
    }
    return 1.0 - ab / std::sqrt(aa * bb);
}

namespace {

void check_dims(const ModelParameters& params, std::span<const double> e1, std::span<const double> e2) {
    const auto& cfg = params.config();
    if (e1.size() != cfg.descriptor_dim || e2.size() != cfg.descriptor_dim) {
        throw ShapeError("descriptor dimension " + std::to_string(e1.size()) + "/" + std::to_string(e2.size()) +
                         " does not match model dimension " + std::to_string(cfg.descriptor_dim));
    }
}

GammaOutputs<ad::Dual> run(const ModelParameters& params, const StandardizedQuery& q) {
    check_dims(params, q.e1, q.e2);
    const DualBackend be(params);
    const auto theta1 = model::embed_component(be, q.e1);
    const auto theta2 = model::embed_component(be, q.e2);
    return predict_from_embeddings(be, std::span<const ad::Dual>(theta1), std::span<const ad::Dual>(theta2),
                                   q.t_star, q.x);
}

GammaPrediction values(const GammaOutputs<ad::Dual>& o) {
    return {o.ln_gamma1.value, o.ln_gamma2.value, o.ge_over_rt.value};
}

}  // namespace

ad::Dual forward_ge(const ModelParameters& params, const StandardizedQuery& q) {
    if (params.config().variant != Variant::hanna) {
        throw ValidationError("forward_ge requires the hanna variant");
    }
    return run(params, q).ge_over_rt;
}

GammaPrediction predict_gammas(const ModelParameters& params, const StandardizedQuery& q) {
    return values(run(params, q));
}

GammaPrediction predict_gammas_ablation(const ModelParameters& params, const StandardizedQuery& q) {
    if (params.config().variant == Variant::hanna) {
        throw ValidationError("predict_gammas_ablation requires an ablation variant");
    }
    return values(run(params, q));
}

PairEvaluator::PairEvaluator(const ModelParameters& params, std::span<const double> e1,
                             std::span<const double> e2, double t_star)
    : params_(&params), t_star_(t_star) {
    check_dims(params, e1, e2);
    const DualBackend be(params);
    theta1_ = model::embed_component(be, e1);
    theta2_ = model::embed_component(be, e2);
}

GammaPrediction PairEvaluator::at(Composition x) const {
    const DualBackend be(*params_);
    return values(predict_from_embeddings(be, std::span<const ad::Dual>(theta1_), std::span<const ad::Dual>(theta2_),
                                          t_star_, x));
}

PairEvaluator PairEvaluator::swapped() const {
    PairEvaluator p;
    p.params_ = params_;
    p.theta1_ = theta2_;
    p.theta2_ = theta1_;
    p.t_star_ = t_star_;
    return p;
}

StandardizedQuery Checkpoint::standardize(const MixtureQuery& q, std::vector<double>& e1_buf,
                                          std::vector<double>& e2_buf) const {
    q.validate();
    e1_buf = stats.apply(q.e1);
    e2_buf = stats.apply(q.e2);
    return {e1_buf, e2_buf, stats.apply_temperature(q.temperature), q.x};
}

GammaPrediction Checkpoint::predict(const MixtureQuery& q) const {
    std::vector<double> e1;
    std::vector<double> e2;
    return predict_gammas(params, standardize(q, e1, e2));
}

}  // namespace gibbsnet::model
