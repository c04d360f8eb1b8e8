#include <cmath>
#include <random>
#include <string>

#include "gibbsnet/error.hpp"
#include "gibbsnet/thermo.hpp"

namespace gibbsnet::thermo {

ReferenceGeModel ReferenceGeModel::make_margules(double A12) {
    ReferenceGeModel m;
    m.kind = Kind::margules;
    m.margules.A12 = A12;
    m.validate();
    return m;
}

ReferenceGeModel ReferenceGeModel::make_nrtl(double tau12, double tau21, double alpha) {
    ReferenceGeModel m;
    m.kind = Kind::nrtl;
    m.nrtl = {tau12, tau21, alpha};
    m.validate();
    return m;
}

ReferenceGeModel ReferenceGeModel::swapped() const {
    ReferenceGeModel m = *this;
    std::swap(m.nrtl.tau12, m.nrtl.tau21);
    return m;
}

void ReferenceGeModel::validate() const {
    if (kind == Kind::margules) {
        if (!std::isfinite(margules.A12)) {
            throw ValidationError("Margules A12 must be finite");
        }
        return;
    }
    if (!std::isfinite(nrtl.tau12) || !std::isfinite(nrtl.tau21)) {
        throw ValidationError("NRTL tau must be finite");
    }
    if (!(nrtl.alpha > 0.0 && nrtl.alpha <= 1.0)) {
        throw ValidationError("NRTL alpha must lie in (0, 1]");
    }
}

LnGammaPair reference_gammas(const ReferenceGeModel& m, double x1) {
    const double x2 = 1.0 - x1;
    if (m.kind == ReferenceGeModel::Kind::margules) {
        const double A = m.margules.A12;
        return {A * x2 * x2, A * x1 * x1};
    }
    const auto& p = m.nrtl;
    const double G12 = std::exp(-p.alpha * p.tau12);
    const double G21 = std::exp(-p.alpha * p.tau21);
    const double d1 = x1 + x2 * G21;
    const double d2 = x2 + x1 * G12;
    const double r21 = G21 / d1;
    const double r12 = G12 / d2;
    return {
        x2 * x2 * (p.tau21 * r21 * r21 + p.tau12 * G12 / (d2 * d2)),
        x1 * x1 * (p.tau12 * r12 * r12 + p.tau21 * G21 / (d1 * d1)),
    };
}

double reference_ge_over_rt(const ReferenceGeModel& m, double x1) {
    const double x2 = 1.0 - x1;
    if (m.kind == ReferenceGeModel::Kind::margules) {
        return m.margules.A12 * x1 * x2;
    }
    const auto& p = m.nrtl;
    const double G12 = std::exp(-p.alpha * p.tau12);
    const double G21 = std::exp(-p.alpha * p.tau21);
    return x1 * x2 * (p.tau21 * G21 / (x1 + x2 * G21) + p.tau12 * G12 / (x2 + x1 * G12));
}

}  // namespace gibbsnet::thermo
