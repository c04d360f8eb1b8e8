#include <cmath>
#include <string>

#include "gibbsnet/error.hpp"
#include "gibbsnet/io/text.hpp"
#include "gibbsnet/thermo.hpp"

namespace gibbsnet::thermo {

namespace {

double pascals_per(PressureUnit u) {
    switch (u) {
        case PressureUnit::pa:
            return 1.0;
        case PressureUnit::kpa:
            return 1e3;
        case PressureUnit::bar:
            return 1e5;
        case PressureUnit::mmhg:
            return 101325.0 / 760.0;
    }
    throw InternalError("unknown pressure unit");
}

void require_same_unit(const Pressure& a, const Pressure& b) {
    if (a.unit != b.unit) {
        throw DomainError(std::string("pressure units differ: ") + std::string(to_string(a.unit)) + " vs " +
                          std::string(to_string(b.unit)));
    }
}

}  // namespace

std::string_view to_string(PressureUnit u) {
    switch (u) {
        case PressureUnit::pa:
            return "Pa";
        case PressureUnit::kpa:
            return "kPa";
        case PressureUnit::bar:
            return "bar";
        case PressureUnit::mmhg:
            return "mmHg";
    }
    return "?";
}

PressureUnit parse_pressure_unit(std::string_view s) {
    if (s == "Pa") return PressureUnit::pa;
    if (s == "kPa") return PressureUnit::kpa;
    if (s == "bar") return PressureUnit::bar;
    if (s == "mmHg") return PressureUnit::mmhg;
    throw ValidationError("unknown pressure unit '" + std::string(s) + "' (expected Pa, kPa, bar or mmHg)");
}

Pressure Pressure::to(PressureUnit target) const {
    if (target == unit) {
        return *this;
    }
    return {value * pascals_per(unit) / pascals_per(target), target};
}

Pressure antoine_pressure(const AntoineParams& params, double T, bool* out_of_range) {
    const double denom = params.C + T;
    if (denom == 0.0) {
        throw DomainError("Antoine equation: C + T = 0");
    }
    if (out_of_range) {
        *out_of_range = T < params.T_min || T > params.T_max;
    }
    return {std::pow(10.0, params.A - params.B / denom), params.unit};
}

double gamma_from_vle(Pressure p, double y, double x, Pressure p_sat) {
    require_same_unit(p, p_sat);
    if (!(x > 0.0)) {
        throw DomainError("extended Raoult's law needs x > 0; infinite-dilution values need their own records");
    }
    if (!(p.value > 0.0) || !(p_sat.value > 0.0)) {
        throw DomainError("pressures must be positive");
    }
    if (!(y >= 0.0 && y <= 1.0)) {
        throw DomainError("vapor mole fraction outside [0, 1]");
    }
    return p.value * y / (p_sat.value * x);
}

BubblePoint bubble_point_isothermal(double x1, double gamma1, double gamma2, Pressure p1_sat, Pressure p2_sat) {
    require_same_unit(p1_sat, p2_sat);
    if (!(x1 >= 0.0 && x1 <= 1.0)) {
        throw DomainError("x1 outside [0, 1]");
    }
    if (!(gamma1 > 0.0) || !(gamma2 > 0.0) || !(p1_sat.value > 0.0) || !(p2_sat.value > 0.0)) {
        throw DomainError("activity coefficients and vapor pressures must be positive");
    }
    const double partial1 = x1 * gamma1 * p1_sat.value;
    const double partial2 = (1.0 - x1) * gamma2 * p2_sat.value;
    const double p = partial1 + partial2;
    if (p == 0.0) {
        throw DomainError("bubble point: total pressure is zero");
    }
    return {{p, p1_sat.unit}, partial1 / p};
}

std::map<std::string, AntoineParams, std::less<>> parse_antoine_table(std::string_view text) {
    io::LineReader lines(text);
    std::string_view line;
    if (!lines.next(line) || line != "smiles,A,B,C,Tmin_K,Tmax_K,unit") {
        throw ParseError("Antoine file line 1: expected header 'smiles,A,B,C,Tmin_K,Tmax_K,unit'", 1);
    }
    std::map<std::string, AntoineParams, std::less<>> out;
    while (lines.next(line)) {
        const std::size_t lineno = lines.line_number();
        if (line.empty()) {
            continue;
        }
        const auto cells = io::split_csv(line);
        try {
            if (cells.size() != 7) {
                throw ValidationError("expected 7 columns, found " + std::to_string(cells.size()));
            }
            AntoineParams p;
            p.A = io::parse_double(cells[1]);
            p.B = io::parse_double(cells[2]);
            p.C = io::parse_double(cells[3]);
            p.T_min = io::parse_double(cells[4]);
            p.T_max = io::parse_double(cells[5]);
            p.unit = parse_pressure_unit(cells[6]);
            if (!(p.T_min <= p.T_max)) {
                throw ValidationError("Tmin_K exceeds Tmax_K");
            }
            if ((p.C + p.T_min) * (p.C + p.T_max) <= 0.0) {
                throw ValidationError("C + T vanishes inside the temperature range");
            }
            if (!out.emplace(std::string(cells[0]), p).second) {
                throw ValidationError("duplicate SMILES '" + std::string(cells[0]) + "'");
            }
        } catch (const ValidationError& e) {
            throw ParseError("Antoine file line " + std::to_string(lineno) + ": " + e.what(), lineno);
        }
    }
    return out;
}

std::map<std::string, AntoineParams, std::less<>> load_antoine_table(const std::filesystem::path& path) {
    return parse_antoine_table(io::read_file(path));
}

}  // namespace gibbsnet::thermo
