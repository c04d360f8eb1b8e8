#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "gibbsnet/error.hpp"
#include "gibbsnet/io/text.hpp"
#include "gibbsnet/train.hpp"

namespace gibbsnet::train {

namespace {

using Setter = std::function<void(TrainConfig&, std::string_view)>;

Setter real(double TrainConfig::*field) {
    return [field](TrainConfig& c, std::string_view v) { c.*field = io::parse_double(v); };
}

Setter count(std::size_t TrainConfig::*field) {
    return [field](TrainConfig& c, std::string_view v) { c.*field = io::parse_size(v); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"lr0", real(&TrainConfig::lr0)},
        {"lr_decay_factor", real(&TrainConfig::lr_decay_factor)},
        {"lr_patience", count(&TrainConfig::lr_patience)},
        {"early_stop_patience", count(&TrainConfig::early_stop_patience)},
        {"batch_size", count(&TrainConfig::batch_size)},
        {"smoothl1_beta", real(&TrainConfig::smoothl1_beta)},
        {"weight_decay", real(&TrainConfig::weight_decay)},
        {"adam_beta1", real(&TrainConfig::adam_beta1)},
        {"adam_beta2", real(&TrainConfig::adam_beta2)},
        {"adam_epsilon", real(&TrainConfig::adam_epsilon)},
        {"max_epochs", count(&TrainConfig::max_epochs)},
        {"seed", [](TrainConfig& c, std::string_view v) { c.seed = io::parse_uint64(v); }},
        {"hidden", count(&TrainConfig::hidden)},
        {"variant", [](TrainConfig& c, std::string_view v) { c.variant = model::parse_variant(v); }},
        {"threads", count(&TrainConfig::threads)},
        {"gd_step", real(&TrainConfig::gd_step)},
        {"split_train", [](TrainConfig& c, std::string_view v) { c.split.train = io::parse_double(v); }},
        {"split_val", [](TrainConfig& c, std::string_view v) { c.split.val = io::parse_double(v); }},
        {"split_test", [](TrainConfig& c, std::string_view v) { c.split.test = io::parse_double(v); }},
        {"split_seed", [](TrainConfig& c, std::string_view v) { c.split.seed = io::parse_uint64(v); }},
    };
    return table;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

void TrainConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ValidationError(std::string(name) + " must be positive");
        }
    };
    positive(lr0, "lr0");
    positive(smoothl1_beta, "smoothl1_beta");
    positive(adam_epsilon, "adam_epsilon");
    positive(gd_step, "gd_step");
    if (!(lr_decay_factor > 0.0 && lr_decay_factor < 1.0)) {
        throw ValidationError("lr_decay_factor must lie in (0, 1)");
    }
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
        throw ValidationError("weight_decay must be non-negative");
    }
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw ValidationError("ADAM betas must lie in [0, 1)");
    }
    if (lr_patience == 0 || early_stop_patience == 0) {
        throw ValidationError("patience values must be positive");
    }
    if (batch_size == 0) {
        throw ValidationError("batch_size must be positive");
    }
    if (hidden == 0) {
        throw ValidationError("hidden must be positive");
    }
    if (threads == 0) {
        throw ValidationError("threads must be positive");
    }
    if (gd_step >= 0.5) {
        throw ValidationError("gd_step must be below 0.5");
    }
    split.validate();
}

TrainConfig parse_config(std::string_view text, TrainConfig base) {
    io::LineReader lines(text);
    std::string_view line;
    while (lines.next(line)) {
        const std::size_t lineno = lines.line_number();
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("config line " + std::to_string(lineno) + ": expected key=value", lineno);
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + std::string(key) + "'",
                             lineno);
        }
        try {
            it->second(base, value);
        } catch (const ValidationError& e) {
            throw ParseError("config line " + std::to_string(lineno) + ": " + std::string(key) + ": " + e.what(),
                             lineno);
        }
    }
    return base;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
    return parse_config(io::read_file(path), std::move(base));
}

std::string format_config(const TrainConfig& c) {
    auto line = [](std::string_view k, const std::string& v) { return std::string(k) + '=' + v + '\n'; };
    auto num = [](double v) { return io::format_double(v); };
    std::string out;
    out += line("lr0", num(c.lr0));
    out += line("lr_decay_factor", num(c.lr_decay_factor));
    out += line("lr_patience", std::to_string(c.lr_patience));
    out += line("early_stop_patience", std::to_string(c.early_stop_patience));
    out += line("batch_size", std::to_string(c.batch_size));
    out += line("smoothl1_beta", num(c.smoothl1_beta));
    out += line("weight_decay", num(c.weight_decay));
    out += line("adam_beta1", num(c.adam_beta1));
    out += line("adam_beta2", num(c.adam_beta2));
    out += line("adam_epsilon", num(c.adam_epsilon));
    out += line("max_epochs", std::to_string(c.max_epochs));
    out += line("seed", std::to_string(c.seed));
    out += line("hidden", std::to_string(c.hidden));
    out += line("variant", std::string(model::to_string(c.variant)));
    out += line("threads", std::to_string(c.threads));
    out += line("gd_step", num(c.gd_step));
    out += line("split_train", num(c.split.train));
    out += line("split_val", num(c.split.val));
    out += line("split_test", num(c.split.test));
    out += line("split_seed", std::to_string(c.split.seed));
    return out;
}

}  // namespace gibbsnet::train
