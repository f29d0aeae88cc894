#include "asplab/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "asplab/errors.hpp"

namespace asplab {
namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a number");
    }
    if (pos != v.size())
        throw ConfigError("config key '" + key + "': trailing characters in '" + v + "'");
    return x;
}

int parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long x = 0;
    try {
        x = std::stol(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as an integer");
    }
    if (pos != v.size())
        throw ConfigError("config key '" + key + "': trailing characters in '" + v + "'");
    return static_cast<int>(x);
}

std::vector<std::string> split_commas(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (!v.empty() && v.back() == ',') out.push_back("");
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_commas(v)) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& item : split_commas(v)) out.push_back(parse_int(key, item));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "x1_min", "x1_max", "x2_min", "x2_max", "n1", "n2",
        "coefficients", "operator", "kernel", "nonlinearity",
        "a_scale", "a_offset", "a_q", "r", "const_value",
        "beta", "epsilon", "epsilons", "truncation_epsilons", "truncation_ns",
        "resolvent_ns", "interior_margin",
        "cg_tol", "cg_max", "picard_tol", "picard_max",
    };
    return keys;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    cfg.raw_text = text;

    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!known_keys().count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (kv.count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = value;
    }

    auto take = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    if (const auto* v = take("x1_min")) cfg.omega1.lo = parse_double("x1_min", *v);
    if (const auto* v = take("x1_max")) cfg.omega1.hi = parse_double("x1_max", *v);
    if (const auto* v = take("x2_min")) cfg.omega2.lo = parse_double("x2_min", *v);
    if (const auto* v = take("x2_max")) cfg.omega2.hi = parse_double("x2_max", *v);
    if (const auto* v = take("n1")) cfg.n1 = parse_int("n1", *v);
    if (const auto* v = take("n2")) cfg.n2 = parse_int("n2", *v);
    if (const auto* v = take("coefficients")) cfg.coefficients = *v;
    if (const auto* v = take("operator")) cfg.operator_kind = *v;
    if (const auto* v = take("kernel")) cfg.kernel = *v;
    if (const auto* v = take("nonlinearity")) cfg.nonlinearity = *v;
    if (const auto* v = take("a_scale")) cfg.a_scale = parse_double("a_scale", *v);
    if (const auto* v = take("a_offset")) cfg.a_offset = parse_double("a_offset", *v);
    if (const auto* v = take("a_q")) cfg.a_q = parse_double("a_q", *v);
    if (const auto* v = take("r")) cfg.r = parse_double("r", *v);
    if (const auto* v = take("const_value")) cfg.const_value = parse_double("const_value", *v);
    if (const auto* v = take("beta")) cfg.beta = parse_double("beta", *v);
    if (const auto* v = take("epsilon")) cfg.epsilon = parse_double("epsilon", *v);
    if (const auto* v = take("epsilons")) cfg.epsilons = parse_double_list("epsilons", *v);
    if (const auto* v = take("truncation_epsilons"))
        cfg.truncation_epsilons = parse_double_list("truncation_epsilons", *v);
    if (const auto* v = take("truncation_ns")) cfg.truncation_ns = parse_int_list("truncation_ns", *v);
    if (const auto* v = take("resolvent_ns")) cfg.resolvent_ns = parse_int_list("resolvent_ns", *v);
    if (const auto* v = take("interior_margin")) cfg.interior_margin = parse_double("interior_margin", *v);
    if (const auto* v = take("cg_tol")) cfg.solver.cg_tol = parse_double("cg_tol", *v);
    if (const auto* v = take("cg_max")) cfg.solver.cg_max = parse_int("cg_max", *v);
    if (const auto* v = take("picard_tol")) cfg.solver.picard_tol = parse_double("picard_tol", *v);
    if (const auto* v = take("picard_max")) cfg.solver.picard_max = parse_int("picard_max", *v);

    if (!(cfg.omega1.lo < cfg.omega1.hi))
        throw ConfigError("config: require x1_min < x1_max");
    if (!(cfg.omega2.lo < cfg.omega2.hi))
        throw ConfigError("config: require x2_min < x2_max");
    auto check_eps = [](const char* key, double e) {
        if (!(e > 0.0) || !(e <= 1.0))
            throw ConfigError(std::string("config key '") + key + "': epsilon values must lie in (0, 1]");
    };
    check_eps("epsilon", cfg.epsilon);
    for (double e : cfg.epsilons) check_eps("epsilons", e);
    for (double e : cfg.truncation_epsilons) check_eps("truncation_epsilons", e);
    for (int n : cfg.truncation_ns)
        if (n < 1) throw ConfigError("config key 'truncation_ns': values must be >= 1");
    for (int n : cfg.resolvent_ns)
        if (n < 1) throw ConfigError("config key 'resolvent_ns': values must be >= 1");
    if (!(cfg.interior_margin > 0.0) || !(cfg.interior_margin < 0.5))
        throw ConfigError("config key 'interior_margin': must lie in (0, 0.5)");
    if (!(cfg.beta > 0.0)) throw ConfigError("config key 'beta': must be positive");
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

TensorGrid make_grid(const RunConfig& cfg) {
    return TensorGrid(cfg.omega1, cfg.omega2, cfg.n1, cfg.n2);
}

CoefficientField make_coefficients(const RunConfig& cfg) {
    return coefficient_catalog(cfg.coefficients);
}

OperatorSpec make_operator(const RunConfig& cfg) {
    OperatorSpec spec;
    if (cfg.nonlinearity == "tanh") {
        spec.a = make_tanh(cfg.a_scale, cfg.a_offset);
    } else if (cfg.nonlinearity == "qgrowth") {
        spec.a = make_qgrowth(cfg.a_scale, cfg.a_q, cfg.a_offset);
    } else {
        throw ConfigError("unknown nonlinearity '" + cfg.nonlinearity + "' (valid: tanh, qgrowth)");
    }
    spec.r_bounded = cfg.r;

    if (cfg.operator_kind == "kernel_inner" || cfg.operator_kind == "kernel_outer") {
        spec.variant = cfg.operator_kind == "kernel_inner" ? OperatorVariant::KernelInner
                                                           : OperatorVariant::KernelOuter;
        spec.h = kernel_catalog(cfg.kernel, cfg.omega1, cfg.omega2);
    } else if (cfg.operator_kind == "projector") {
        spec.variant = OperatorVariant::ProjectorComposite;
        spec.l = default_multiplier(cfg.omega1);
    } else if (cfg.operator_kind == "constant") {
        spec.variant = OperatorVariant::Constant;
        spec.constant = cfg.const_value;
    } else if (cfg.operator_kind == "zero") {
        spec.variant = OperatorVariant::Zero;
    } else {
        throw ConfigError("unknown operator '" + cfg.operator_kind +
                          "' (valid: kernel_inner, kernel_outer, projector, constant, zero)");
    }
    return spec;
}

} // namespace asplab
