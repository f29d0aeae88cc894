#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asplab/coefficients.hpp"
#include "asplab/grid.hpp"
#include "asplab/operators.hpp"
#include "asplab/solver.hpp"

namespace asplab {

// Flat `key = value` run description. '#' starts a comment, blank lines are skipped, unknown
// or duplicate keys are hard errors (no silent defaults for misspellings). Defaults encode
// the standard study problem: unit square, 128x128, kernel_inner with the separable kernel
// and a(x) = tanh(x)/2 + 1/2, beta = 2.
struct RunConfig {
    Interval omega1{0.0, 1.0}, omega2{0.0, 1.0};
    int n1 = 128, n2 = 128;

    std::string coefficients = "identity";
    std::string operator_kind = "kernel_inner"; // kernel_outer, projector, constant, zero
    std::string kernel = "separable";           // flat, cosine, separable
    std::string nonlinearity = "tanh";          // tanh, qgrowth
    double a_scale = 0.5;
    double a_offset = 0.5;
    double a_q = 0.5;       // qgrowth only
    double r = 4.0;         // integral exponent when the nonlinearity is bounded
    double const_value = 1.0;

    double beta = 2.0;
    double epsilon = 1.0; // single-solve subcommands
    std::vector<double> epsilons = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
    std::vector<double> truncation_epsilons = {1.0, 0.25, 0.0625};
    std::vector<int> truncation_ns = {2, 4, 8, 16};
    std::vector<int> resolvent_ns = {4, 8, 16, 32, 64, 128, 256, 512, 1024};
    double interior_margin = 0.25;

    SolverConfig solver;

    std::uint64_t seed = 424242;   // --seed: randomized spot checks (`check`)
    int parallel = 1;              // --parallel: worker threads for per-epsilon study rows

    std::string raw_text; // original config text, echoed into output headers
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

TensorGrid make_grid(const RunConfig& cfg);
CoefficientField make_coefficients(const RunConfig& cfg);
OperatorSpec make_operator(const RunConfig& cfg);

} // namespace asplab
