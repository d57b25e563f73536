#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "output.hpp"

namespace ksdiff::cli {

struct VerifyOptions {
    std::uint64_t seed = 20240601;
    int paths = 20000;
    int workers = 1;
    double dt = 1e-3;
};

std::vector<std::string> suite_names();
bool is_suite(const std::string& name);
/// Runs one suite ("all" runs every suite) and appends its checks.
void run_suite(const std::string& name, const VerifyOptions& opt, Report& report);

/// Integral of sqrt((1 + 4 eta^2/9)(1 + 4 eta^2) / cosh(pi eta)) over the real line.
double mb_proof_constant();

}  // namespace ksdiff::cli
