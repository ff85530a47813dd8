#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tvckit/euler.hpp"

namespace tvckit::cli {

enum class OutputFormat { Csv, Json };

/// Path on which the diagnostics grid is evaluated.
enum class Reference {
    Steady,  // the steady state repeated at every t
    Euler,   // the solved truncated Euler path
};

struct RunConfig {
    std::string command;
    std::string problem_file;
    std::vector<std::string> path_files;  // compare only
    std::optional<int> horizon;
    int window_min = 5;
    int window_max = 50;
    std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
    std::vector<int> t_axis{10, 20, 40, 80, 160, 320, 640};
    std::optional<std::string> perturb;
    std::optional<double> michel;
    AssemblyMode mode = AssemblyMode::FreeInitial;
    std::string out_dir = ".";
    OutputFormat format = OutputFormat::Csv;
    int threads = 1;
    std::optional<Reference> reference;
    std::optional<double> guess;
    double tolerance = 1e-6;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolated = 2;
inline constexpr int kExitInconclusive = 3;

int cmd_solve(const RunConfig& config, std::ostream& out);
int cmd_check_tvc(const RunConfig& config, std::ostream& out);
int cmd_diagnose(const RunConfig& config, std::ostream& out);
int cmd_compare(const RunConfig& config, std::ostream& out);

/// Dispatches on config.command; tvckit::Error becomes exit 1 with the
/// message on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line entry point.
int main(int argc, char** argv);

}  // namespace tvckit::cli
