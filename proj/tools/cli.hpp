#ifndef BIVECT_TOOLS_CLI_HPP
#define BIVECT_TOOLS_CLI_HPP

#include "bivect/io.hpp"

#include <iosfwd>

namespace bivect::cli {

enum ExitCode { ok = 0, math_failure = 1, input_error = 2 };

struct Options {
    std::string command;
    std::optional<double> tolerance;
    std::optional<int> refine;
};

struct Outcome {
    int exit_code = ok;
    io::json report;
};

/// Runs one command on a parsed job. Input problems surface as
/// io::SchemaError; mathematical failures as exit code 1 with a report.
Outcome run(const Options& opts, const io::Job& job);

/// Full command line: parses arguments, reads the file, writes the JSON
/// report to `out` (or --out) and diagnostics to `err`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bivect::cli

#endif  // BIVECT_TOOLS_CLI_HPP
