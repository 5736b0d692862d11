#pragma once

// Batch front end. Every command reads a JSON config (unknown keys are
// rejected), writes its artifacts atomically into the output directory and
// prints one summary line per result.

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "phasorctl/errors.hpp"

namespace phasorctl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

int exit_code_for(ErrorCode code);

/// Machine-readable error object {"error": {code, category, message}}.
nlohmann::json error_json(const Error& e);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  int jobs = 0;  // parallel scenarios; 0 picks the hardware concurrency
};

/// Executes one command; throws Error on failure.
void run(const std::string& command, const nlohmann::json& config, const RunOptions& options,
         std::ostream& out);

/// argv entry point: phasorctl <command> [config.json] [flags]. Returns the
/// process exit status and reports failures as error JSON on `err`.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace phasorctl::cli
