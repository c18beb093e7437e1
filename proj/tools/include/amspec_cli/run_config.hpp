#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace amspec::cli {

/// Everything that determines a run's output. The worker count is recorded
/// separately because results do not depend on it.
struct RunConfig {
  std::string command;
  std::string model_path;
  std::string output_path;
  std::map<std::string, double> tolerances;
  std::map<std::string, std::string> parameters;
  int parallelism = 1;

  nlohmann::json to_json() const;
};

/// Writes "# run: {...}" and "# model_hash: ..." comment lines.
void write_csv_header(std::ostream& out, const RunConfig& config, const std::string& model_hash);

struct HarmonicSpec {
  std::vector<double> cos_amps;
  std::vector<double> sin_amps;
};

/// "c1=0.3,s2=0.01" -> phi'(x) = 1 + 0.3 cos(2 pi x) + 0.01 sin(4 pi x).
/// Throws amspec::Error(InvalidArgument) on malformed terms.
HarmonicSpec parse_phi_spec(const std::string& text);

/// "name=value"; throws InvalidArgument unless value is a positive number.
std::pair<std::string, double> parse_tolerance(const std::string& text);

/// AMSPEC_WORKERS overrides the flag; values below 1 fall back to 1.
int resolve_workers(int flag_value);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace amspec::cli
