#include "amspec_cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "amspec/error.hpp"

namespace amspec::cli {
namespace {

double parse_number(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, "bad number '" + text + "' in " + context);
  }
  return value;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  return {{"command", command},
          {"model_path", model_path},
          {"output_path", output_path},
          {"tolerances", tolerances},
          {"parameters", parameters}};
}

void write_csv_header(std::ostream& out, const RunConfig& config, const std::string& model_hash) {
  out << "# run: " << config.to_json().dump() << "\n";
  out << "# model_hash: " << model_hash << "\n";
}

HarmonicSpec parse_phi_spec(const std::string& text) {
  HarmonicSpec spec;
  std::stringstream stream(text);
  std::string term;
  while (std::getline(stream, term, ',')) {
    const auto eq = term.find('=');
    if (term.size() < 4 || eq == std::string::npos || (term[0] != 'c' && term[0] != 's')) {
      throw Error(ErrorCode::InvalidArgument, "bad harmonic term '" + term + "' (expected c<k>=<amp> or s<k>=<amp>)");
    }
    const double k_value = parse_number(term.substr(1, eq - 1), "harmonic index");
    if (k_value < 1 || k_value != std::floor(k_value) || k_value > 4096) {
      throw Error(ErrorCode::InvalidArgument, "harmonic index in '" + term + "' must be a positive integer");
    }
    const auto k = static_cast<std::size_t>(k_value);
    const double amp = parse_number(term.substr(eq + 1), "harmonic amplitude");
    auto& target = term[0] == 'c' ? spec.cos_amps : spec.sin_amps;
    if (target.size() < k) target.resize(k, 0.0);
    target[k - 1] = amp;
  }
  return spec;
}

std::pair<std::string, double> parse_tolerance(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::InvalidArgument, "tolerance '" + text + "' must look like name=value");
  }
  const double value = parse_number(text.substr(eq + 1), "tolerance");
  if (!(value > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance '" + text + "' must be positive");
  return {text.substr(0, eq), value};
}

int resolve_workers(int flag_value) {
  int workers = flag_value;
  if (const char* env = std::getenv("AMSPEC_WORKERS"); env != nullptr && *env != '\0') {
    workers = std::atoi(env);
  }
  return workers < 1 ? 1 : workers;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc{} ? ptr : buf);
}

}  // namespace amspec::cli
