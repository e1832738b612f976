#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geomq/dynamics.hpp"

namespace geomq::cli {

enum class ScenarioKind {
  fisher_check,
  algebra_check,
  kahler_check,
  flat_coords_check,
  gaussian_spread,
  classical_advect,
  cross_validate,
  dirac_check,
};

std::string to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario(const std::string & name);
const std::vector<ScenarioKind> & all_scenarios();
/// One-line description for list-scenarios.
std::string describe(ScenarioKind kind);

/// Malformed or invalid configuration. `line` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(const std::string & what, int line = 0);
  int line() const noexcept { return line_; }

private:
  int line_;
};

struct InitialStateSpec
{
  /// gaussian, periodized_gaussian, uniform, random_compact, random_periodic or csv.
  std::string family = "gaussian";
  Point center{0.0, 0.0, 0.0};
  double sigma = 1.0;
  Point momentum{0.0, 0.0, 0.0};
  std::filesystem::path path;
};

struct ScenarioConfig
{
  ScenarioKind scenario = ScenarioKind::fisher_check;
  std::uint64_t seed    = 0;
  std::filesystem::path output_dir = "out";

  int dim = 1;
  std::vector<double> extent;
  std::vector<int> points;
  Boundary boundary           = Boundary::periodic;
  DerivativeScheme derivative = DerivativeScheme::central;

  double mass  = 1.0;
  double alpha = 1.0;
  /// Time parameter of the boost generators.
  double time = 0.0;

  InitialStateSpec initial;
  EvolutionConfig evolution;
  /// Cross-validation horizon; 0 means steps * dt.
  double horizon = 0.0;

  /// Line numbers of parsed keys ("section.key") and section headers ("[section]").
  std::map<std::string, int> lines;

  GridSpec grid() const;
  /// Key/value listing of every parameter, in a fixed order.
  std::vector<std::pair<std::string, std::string>> parameters() const;
};

/**
 * @brief Parse the sectioned key = value format.
 *
 * '#' and ';' start comments. Unknown sections or keys, duplicates and
 * malformed values raise ConfigError with the offending line; a missing
 * required key names the line of its section header. Relative paths are
 * kept as written.
 */
ScenarioConfig parse_config(std::istream & in);
ScenarioConfig load_config(const std::filesystem::path & path);

/// Checks every parameter against the preconditions of the modules it feeds; throws ConfigError.
void validate(const ScenarioConfig & config);

/// One line of summary.csv. Passes when value <= tolerance, or value >= tolerance for
/// `at_least` checks (detections and lower bounds).
struct Check
{
  std::string name;
  double value     = 0.0;
  double tolerance = 0.0;
  bool at_least    = false;

  bool passed() const { return at_least ? value >= tolerance : value <= tolerance; }
};

struct RunResult
{
  std::vector<Check> checks;
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> files;

  bool passed() const;
};

/// Environment variable that, when set and non-empty, replaces output_dir.
inline constexpr const char * kOutputDirEnv = "GEOMQ_OUTPUT_DIR";

/**
 * @brief Execute a validated scenario and write its CSV files.
 *
 * Always writes summary.csv (check,value,tolerance,status) and
 * parameters.csv (key,value) into the output directory.
 */
RunResult run(const ScenarioConfig & config);

/// Header check,value,tolerance,status.
void write_summary(std::ostream & out, const std::vector<Check> & checks);

}  // namespace geomq::cli
