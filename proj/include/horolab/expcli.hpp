#pragma once

// Named experiments with deterministic configs and CSV / JSON reports.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "horolab/diophantine.hpp"
#include "horolab/sl2core.hpp"

namespace horolab::cli {

inline constexpr std::string_view kLibraryVersion = "horolab 0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class Experiment {
  Orbit,
  PrimeOrbit,
  Period,
  DaniCheck,
  Discrepancy,
  Selberg,
  Type1,
  Type2,
  HeckePrime,
  Linnik,
  AlmostPrime,
};

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);
const std::vector<Experiment>& all_experiments();

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  Experiment experiment = Experiment::Orbit;

  std::string base = "sqrt2";          // base point spec, see parse_base_point
  std::string index_set = "all";       // all | primes | progression | almost-primes
  std::string mode = "discrete";       // discrete | continuous
  std::string sequence = "bump";       // selberg: ones | bump
  std::string alpha;                   // when set, overrides base with alpha:<alpha>,y:1,theta:pi/2
  std::string center = "iwasawa:x=0,y=1.2,theta=0";  // test function / region centre
  double s = 1.0;
  std::uint64_t N = 1000;
  double T = 1000.0;
  double delta = 0.1;
  int entry_bound = 1000;
  ExponentConfig exponents;
  int gamma_entry_bound = 20;
  std::uint64_t q_cap = 100000;
  std::uint64_t modulus = 2;           // progression index set
  int max_factors = 10;                // almost-prime index set
  std::uint64_t D = 10;
  std::uint64_t d1 = 2;
  std::uint64_t d2 = 3;
  double mass_floor = 0.05;
  double radius = 0.5;
  double spacing = 0.5;
  double y_cap = 2.0;
  double cusp_cutoff = 1e3;
  double window_low = 0.15;
  double window_high = 1.85;
  double ratio_cap = 10.0;             // prime-orbit upper bound on ball ratios
  std::size_t budget = 1 << 16;
  int shifts = 8;
  std::uint64_t seed = 20240607;

  std::filesystem::path output_dir = ".";
  OutputFormat format = OutputFormat::Json;
  int threads = 0;                     // 0: HOROLAB_THREADS or the runtime default
};

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

/// Arithmetic over numbers, pi, sqrt2, golden, sqrt(.), + - * / and
/// parentheses. Throws ParseError with the character position.
double parse_expression(std::string_view text);

/// "identity", "hecke:<N>", "iwasawa:x=<e>,y=<e>,theta=<e>",
/// "alpha:<e>,y:<e>,theta:<e>" (x = alpha + y cot theta), "sqrt2", "golden".
GroupElement parse_base_point(std::string_view spec);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180: CRLF line ends, fields quoted when they contain ',', '"' or line breaks.
std::string to_csv(const Table& table);

/// Fixed-precision decimal text used in every report.
std::string format_number(double v);

struct ExperimentResult {
  nlohmann::json report;  // deterministic body
  Table table;            // CSV view of the same data
  bool assertion_ok = true;
  std::string summary;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Runs, writes manifest.json and report.{csv,json} into output_dir.
/// Returns 0 on pass, 2 on a failed assertion and 1 on error.
int run(const ExperimentConfig& config, std::string* message = nullptr);

}  // namespace horolab::cli
