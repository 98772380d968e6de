#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qswitch/holevo.hpp"

namespace qswitch {

enum class Scenario { Pairs, Gauges, Self, WithDepol, QGain, QCompose };

/// Sampler for the scenario's random channels.
enum class ChannelKind { Choi, UnitaryMixture };

/// "pairs", "gauges", "self", "with-depol", "q-gain", "q-compose".
std::string scenario_name(Scenario s);
/// Throws ContractViolation for unknown names.
Scenario parse_scenario(const std::string& name);

/// One data point. Fields a scenario does not produce stay empty and are
/// written as nulls.
///
///   pairs       chi_switch = chi(C0 ⋈ C1), chi_sup = chi(C0 ⊞ C1)
///   gauges      chi_switch, chi_sup of C ⋈ C and C ⊞ C for one Kraus gauge
///   self        chi_base = chi(C), chi_switch, chi_sup of C with itself
///   with-depol  chi_base, chi_switch, chi_sup of C combined with N
///   q-gain      chi_base, chi_switch of C ⋈ C, q_value = Q(C)
///   q-compose   chi_compose = chi(C ∘ C), chi_switch of C ⋈ C, q_value
struct ExperimentRecord {
  Scenario scenario = Scenario::Pairs;
  std::size_t pair_id = 0;
  std::uint64_t seed = 0;
  std::optional<double> chi_base;
  std::optional<double> chi_switch;
  std::optional<double> chi_sup;
  std::optional<double> chi_compose;
  std::optional<double> q_value;
  std::optional<std::size_t> gauge_index;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::Pairs;
  std::size_t n_channels = 200;
  std::size_t n_gauges = 50;
  std::uint64_t seed = 1;
  ChannelKind kind = ChannelKind::Choi;
  std::size_t k_ops = 2;  // unitaries per mixture
  OptimizerConfig optimizer = OptimizerConfig::sweep();
  std::string outdir = ".";
  /// Worker threads; 0 uses the hardware concurrency.
  std::size_t threads = 0;
  /// Called with (pair_id, gauge_index) before each record is computed, from
  /// worker threads. An exception thrown here fails that record.
  std::function<void(std::size_t, std::size_t)> on_record;

  /// 1000 channels, 200 gauges, full optimizer settings.
  static ScenarioConfig paper_scale(Scenario s);

  /// Throws ContractViolation on zero counts or an invalid optimizer.
  void validate() const;
};

struct ScenarioRun {
  std::vector<ExperimentRecord> records;  // ordered by (pair_id, gauge_index)
  bool complete = true;
  std::string error;  // first failure when incomplete
};

/// Samples random channels of cfg.kind and evaluates the scenario's capacities
/// with control |+>. Each record draws from streams keyed by (seed,
/// pair_id, gauge_index), so output does not depend on thread count. A
/// failing record stops the run; records finished so far are returned with
/// complete = false.
ScenarioRun run_scenario(const ScenarioConfig& cfg);

/// Ratio statistics skip records whose denominator is below this.
inline constexpr double kRatioGuard = 1e-4;

struct GaugeSpread {
  std::size_t pair_id = 0;
  double switch_spread = 0.0;  // max - min of chi_switch over gauges
  double sup_spread = 0.0;
};

struct TercileSpread {
  double q_low = 0.0;
  double q_high = 0.0;
  std::size_t count = 0;
  double iqr = 0.0;  // interquartile range of chi_switch / chi_base
};

struct Summary {
  Scenario scenario = Scenario::Pairs;
  std::size_t record_count = 0;
  std::size_t excluded = 0;  // records dropped by the ratio guard

  // pairs: chi_switch / chi_sup; q-compose: chi_switch / chi_compose;
  // self, q-gain: chi_switch / chi_base.
  std::optional<double> mean_ratio;

  // gauges
  std::vector<GaugeSpread> gauge_spreads;
  std::optional<double> max_switch_spread;
  std::optional<std::size_t> sup_spread_above_1e2;

  // self, q-gain
  std::optional<double> fraction_switch_below_base;
  std::optional<std::size_t> switch_above_base;
  std::optional<std::size_t> switch_below_base;

  // self: chi_sup >= chi_base - 1e-3; with-depol: chi_sup >= chi_base / 2 - 1e-3
  std::optional<std::size_t> sup_bound_holds;

  // q-gain
  std::vector<TercileSpread> terciles;

  // q-compose: records with Q < 0.05 and their largest |ratio - 1|
  std::optional<std::size_t> commuting_count;
  std::optional<double> commuting_max_deviation;
};

/// Throws ContractViolation for empty input or mixed scenarios.
Summary summarize(const std::vector<ExperimentRecord>& records);

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
std::string summary_to_json(const Summary* summary, const ScenarioRun& run, const ScenarioConfig& cfg);
/// Scatter plot of the records; one marker element per plotted record.
std::string scatter_svg(Scenario scenario, const std::vector<ExperimentRecord>& records);

/// Writes records.csv, summary.json and, when there are records,
/// scatter_<scenario>.svg into cfg.outdir (created if missing). Summary is
/// null when there are no records. Throws IoError.
void emit_outputs(const ScenarioRun& run, const Summary* summary, const ScenarioConfig& cfg);

}  // namespace qswitch
