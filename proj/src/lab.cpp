#include "qswitch/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "qswitch/combiner.hpp"
#include "qswitch/errors.hpp"
#include "qswitch/random.hpp"

namespace qswitch {

namespace {

// First key of every derived stream, separating the uses of one seed.
constexpr std::uint64_t kChannelStream = 1;
constexpr std::uint64_t kGaugeStream = 2;
constexpr std::uint64_t kCapacityStream = 3;

enum Slot : std::uint64_t { kBase = 0, kSwitch = 1, kSup = 2, kCompose = 3 };

struct Task {
  std::size_t pair_id;
  std::size_t gauge;
};

class RecordBuilder {
 public:
  RecordBuilder(const ScenarioConfig& cfg, Task task)
      : cfg_(cfg), task_(task), root_(cfg.seed) {}

  QuantumChannel channel(std::uint64_t which) const {
    SeededRng rng = root_.derive({kChannelStream, task_.pair_id, which});
    if (cfg_.kind == ChannelKind::UnitaryMixture) return random_unitary_mixture(rng, 2, cfg_.k_ops);
    return random_choi_channel(rng, 2);
  }

  double capacity(const QuantumChannel& ch, Slot slot) const {
    const SeededRng rng = root_.derive({kCapacityStream, task_.pair_id, task_.gauge, slot});
    return estimate_capacity(ch, cfg_.optimizer, rng).chi;
  }

  double combined(const QuantumChannel& ch, Slot slot) const {
    return capacity(restrict_control(ch, ControlState::plus()), slot);
  }

  ExperimentRecord build() const {
    ExperimentRecord r;
    r.scenario = cfg_.scenario;
    r.pair_id = task_.pair_id;
    r.seed = cfg_.seed;
    switch (cfg_.scenario) {
      case Scenario::Pairs: {
        const QuantumChannel c0 = channel(0);
        const QuantumChannel c1 = channel(1);
        r.chi_switch = combined(quantum_switch(c0, c1), kSwitch);
        r.chi_sup = combined(superpose(c0, c1), kSup);
        break;
      }
      case Scenario::Gauges: {
        const QuantumChannel base = channel(0);
        SeededRng rng = root_.derive({kGaugeStream, task_.pair_id, task_.gauge});
        const QuantumChannel c = gauge_transform(base, haar_unitary(rng, base.kraus_count()));
        r.chi_switch = combined(quantum_switch(c, c), kSwitch);
        r.chi_sup = combined(superpose(c, c), kSup);
        r.gauge_index = task_.gauge;
        break;
      }
      case Scenario::Self: {
        const QuantumChannel c = channel(0);
        r.chi_base = capacity(c, kBase);
        r.chi_switch = combined(quantum_switch(c, c), kSwitch);
        r.chi_sup = combined(superpose(c, c), kSup);
        break;
      }
      case Scenario::WithDepol: {
        const QuantumChannel c = channel(0);
        const QuantumChannel n = named::depolarizing();
        r.chi_base = capacity(c, kBase);
        r.chi_switch = combined(quantum_switch(c, n), kSwitch);
        r.chi_sup = combined(superpose(c, n), kSup);
        break;
      }
      case Scenario::QGain: {
        const QuantumChannel c = channel(0);
        r.chi_base = capacity(c, kBase);
        r.chi_switch = combined(quantum_switch(c, c), kSwitch);
        r.q_value = q_commutativity(c);
        break;
      }
      case Scenario::QCompose: {
        const QuantumChannel c = channel(0);
        r.chi_compose = capacity(compose(c, c), kCompose);
        r.chi_switch = combined(quantum_switch(c, c), kSwitch);
        r.q_value = q_commutativity(c);
        break;
      }
    }
    return r;
  }

 private:
  const ScenarioConfig& cfg_;
  Task task_;
  SeededRng root_;
};

double quantile(std::vector<double> sorted_values, double q) {
  std::sort(sorted_values.begin(), sorted_values.end());
  const double pos = q * static_cast<double>(sorted_values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
  return sorted_values[lo] + (pos - static_cast<double>(lo)) * (sorted_values[hi] - sorted_values[lo]);
}

struct RatioPoint {
  double q;
  double ratio;
};

// Ratios num/den over the records, dropping guarded denominators.
std::vector<RatioPoint> ratios(const std::vector<ExperimentRecord>& records,
                               std::optional<double> ExperimentRecord::*num,
                               std::optional<double> ExperimentRecord::*den, std::size_t& excluded) {
  std::vector<RatioPoint> out;
  excluded = 0;
  for (const auto& r : records) {
    if (!(r.*num) || !(r.*den)) continue;
    if (*(r.*den) < kRatioGuard) {
      ++excluded;
      continue;
    }
    out.push_back({r.q_value.value_or(0.0), *(r.*num) / *(r.*den)});
  }
  return out;
}

double mean_of(const std::vector<RatioPoint>& pts) {
  double sum = 0.0;
  for (const auto& p : pts) sum += p.ratio;
  return sum / static_cast<double>(pts.size());
}

void count_switch_vs_base(const std::vector<ExperimentRecord>& records, Summary& s) {
  std::size_t above = 0;
  std::size_t below = 0;
  for (const auto& r : records) {
    if (*r.chi_switch > *r.chi_base) ++above;
    if (*r.chi_switch < *r.chi_base) ++below;
  }
  s.switch_above_base = above;
  s.switch_below_base = below;
  s.fraction_switch_below_base = static_cast<double>(below) / static_cast<double>(records.size());
}

void require_fields(const ExperimentRecord& r, std::initializer_list<std::optional<double> ExperimentRecord::*> fields) {
  for (auto f : fields) {
    if (!(r.*f)) throw ContractViolation("summarize: record " + std::to_string(r.pair_id) + " lacks a required field");
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

template <class T>
void put(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Pairs: return "pairs";
    case Scenario::Gauges: return "gauges";
    case Scenario::Self: return "self";
    case Scenario::WithDepol: return "with-depol";
    case Scenario::QGain: return "q-gain";
    case Scenario::QCompose: return "q-compose";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::Pairs, Scenario::Gauges, Scenario::Self, Scenario::WithDepol, Scenario::QGain,
                     Scenario::QCompose}) {
    if (scenario_name(s) == name) return s;
  }
  throw ContractViolation("unknown scenario '" + name + "'");
}

ScenarioConfig ScenarioConfig::paper_scale(Scenario s) {
  ScenarioConfig cfg;
  cfg.scenario = s;
  cfg.n_channels = s == Scenario::Gauges ? 50 : 1000;
  cfg.n_gauges = 200;
  cfg.optimizer = OptimizerConfig{};
  return cfg;
}

void ScenarioConfig::validate() const {
  if (n_channels == 0) throw ContractViolation("ScenarioConfig: n_channels must be >= 1");
  if (n_gauges == 0) throw ContractViolation("ScenarioConfig: n_gauges must be >= 1");
  if (k_ops == 0) throw ContractViolation("ScenarioConfig: k_ops must be >= 1");
  optimizer.validate();
}

ScenarioRun run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  std::vector<Task> tasks;
  const std::size_t gauges = cfg.scenario == Scenario::Gauges ? cfg.n_gauges : 1;
  for (std::size_t p = 0; p < cfg.n_channels; ++p) {
    for (std::size_t g = 0; g < gauges; ++g) tasks.push_back({p, g});
  }

  std::vector<std::optional<ExperimentRecord>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::string error;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        if (cfg.on_record) cfg.on_record(tasks[i].pair_id, tasks[i].gauge);
        slots[i] = RecordBuilder(cfg, tasks[i]).build();
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!failed.exchange(true)) {
          error = "pair " + std::to_string(tasks[i].pair_id) + ": " + e.what();
        }
      }
    }
  };

  std::size_t n_threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, tasks.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  ScenarioRun run;
  run.complete = !failed.load();
  run.error = error;
  for (auto& slot : slots) {
    if (slot) run.records.push_back(std::move(*slot));
  }
  return run;
}

Summary summarize(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw ContractViolation("summarize: no records");
  Summary s;
  s.scenario = records.front().scenario;
  s.record_count = records.size();
  for (const auto& r : records) {
    if (r.scenario != s.scenario) throw ContractViolation("summarize: records mix scenarios");
  }

  using R = ExperimentRecord;
  switch (s.scenario) {
    case Scenario::Pairs: {
      for (const auto& r : records) require_fields(r, {&R::chi_switch, &R::chi_sup});
      const auto pts = ratios(records, &R::chi_switch, &R::chi_sup, s.excluded);
      if (!pts.empty()) s.mean_ratio = mean_of(pts);
      break;
    }
    case Scenario::Gauges: {
      for (const auto& r : records) require_fields(r, {&R::chi_switch, &R::chi_sup});
      std::vector<ExperimentRecord> sorted = records;
      std::stable_sort(sorted.begin(), sorted.end(),
                       [](const R& a, const R& b) { return a.pair_id < b.pair_id; });
      for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        double sw_lo = *sorted[i].chi_switch, sw_hi = sw_lo;
        double su_lo = *sorted[i].chi_sup, su_hi = su_lo;
        for (; j < sorted.size() && sorted[j].pair_id == sorted[i].pair_id; ++j) {
          sw_lo = std::min(sw_lo, *sorted[j].chi_switch);
          sw_hi = std::max(sw_hi, *sorted[j].chi_switch);
          su_lo = std::min(su_lo, *sorted[j].chi_sup);
          su_hi = std::max(su_hi, *sorted[j].chi_sup);
        }
        s.gauge_spreads.push_back({sorted[i].pair_id, sw_hi - sw_lo, su_hi - su_lo});
        i = j;
      }
      double max_sw = 0.0;
      std::size_t above = 0;
      for (const auto& g : s.gauge_spreads) {
        max_sw = std::max(max_sw, g.switch_spread);
        if (g.sup_spread > 1e-2) ++above;
      }
      s.max_switch_spread = max_sw;
      s.sup_spread_above_1e2 = above;
      break;
    }
    case Scenario::Self: {
      for (const auto& r : records) require_fields(r, {&R::chi_base, &R::chi_switch, &R::chi_sup});
      count_switch_vs_base(records, s);
      std::size_t holds = 0;
      for (const auto& r : records) {
        if (*r.chi_sup >= *r.chi_base - 1e-3) ++holds;
      }
      s.sup_bound_holds = holds;
      const auto pts = ratios(records, &R::chi_switch, &R::chi_base, s.excluded);
      if (!pts.empty()) s.mean_ratio = mean_of(pts);
      break;
    }
    case Scenario::WithDepol: {
      for (const auto& r : records) require_fields(r, {&R::chi_base, &R::chi_switch, &R::chi_sup});
      std::size_t holds = 0;
      for (const auto& r : records) {
        if (*r.chi_sup >= *r.chi_base / 2.0 - 1e-3) ++holds;
      }
      s.sup_bound_holds = holds;
      break;
    }
    case Scenario::QGain: {
      for (const auto& r : records) require_fields(r, {&R::chi_base, &R::chi_switch, &R::q_value});
      count_switch_vs_base(records, s);
      auto pts = ratios(records, &R::chi_switch, &R::chi_base, s.excluded);
      if (pts.empty()) break;
      s.mean_ratio = mean_of(pts);
      std::stable_sort(pts.begin(), pts.end(), [](const RatioPoint& a, const RatioPoint& b) { return a.q < b.q; });
      const std::size_t n = pts.size();
      for (std::size_t t = 0; t < 3; ++t) {
        const std::size_t begin = t * n / 3;
        const std::size_t end = (t + 1) * n / 3;
        if (begin == end) continue;
        std::vector<double> values;
        for (std::size_t i = begin; i < end; ++i) values.push_back(pts[i].ratio);
        s.terciles.push_back({pts[begin].q, pts[end - 1].q, end - begin,
                              quantile(values, 0.75) - quantile(values, 0.25)});
      }
      break;
    }
    case Scenario::QCompose: {
      for (const auto& r : records) require_fields(r, {&R::chi_compose, &R::chi_switch, &R::q_value});
      const auto pts = ratios(records, &R::chi_switch, &R::chi_compose, s.excluded);
      if (!pts.empty()) s.mean_ratio = mean_of(pts);
      std::size_t count = 0;
      double worst = 0.0;
      for (const auto& p : pts) {
        if (p.q >= 0.05) continue;
        ++count;
        worst = std::max(worst, std::abs(p.ratio - 1.0));
      }
      s.commuting_count = count;
      if (count > 0) s.commuting_max_deviation = worst;
      break;
    }
  }
  return s;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = "scenario,pair_id,seed,chi_base,chi_switch,chi_sup,chi_compose,q_value,gauge_index\n";
  auto field = [&out](const std::optional<double>& v) {
    out += ',';
    if (v) out += format_number(*v);
  };
  for (const auto& r : records) {
    out += scenario_name(r.scenario) + ',' + std::to_string(r.pair_id) + ',' + std::to_string(r.seed);
    field(r.chi_base);
    field(r.chi_switch);
    field(r.chi_sup);
    field(r.chi_compose);
    field(r.q_value);
    out += ',';
    if (r.gauge_index) out += std::to_string(*r.gauge_index);
    out += '\n';
  }
  return out;
}

std::string summary_to_json(const Summary* summary, const ScenarioRun& run, const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["scenario"] = scenario_name(cfg.scenario);
  j["complete"] = run.complete;
  if (!run.complete) j["error"] = run.error;
  j["config"] = {{"n_channels", cfg.n_channels},
                 {"n_gauges", cfg.n_gauges},
                 {"seed", cfg.seed},
                 {"channel_kind", cfg.kind == ChannelKind::Choi ? "choi" : "unitary-mixture"},
                 {"k_ops", cfg.k_ops},
                 {"n_states", cfg.optimizer.n_states},
                 {"restarts", cfg.optimizer.restarts},
                 {"hops", cfg.optimizer.hops},
                 {"step_size", cfg.optimizer.step_size},
                 {"temperature", cfg.optimizer.temperature},
                 {"gradient_step", cfg.optimizer.gradient_step},
                 {"convergence_tol", cfg.optimizer.convergence_tol}};
  j["records"] = run.records.size();
  if (summary == nullptr) {
    j["statistics"] = nullptr;
    return j.dump(2) + "\n";
  }

  const Summary& s = *summary;
  nlohmann::ordered_json st;
  switch (s.scenario) {
    case Scenario::Pairs:
      put(st, "mean_ratio_switch_over_sup", s.mean_ratio);
      st["excluded_small_denominator"] = s.excluded;
      break;
    case Scenario::Gauges: {
      put(st, "max_switch_spread", s.max_switch_spread);
      put(st, "channels_with_sup_spread_above_0.01", s.sup_spread_above_1e2);
      auto per = nlohmann::ordered_json::array();
      for (const auto& g : s.gauge_spreads) {
        per.push_back({{"pair_id", g.pair_id}, {"switch_spread", g.switch_spread}, {"sup_spread", g.sup_spread}});
      }
      st["per_channel"] = per;
      break;
    }
    case Scenario::Self:
      put(st, "fraction_switch_below_base", s.fraction_switch_below_base);
      put(st, "switch_above_base", s.switch_above_base);
      put(st, "switch_below_base", s.switch_below_base);
      put(st, "sup_at_least_base", s.sup_bound_holds);
      put(st, "mean_ratio_switch_over_base", s.mean_ratio);
      st["excluded_small_denominator"] = s.excluded;
      break;
    case Scenario::WithDepol:
      put(st, "sup_at_least_half_base", s.sup_bound_holds);
      break;
    case Scenario::QGain: {
      put(st, "fraction_switch_below_base", s.fraction_switch_below_base);
      put(st, "mean_ratio_switch_over_base", s.mean_ratio);
      st["excluded_small_denominator"] = s.excluded;
      auto ts = nlohmann::ordered_json::array();
      for (const auto& t : s.terciles) {
        ts.push_back({{"q_low", t.q_low}, {"q_high", t.q_high}, {"count", t.count}, {"ratio_iqr", t.iqr}});
      }
      st["q_terciles"] = ts;
      break;
    }
    case Scenario::QCompose:
      put(st, "mean_ratio_switch_over_compose", s.mean_ratio);
      st["excluded_small_denominator"] = s.excluded;
      put(st, "records_q_below_0.05", s.commuting_count);
      put(st, "max_ratio_deviation_q_below_0.05", s.commuting_max_deviation);
      break;
  }
  j["statistics"] = st;
  return j.dump(2) + "\n";
}

void emit_outputs(const ScenarioRun& run, const Summary* summary, const ScenarioConfig& cfg) {
  const std::filesystem::path dir(cfg.outdir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "records.csv", records_to_csv(run.records));
  write_file(dir / "summary.json", summary_to_json(summary, run, cfg));
  if (!run.records.empty()) {
    write_file(dir / ("scatter_" + scenario_name(cfg.scenario) + ".svg"), scatter_svg(cfg.scenario, run.records));
  }
}

}  // namespace qswitch
