// Command-line front end: channel sampling, single capacities, and the
// experiment scenarios.
//
// Exit codes: 0 success, 1 contract violation (bad arguments or input), 2 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qswitch/channel_json.hpp"
#include "qswitch/combiner.hpp"
#include "qswitch/errors.hpp"
#include "qswitch/holevo.hpp"
#include "qswitch/lab.hpp"
#include "qswitch/random.hpp"

using namespace qswitch;

namespace {

struct SampleArgs {
  std::size_t n = 1;
  std::size_t dim = 2;
  std::string kind = "choi";
  std::size_t k_ops = 2;
  std::uint64_t seed = 1;
  std::string out;
};

struct CapacityArgs {
  std::string in;
  std::string combiner = "none";
  std::string control = "plus";
  std::string pairing = "self";
  std::string config;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> hops;
  std::optional<std::size_t> n_states;
  std::uint64_t seed = 1;
  std::string out;
};

struct ExperimentArgs {
  std::string scenario;
  std::optional<std::size_t> n;
  std::optional<std::size_t> gauges;
  std::uint64_t seed = 1;
  std::string outdir = ".";
  bool paper_scale = false;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> hops;
  std::size_t threads = 0;
  std::string kind = "choi";
  std::size_t k_ops = 2;
};

int run_sample(const SampleArgs& a) {
  std::vector<QuantumChannel> channels;
  const SeededRng root(a.seed);
  for (std::size_t i = 0; i < a.n; ++i) {
    SeededRng rng = root.derive({i});
    if (a.kind == "choi") {
      channels.push_back(random_choi_channel(rng, a.dim));
    } else if (a.kind == "unitary-mixture") {
      channels.push_back(random_unitary_mixture(rng, a.dim, a.k_ops));
    } else if (a.kind == "depolarizing") {
      if (a.dim != 2) throw ContractViolation("depolarizing channel is defined for dim 2");
      channels.push_back(named::depolarizing());
    } else if (a.kind == "identity") {
      channels.push_back(named::identity(a.dim));
    } else {
      throw ContractViolation("unknown kind '" + a.kind + "'");
    }
  }
  write_channels(a.out, channels);
  return 0;
}

ControlState control_for(const std::string& name, std::size_t dim) {
  if (name == "plus") return ControlState::uniform(dim);
  if (name == "zero") {
    std::vector<Complex> amps(dim, 0.0);
    amps[0] = 1.0;
    return ControlState(std::move(amps));
  }
  throw ContractViolation("unknown control '" + name + "'");
}

struct Job {
  std::string label;
  QuantumChannel channel;  // what the optimizer sees: target in, full output
};

std::vector<Job> build_jobs(const std::vector<QuantumChannel>& channels, const CapacityArgs& a) {
  const std::size_t arity = a.combiner == "none" ? 1 : a.combiner == "switch3" ? 3 : 2;
  std::vector<std::vector<std::size_t>> groups;
  if (a.pairing == "self") {
    for (std::size_t i = 0; i < channels.size(); ++i) groups.push_back(std::vector<std::size_t>(arity, i));
  } else if (a.pairing == "consecutive") {
    if (channels.size() % arity != 0) {
      throw ContractViolation("consecutive pairing needs a multiple of " + std::to_string(arity) + " channels");
    }
    for (std::size_t i = 0; i < channels.size(); i += arity) {
      std::vector<std::size_t> g;
      for (std::size_t k = 0; k < arity; ++k) g.push_back(i + k);
      groups.push_back(g);
    }
  } else {
    throw ContractViolation("unknown pairing '" + a.pairing + "'");
  }

  std::vector<Job> jobs;
  for (const auto& g : groups) {
    std::string label;
    for (std::size_t k = 0; k < g.size(); ++k) label += (k ? ";" : "") + std::to_string(g[k]);
    const QuantumChannel& c0 = channels[g[0]];
    if (a.combiner == "none") {
      jobs.push_back({label, c0});
    } else if (a.combiner == "compose") {
      jobs.push_back({label, compose(channels[g[1]], c0)});
    } else if (a.combiner == "switch") {
      jobs.push_back({label, restrict_control(quantum_switch(c0, channels[g[1]]), control_for(a.control, 2))});
    } else if (a.combiner == "sup") {
      jobs.push_back({label, restrict_control(superpose(c0, channels[g[1]]), control_for(a.control, 2))});
    } else if (a.combiner == "switch3") {
      const std::vector<QuantumChannel> trio{c0, channels[g[1]], channels[g[2]]};
      const auto orderings = all_orderings(3);
      jobs.push_back({label, restrict_control(n_switch(trio, orderings), control_for(a.control, orderings.size()))});
    } else {
      throw ContractViolation("unknown combiner '" + a.combiner + "'");
    }
  }
  return jobs;
}

int run_capacity(const CapacityArgs& a) {
  OptimizerConfig cfg = a.config.empty() ? OptimizerConfig{} : load_optimizer_config(a.config);
  if (a.restarts) cfg.restarts = *a.restarts;
  if (a.hops) cfg.hops = *a.hops;
  if (a.n_states) cfg.n_states = *a.n_states;
  cfg.validate();

  const std::vector<QuantumChannel> channels = read_channels(a.in);
  for (const auto& ch : channels) require_valid(ch, "capacity input");
  const std::vector<Job> jobs = build_jobs(channels, a);

  std::string csv = "index,channels,combiner,control,chi,sigma,failed_restarts\n";
  const SeededRng root(a.seed);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const CapacityEstimate est = estimate_capacity(jobs[i].channel, cfg, root.derive({i}));
    char buf[128];
    std::snprintf(buf, sizeof buf, ",%.9g,%.9g,%zu\n", est.chi, est.sigma, est.failed_restarts);
    csv += std::to_string(i) + ',' + jobs[i].label + ',' + a.combiner + ',' +
           (a.combiner == "none" || a.combiner == "compose" ? "" : a.control) + buf;
  }
  if (a.out.empty() || a.out == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw IoError("cannot write " + a.out);
    out << csv;
    if (!out) throw IoError("write failed for " + a.out);
  }
  return 0;
}

int run_experiment(const ExperimentArgs& a) {
  const Scenario s = parse_scenario(a.scenario);
  ScenarioConfig cfg;
  if (a.paper_scale) cfg = ScenarioConfig::paper_scale(s);
  cfg.scenario = s;
  if (a.n) cfg.n_channels = *a.n;
  if (a.gauges) cfg.n_gauges = *a.gauges;
  if (a.restarts) cfg.optimizer.restarts = *a.restarts;
  if (a.hops) cfg.optimizer.hops = *a.hops;
  cfg.seed = a.seed;
  if (a.kind == "choi") {
    cfg.kind = ChannelKind::Choi;
  } else if (a.kind == "unitary-mixture") {
    cfg.kind = ChannelKind::UnitaryMixture;
  } else {
    throw ContractViolation("unknown kind '" + a.kind + "'");
  }
  cfg.k_ops = a.k_ops;
  cfg.outdir = a.outdir;
  cfg.threads = a.threads;
  cfg.validate();

  const ScenarioRun run = run_scenario(cfg);
  std::optional<Summary> summary;
  if (!run.records.empty()) summary = summarize(run.records);
  emit_outputs(run, summary ? &*summary : nullptr, cfg);
  if (!run.complete) {
    std::cerr << "error: scenario incomplete: " << run.error << "\n";
    return 1;
  }
  std::cout << "wrote " << run.records.size() << " records to " << cfg.outdir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity experiments for switched and superposed quantum channels"};
  app.require_subcommand(1);

  SampleArgs sample;
  auto* sc = app.add_subcommand("sample-channels", "Write random channels as JSON");
  sc->add_option("--n", sample.n, "Number of channels")->capture_default_str();
  sc->add_option("--dim", sample.dim, "Hilbert space dimension")->capture_default_str();
  sc->add_option("--kind", sample.kind, "choi | unitary-mixture | depolarizing | identity")->capture_default_str();
  sc->add_option("--k-ops", sample.k_ops, "Unitaries per mixture")->capture_default_str();
  sc->add_option("--seed", sample.seed, "Random seed")->capture_default_str();
  sc->add_option("--out", sample.out, "Output JSON file")->required();

  CapacityArgs cap;
  auto* cc = app.add_subcommand("capacity", "Estimate Holevo capacities of channels from a JSON file");
  cc->add_option("--in", cap.in, "Input channel JSON")->required();
  cc->add_option("--combiner", cap.combiner, "none | switch | sup | compose | switch3")->capture_default_str();
  cc->add_option("--control", cap.control, "plus | zero")->capture_default_str();
  cc->add_option("--pairing", cap.pairing, "self: combine each channel with itself; consecutive: group in order")
      ->capture_default_str();
  cc->add_option("--config", cap.config, "Optimizer key=value file");
  cc->add_option("--restarts", cap.restarts, "Basin-hopping restarts (default 20)");
  cc->add_option("--hops", cap.hops, "Hops per restart (default 100)");
  cc->add_option("--n-states", cap.n_states, "Ensemble size (default 4)");
  cc->add_option("--seed", cap.seed, "Random seed")->capture_default_str();
  cc->add_option("--out", cap.out, "Output CSV (stdout if omitted)");

  ExperimentArgs exp;
  auto* ec = app.add_subcommand("experiment", "Run an experiment scenario");
  ec->add_option("scenario", exp.scenario, "pairs | gauges | self | with-depol | q-gain | q-compose")->required();
  ec->add_option("--n", exp.n, "Channels (default 200)");
  ec->add_option("--gauges", exp.gauges, "Kraus gauges per channel (default 50)");
  ec->add_option("--seed", exp.seed, "Random seed")->capture_default_str();
  ec->add_option("--outdir", exp.outdir, "Output directory")->capture_default_str();
  ec->add_flag("--paper-scale", exp.paper_scale, "1000 channels, 200 gauges, full optimizer settings");
  ec->add_option("--restarts", exp.restarts, "Override optimizer restarts");
  ec->add_option("--hops", exp.hops, "Override hops per restart");
  ec->add_option("--kind", exp.kind, "Channel sampler: choi | unitary-mixture")->capture_default_str();
  ec->add_option("--k-ops", exp.k_ops, "Unitaries per mixture")->capture_default_str();
  ec->add_option("--threads", exp.threads, "Worker threads (0: all cores)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sc) return run_sample(sample);
    if (*cc) return run_capacity(cap);
    if (*ec) return run_experiment(exp);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
