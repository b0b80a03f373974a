// gsnn: command-line driver for the graph spiking network engine.
//
// Subcommands: encode, query, verify, train-transitivity, sweep-inhibition,
// induce, export-trace, snapshot-info. Exit codes: 0 success, 1 experiment
// assertion failure, 2 input/config error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gsnn/config.hpp"
#include "gsnn/kg.hpp"
#include "gsnn/network.hpp"
#include "gsnn/protocols.hpp"
#include "gsnn/query.hpp"
#include "gsnn/snapshot.hpp"

namespace fs = std::filesystem;
using namespace gsnn;

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path,
                  "config file (default: $GSNN_CONFIG if set)");
  cmd->add_option("--set", opts.overrides, "override a config key, e.g. --set dt_ms=0.5");
  cmd->add_option("--seed", opts.seed, "override the random seed");
}

SimParams resolve_params(const CommonOpts& opts) {
  SimParams p;
  std::string path = opts.config_path;
  if (path.empty())
    if (const char* env = std::getenv("GSNN_CONFIG")) path = env;
  if (!path.empty()) p = load_config_file(path);
  for (const auto& kv : opts.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got: " + kv);
    set_param(p, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed >= 0) p.seed = static_cast<std::uint64_t>(opts.seed);
  p.validate();
  return p;
}

/// Echo the effective config and append a timestamped line to run.log.
/// Timestamps live only here so every other output is byte-reproducible.
void prepare_out_dir(const fs::path& dir, const SimParams& p, const std::string& command) {
  fs::create_directories(dir);
  std::ofstream echo(dir / "config.echo");
  echo << echo_config(p);
  std::ofstream log(dir / "run.log", std::ios::app);
  std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::localtime(&now));
  log << buf << " " << command << "\n";
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) items.push_back(item);
  return items;
}

void write_metrics_csv(const fs::path& path, const TrainingResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metrics CSV: " + path.string());
  out << "epoch,accuracy,mean_reward\n";
  out.precision(17);
  for (const auto& e : result.epochs)
    out << e.epoch << ',' << e.accuracy << ',' << e.mean_reward << '\n';
}

int cmd_encode(const CommonOpts& common, const std::string& triples_path,
               const std::string& out_path, bool dedup) {
  SimParams p = resolve_params(common);
  auto t_start = std::chrono::steady_clock::now();
  auto triples = load_triples(triples_path, dedup);
  Network net(p);
  bind_symbols(triples, net);
  std::size_t last_pct = 0;
  encode_graph(net, triples, EncodingProtocol::from(p),
               [&](std::size_t done, std::size_t total) {
                 std::size_t pct = done * 10 / total;
                 if (pct != last_pct) {
                   last_pct = pct;
                   std::cerr << "encoded " << done << "/" << total << " triples\n";
                 }
               });
  save_snapshot(net, out_path);
  auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start);
  std::cout << "encoded " << triples.size() << " triples into " << net.registry.size()
            << " engrams (" << net.synapses.size() << " synapses) in " << dt.count()
            << " s\n"
            << "snapshot: " << out_path << "\n";
  return 0;
}

int cmd_query(const CommonOpts& common, const std::string& snapshot_path,
              const std::string& head, const std::string& relation, double theta_arg,
              const std::string& trace_dir) {
  Network net = load_snapshot(snapshot_path);
  if (common.seed >= 0) net.params.seed = static_cast<std::uint64_t>(common.seed);
  for (const auto& kv : common.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value");
    set_param(net.params, kv.substr(0, eq), kv.substr(eq + 1));
  }
  double theta = theta_arg >= 0 ? theta_arg : net.params.theta;
  QueryResult res = query(net, head, relation, theta);
  std::cout << "query(" << head << ", " << relation << ") theta=" << theta << "\n";
  std::size_t shown = 0;
  for (const auto& c : res.candidates) {
    if (++shown > 10) break;
    std::cout << "  " << c.label << "  peak_sim=" << c.peak_sim;
    if (c.time_to_threshold_ms >= 0)
      std::cout << "  t_threshold=" << c.time_to_threshold_ms << "ms";
    std::cout << (res.contains_answer(c.label) ? "  [answer]" : "") << "\n";
  }
  if (res.answers.empty()) std::cout << "  (no candidate reached theta)\n";
  if (!trace_dir.empty()) {
    fs::create_directories(trace_dir);
    fs::path base = fs::path(trace_dir) / ("query_" + head + "_" + relation);
    export_reasoning_trace(res, base.string() + ".csv", base.string() + ".json");
    std::cout << "trace: " << base.string() << ".csv\n";
  }
  return 0;
}

int cmd_verify(const CommonOpts& common, const std::string& snapshot_path,
               const std::string& head, const std::string& relation,
               const std::string& tail, double theta_arg) {
  Network net = load_snapshot(snapshot_path);
  if (common.seed >= 0) net.params.seed = static_cast<std::uint64_t>(common.seed);
  double theta = theta_arg >= 0 ? theta_arg : net.params.theta;
  QueryResult res;
  bool ok = verify_triple(net, head, relation, tail, theta, &res);
  double peak = 0.0;
  for (const auto& c : res.candidates)
    if (c.label == tail) peak = c.peak_sim;
  std::cout << (ok ? "true" : "false") << "  (peak_sim=" << peak << ", theta=" << theta
            << ")\n";
  return ok ? 0 : 1;
}

int cmd_train(const CommonOpts& common, const std::string& triples_path,
              const std::string& meta_path, const std::string& out_dir,
              std::int64_t epochs_arg, double mask_fraction,
              const std::string& from_snapshot) {
  SimParams p = resolve_params(common);
  std::uint32_t epochs = epochs_arg >= 0 ? static_cast<std::uint32_t>(epochs_arg) : p.epochs;
  auto triples = load_triples(triples_path);
  auto meta = load_relation_meta(meta_path);
  prepare_out_dir(out_dir, p, "train-transitivity " + triples_path);

  DatasetSplit split = mask_split(triples, mask_fraction, p.seed);
  Network net = [&] {
    if (!from_snapshot.empty()) {
      Network loaded = load_snapshot(from_snapshot);
      return loaded;
    }
    Network fresh(p);
    bind_symbols(triples, fresh);
    encode_graph(fresh, split.train, EncodingProtocol::from(p));
    return fresh;
  }();

  TrainingResult result = train_transitivity(net, split, meta, epochs);
  write_metrics_csv(fs::path(out_dir) / "metrics.csv", result);
  save_snapshot(net, (fs::path(out_dir) / "snapshot.gsnn").string());
  std::cout << "train-transitivity: " << result.n_positive_queries << " positive / "
            << result.n_negative_queries << " negative queries, " << epochs
            << " epochs\n";
  if (!result.epochs.empty())
    std::cout << "final accuracy: " << result.epochs.back().accuracy << "\n";
  std::cout << "metrics: " << (fs::path(out_dir) / "metrics.csv").string() << "\n";
  return 0;
}

int cmd_sweep(const CommonOpts& common, const std::string& triples_path,
              const std::string& meta_path, const std::string& ratios_arg,
              const std::string& out_dir, std::int64_t epochs_arg, unsigned n_seeds,
              unsigned jobs, double mask_fraction) {
  SimParams p = resolve_params(common);
  std::uint32_t epochs = epochs_arg >= 0 ? static_cast<std::uint32_t>(epochs_arg) : p.epochs;
  auto triples = load_triples(triples_path);
  auto meta = load_relation_meta(meta_path);
  std::vector<double> ratios;
  for (const auto& s : split_csv_list(ratios_arg)) ratios.push_back(std::stod(s));
  if (ratios.empty()) throw ConfigError("sweep-inhibition: --ratios must be non-empty");
  std::vector<std::uint64_t> seeds;
  for (unsigned i = 0; i < n_seeds; ++i) seeds.push_back(p.seed + i);
  prepare_out_dir(out_dir, p, "sweep-inhibition " + triples_path);

  SweepResult result = sweep_inhibitory_ratio(p, triples, meta, ratios, epochs, seeds,
                                              jobs, mask_fraction);
  result.write_csv((fs::path(out_dir) / "sweep.csv").string());
  std::cout << "sweep-inhibition over " << ratios.size() << " ratios x " << seeds.size()
            << " seeds\n";
  for (const auto& pt : result.points)
    std::cout << "  ratio=" << pt.ratio << "  median_accuracy=" << pt.median_accuracy
              << "\n";
  std::cout << "peak ratio: " << result.peak_ratio() << "\n"
            << "csv: " << (fs::path(out_dir) / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_induce(const CommonOpts& common, const std::string& triples_path,
               const std::string& out_dir, const std::string& costim_arg,
               double duration_arg, const std::string& verify_arg) {
  SimParams p = resolve_params(common);
  auto triples = load_triples(triples_path);
  auto costim = split_csv_list(costim_arg);
  if (costim.empty()) throw ConfigError("induce: --co-stim must list at least one symbol");
  double duration = duration_arg >= 0 ? duration_arg : p.costim_ms;
  prepare_out_dir(out_dir, p, "induce " + triples_path);

  Network net(p);
  bind_symbols(triples, net);
  encode_graph(net, triples, EncodingProtocol::from(p));
  InductionReport report = run_induction(net, triples, costim, duration);
  report.write_tsv((fs::path(out_dir) / "emergent.tsv").string());
  std::cout << "induce: " << report.emergent.size() << " emergent triple(s)\n";
  for (const auto& e : report.emergent)
    std::cout << "  (" << e.triple.head << ", " << e.triple.relation << ", "
              << e.triple.tail << ")  w_hr=" << e.mean_w_head_rel
              << " w_rt=" << e.mean_w_rel_tail << "\n";
  save_snapshot(net, (fs::path(out_dir) / "snapshot.gsnn").string());

  if (!verify_arg.empty()) {
    auto parts = split_csv_list(verify_arg);
    if (parts.size() != 3)
      throw ConfigError("induce: --verify expects head,relation,tail");
    bool ok = verify_triple(net, parts[0], parts[1], parts[2], net.params.theta);
    std::cout << "verify(" << parts[0] << ", " << parts[1] << ") -> " << parts[2]
              << ": " << (ok ? "true" : "false") << "\n";
    if (!ok) return 1;
  }
  return 0;
}

int cmd_export_trace(const CommonOpts& common, const std::string& snapshot_path,
                     const std::string& head, const std::string& relation,
                     const std::string& out_base) {
  Network net = load_snapshot(snapshot_path);
  if (common.seed >= 0) net.params.seed = static_cast<std::uint64_t>(common.seed);
  QueryResult res = query(net, head, relation, net.params.theta);
  fs::path base(out_base);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  export_reasoning_trace(res, out_base + ".csv", out_base + ".json");
  std::cout << "wrote " << out_base << ".csv and " << out_base << ".json\n";
  return 0;
}

int cmd_snapshot_info(const std::string& snapshot_path, const std::string& json_path) {
  Network net = load_snapshot(snapshot_path);
  std::cout << "snapshot: " << snapshot_path << "\n"
            << "  neurons: " << net.params.n_neurons << "\n"
            << "  engrams: " << net.registry.size()
            << " (memory load alpha=" << net.registry.memory_load() << ")\n"
            << "  synapses: " << net.synapses.size() << "\n"
            << "  clock: " << net.state.clock_ms << " ms\n"
            << "  seed: " << net.params.seed << "\n";
  for (const auto& label : net.registry.labels()) {
    const Engram& e = net.registry.at(label);
    std::cout << "    " << (e.kind == SymbolKind::Relation ? "[rel] " : "[ent] ")
              << label << " (" << e.size() << " members, " << e.inhibitory_count()
              << " inhibitory)\n";
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw IoError("cannot write JSON export: " + json_path);
    out << snapshot_debug_json(net).dump(2) << "\n";
    std::cout << "json export: " << json_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gsnn - knowledge-graph spiking network engine"};
  app.require_subcommand(1);

  CommonOpts common;

  // encode
  auto* enc = app.add_subcommand("encode", "encode a triple file into a snapshot");
  std::string enc_triples, enc_out = "snapshot.gsnn";
  bool enc_dedup = false;
  enc->add_option("triples", enc_triples, "TSV triples file")->required();
  enc->add_option("--out", enc_out, "output snapshot path");
  enc->add_flag("--dedup", enc_dedup, "drop duplicate triples");
  add_common(enc, common);

  // query
  auto* qry = app.add_subcommand("query", "rank candidate tails for head+relation");
  std::string qry_snapshot, qry_head, qry_rel, qry_trace;
  double qry_theta = -1;
  qry->add_option("snapshot", qry_snapshot)->required();
  qry->add_option("head", qry_head)->required();
  qry->add_option("relation", qry_rel)->required();
  qry->add_option("--theta", qry_theta, "answer threshold (default from snapshot)");
  qry->add_option("--trace", qry_trace, "directory for trace CSV/JSON export");
  add_common(qry, common);

  // verify
  auto* ver = app.add_subcommand("verify", "check whether a triple is retrieved");
  std::string ver_snapshot, ver_head, ver_rel, ver_tail;
  double ver_theta = -1;
  ver->add_option("snapshot", ver_snapshot)->required();
  ver->add_option("head", ver_head)->required();
  ver->add_option("relation", ver_rel)->required();
  ver->add_option("tail", ver_tail)->required();
  ver->add_option("--theta", ver_theta);
  add_common(ver, common);

  // train-transitivity
  auto* trn = app.add_subcommand("train-transitivity",
                                 "reward-driven transitivity training on masked queries");
  std::string trn_triples, trn_meta, trn_out = "out", trn_from;
  std::int64_t trn_epochs = -1;
  double trn_mask = 0.3;
  trn->add_option("triples", trn_triples)->required();
  trn->add_option("meta", trn_meta, "relation metadata TSV")->required();
  trn->add_option("--out", trn_out, "output directory");
  trn->add_option("--epochs", trn_epochs);
  trn->add_option("--mask-fraction", trn_mask);
  trn->add_option("--from-snapshot", trn_from, "resume from an encoded snapshot");
  add_common(trn, common);

  // sweep-inhibition
  auto* swp = app.add_subcommand("sweep-inhibition",
                                 "train at several inhibitory ratios and compare");
  std::string swp_triples, swp_meta, swp_ratios = "0,0.05,0.1,0.15,0.2,0.3", swp_out = "sweep";
  std::int64_t swp_epochs = -1;
  unsigned swp_seeds = 5, swp_jobs = 1;
  double swp_mask = 0.3;
  swp->add_option("triples", swp_triples)->required();
  swp->add_option("meta", swp_meta)->required();
  swp->add_option("--ratios", swp_ratios, "comma-separated inhibitory ratios");
  swp->add_option("--out", swp_out, "output directory");
  swp->add_option("--epochs", swp_epochs);
  swp->add_option("--seeds", swp_seeds, "number of seeds per ratio");
  swp->add_option("--jobs", swp_jobs, "parallel workers");
  swp->add_option("--mask-fraction", swp_mask);
  add_common(swp, common);

  // induce
  auto* ind = app.add_subcommand("induce", "co-stimulate engrams and report emergent triples");
  std::string ind_triples, ind_out = "induce", ind_costim, ind_verify;
  double ind_duration = -1;
  ind->add_option("triples", ind_triples)->required();
  ind->add_option("--co-stim", ind_costim, "comma-separated symbols to co-stimulate")
      ->required();
  ind->add_option("--out", ind_out, "output directory");
  ind->add_option("--duration", ind_duration, "co-stimulation duration [ms]");
  ind->add_option("--verify", ind_verify, "post-hoc query head,relation,tail");
  add_common(ind, common);

  // export-trace
  auto* exp = app.add_subcommand("export-trace", "run a query and export its traces");
  std::string exp_snapshot, exp_head, exp_rel, exp_out = "trace";
  exp->add_option("snapshot", exp_snapshot)->required();
  exp->add_option("head", exp_head)->required();
  exp->add_option("relation", exp_rel)->required();
  exp->add_option("--out", exp_out, "output basename (writes .csv and .json)");
  add_common(exp, common);

  // snapshot-info
  auto* nfo = app.add_subcommand("snapshot-info", "describe a snapshot file");
  std::string nfo_snapshot, nfo_json;
  nfo->add_option("snapshot", nfo_snapshot)->required();
  nfo->add_option("--json", nfo_json, "write a lossless JSON debug export");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (enc->parsed()) return cmd_encode(common, enc_triples, enc_out, enc_dedup);
    if (qry->parsed())
      return cmd_query(common, qry_snapshot, qry_head, qry_rel, qry_theta, qry_trace);
    if (ver->parsed())
      return cmd_verify(common, ver_snapshot, ver_head, ver_rel, ver_tail, ver_theta);
    if (trn->parsed())
      return cmd_train(common, trn_triples, trn_meta, trn_out, trn_epochs, trn_mask,
                       trn_from);
    if (swp->parsed())
      return cmd_sweep(common, swp_triples, swp_meta, swp_ratios, swp_out, swp_epochs,
                       swp_seeds, swp_jobs, swp_mask);
    if (ind->parsed())
      return cmd_induce(common, ind_triples, ind_out, ind_costim, ind_duration,
                        ind_verify);
    if (exp->parsed())
      return cmd_export_trace(common, exp_snapshot, exp_head, exp_rel, exp_out);
    if (nfo->parsed()) return cmd_snapshot_info(nfo_snapshot, nfo_json);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
