#include "uiknow/cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "uiknow/agent.hpp"
#include "uiknow/bridge_environment.hpp"
#include "uiknow/config.hpp"
#include "uiknow/error.hpp"
#include "uiknow/evaluation.hpp"
#include "uiknow/explorer.hpp"
#include "uiknow/knowledge_store.hpp"
#include "uiknow/miner.hpp"
#include "uiknow/sim_environment.hpp"
#include "uiknow/trajectory_io.hpp"

namespace uiknow::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  std::string template_dir;
  std::string log_level;
  std::optional<std::size_t> jobs;

  std::string env;
  std::string app;
  std::optional<int> branching;
  std::optional<int> depth;
  std::optional<int> max_steps;
  std::string out_dir;
  bool overwrite = false;

  std::string traj_dir;
  std::string store_path;
  std::string goal;
  std::string report_path;

  std::string dataset;
  bool ranked = false;

  std::string entry_id;
};

void write_file(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

struct Context {
  RunConfig config;
  fs::path store_path;
  std::optional<TemplateLibrary> templates;

  const TemplateLibrary& library() const { return *templates; }
};

Context make_context(const Options& o) {
  Context ctx;
  if (!o.config_path.empty()) ctx.config = load_run_config(o.config_path);
  if (!o.template_dir.empty()) ctx.config.template_dir = o.template_dir;
  if (!o.log_level.empty()) ctx.config.log_level = o.log_level;
  if (o.jobs) ctx.config.jobs = *o.jobs;
  if (o.branching) ctx.config.exploration.branching_factor = *o.branching;
  if (o.depth) ctx.config.exploration.max_depth = *o.depth;
  if (o.max_steps) {
    ctx.config.exploration.max_steps = *o.max_steps;
    ctx.config.agent.max_steps = *o.max_steps;
  }
  ctx.config.validate();
  configure_logging(ctx.config.log_level);
  ctx.store_path = o.store_path.empty() ? ctx.config.store_path : fs::path(o.store_path);
  ctx.templates.emplace(ctx.config.template_dir ? *ctx.config.template_dir : TemplateLibrary::default_directory());
  return ctx;
}

KnowledgeStore open_store(const Context& ctx) {
  auto store = KnowledgeStore::open(ctx.store_path, ctx.config.store);
  if (store.config().dimension != ctx.config.gateway.dimension) {
    throw Error(ErrorKind::InvalidConfig, "store " + ctx.store_path.string() + " has dimension " +
                                              std::to_string(store.config().dimension) + " but the gateway uses " +
                                              std::to_string(ctx.config.gateway.dimension));
  }
  return store;
}

nlohmann::json config_summary(const RunConfig& c) {
  return {{"branching_factor", c.exploration.branching_factor},
          {"max_depth", c.exploration.max_depth},
          {"max_steps", c.exploration.max_steps},
          {"phash_threshold", c.exploration.phash_threshold}};
}

int cmd_explore(const Options& o, std::ostream& out) {
  const auto ctx = make_context(o);
  const fs::path root(o.out_dir);
  if (fs::exists(root) && !o.overwrite) {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (fs::exists(entry.path() / "meta.json")) {
        throw Error(ErrorKind::PreconditionViolation,
                    root.string() + " already holds trajectories; pass --overwrite or choose another directory");
      }
    }
  }
  if (o.overwrite && fs::exists(root)) {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (fs::exists(entry.path() / "meta.json")) fs::remove_all(entry.path());
    }
  }
  fs::create_directories(root);

  auto env = open_environment(o.env, o.app);
  const auto gateway = make_gateway(ctx.config.gateway);
  Explorer explorer(gateway.chat, ctx.library(), ctx.config.exploration);
  const auto summary = config_summary(ctx.config);
  explorer.on_trajectory = [&](const Trajectory& t) { write_trajectory(t, root / t.id, summary); };
  const auto trajectories = explorer.explore(*env);

  std::size_t steps = 0;
  for (const auto& t : trajectories) steps += t.steps.size();
  out << "explored " << trajectories.size() << " trajectories (" << steps << " steps) into " << root.string() << "\n";
  return 0;
}

int cmd_mine(const Options& o, std::ostream& out) {
  const auto ctx = make_context(o);
  const auto trajectories = read_trajectories(o.traj_dir);
  auto store = open_store(ctx);
  KnowledgeMiner miner(make_gateway(ctx.config.gateway), ctx.library(), ctx.config.exploration.phash_threshold);

  // Extraction runs in parallel; upserts stay in trajectory order so the store is reproducible.
  std::vector<std::vector<KnowledgeEntry>> mined(trajectories.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < trajectories.size(); i = next++) mined[i] = miner.mine(trajectories[i]);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = trajectories.size();
    }
  };
  const auto jobs = std::clamp<std::size_t>(ctx.config.jobs, 1, std::max<std::size_t>(trajectories.size(), 1));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::size_t inserted = 0, merged = 0, discarded = 0, entries = 0;
  for (auto& batch : mined) {
    for (auto& e : batch) {
      ++entries;
      switch (store.upsert(std::move(e)).kind) {
        case UpsertKind::Inserted:
          ++inserted;
          break;
        case UpsertKind::Merged:
          ++merged;
          break;
        case UpsertKind::Discarded:
          ++discarded;
          break;
      }
    }
  }
  store.save(ctx.store_path);
  const auto stats = miner.stats();
  out << "trajectories=" << trajectories.size() << " transitions=" << stats.transitions
      << " filtered=" << stats.filtered << " skipped=" << stats.skipped << " entries=" << entries
      << " inserted=" << inserted << " merged=" << merged << " discarded=" << discarded
      << " store_size=" << store.size() << "\n";
  return 0;
}

int cmd_run(const Options& o, std::ostream& out) {
  const auto ctx = make_context(o);
  auto env = open_environment(o.env, o.app);
  std::optional<KnowledgeStore> store;
  if (fs::exists(ctx.store_path)) store.emplace(open_store(ctx));
  Agent agent(make_gateway(ctx.config.gateway), ctx.library(), store ? &*store : nullptr, ctx.config.agent);
  const auto result = agent.run_task(*env, o.goal);
  const auto report = result.to_json().dump(2) + "\n";
  if (!o.report_path.empty()) write_file(o.report_path, report);
  out << report;
  return result.status == EpisodeStatus::Aborted ? 1 : 0;
}

int cmd_eval_krb(const Options& o, std::ostream& out) {
  const auto ctx = make_context(o);
  const auto dataset = load_krb_dataset(o.dataset);
  std::optional<KnowledgeStore> store;
  if (!o.store_path.empty()) store.emplace(open_store(ctx));
  if (o.ranked && !store) throw Error(ErrorKind::PreconditionViolation, "--ranked needs --store");
  KrbOptions options{ctx.config.agent.top_k, ctx.config.agent.tau, ctx.config.agent.ranker_retries, ctx.config.jobs};
  const auto report =
      run_krb(dataset, make_gateway(ctx.config.gateway), ctx.library(), store ? &*store : nullptr, o.ranked, options);
  if (!o.report_path.empty()) write_file(o.report_path, report.to_json().dump(2) + "\n");
  out << report.to_table();
  return 0;
}

int cmd_store_ls(const Options& o, std::ostream& out) {
  const auto ctx = make_context(o);
  const auto store = KnowledgeStore::load(ctx.store_path);
  out << "id\tapp\tvalues\tmerges\tfirst_value\n";
  for (const auto& e : store.entries()) {
    out << e.id << '\t' << e.app << '\t' << e.values.size() << '\t' << e.merge_count << '\t' << e.values.front()
        << '\n';
  }
  out << store.size() << " entries\n";
  return 0;
}

int cmd_store_show(const Options& o, std::ostream& out) {
  const auto ctx = make_context(o);
  const auto store = KnowledgeStore::load(ctx.store_path);
  const auto entry = store.get(o.entry_id);
  if (!entry) throw Error(ErrorKind::PreconditionViolation, "no entry '" + o.entry_id + "'");
  auto provenance = nlohmann::json::array();
  for (const auto& p : entry->provenance) provenance.push_back({{"trajectory", p.trajectory_id}, {"step", p.step}});
  const nlohmann::json j{{"id", entry->id},
                         {"app", entry->app},
                         {"key_size", {entry->key_patch.width(), entry->key_patch.height()}},
                         {"dimension", entry->key_embedding.dimension()},
                         {"values", entry->values},
                         {"provenance", provenance},
                         {"merge_count", entry->merge_count},
                         {"created", entry->created},
                         {"updated", entry->updated}};
  out << j.dump(2) << "\n";
  return 0;
}

}  // namespace

std::unique_ptr<Environment> open_environment(const std::string& spec, const std::string& app_id) {
  if (spec.empty()) throw Error(ErrorKind::InvalidConfig, "--env is required");
  if (spec.rfind("tcp://", 0) == 0) {
    const auto rest = spec.substr(6);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorKind::InvalidConfig, "expected tcp://host:port");
    const auto port = std::stoi(rest.substr(colon + 1));
    if (port <= 0 || port > 65535) throw Error(ErrorKind::InvalidConfig, "bad port in " + spec);
    auto transport =
        make_tcp_transport(rest.substr(0, colon), static_cast<std::uint16_t>(port), std::chrono::seconds(30));
    return std::make_unique<BridgeEnvironment>(std::move(transport), BridgeOptions{app_id, app_id, false});
  }
  if (spec.rfind("exec:", 0) == 0) {
    std::istringstream words(spec.substr(5));
    std::vector<std::string> argv;
    for (std::string w; words >> w;) argv.push_back(w);
    if (argv.empty()) throw Error(ErrorKind::InvalidConfig, "exec: needs a command");
    return std::make_unique<BridgeEnvironment>(make_process_transport(argv), BridgeOptions{app_id, app_id, false});
  }
  auto model = SimAppModel::load(spec);
  if (!app_id.empty() && app_id != model.app) {
    throw Error(ErrorKind::InvalidConfig, "--app " + app_id + " does not match model app " + model.app);
  }
  return std::make_unique<SimEnvironment>(std::move(model));
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Explore GUI apps, mine transition knowledge and run knowledge-guided agents", "uiknow"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--config", o.config_path, "TOML or JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--templates", o.template_dir, "prompt template directory");
  app.add_option("--log-level", o.log_level, "trace|debug|info|warn|error|off");
  app.add_option("--jobs", o.jobs, "parallel workers for mining and evaluation")->check(CLI::PositiveNumber);

  auto* explore = app.add_subcommand("explore", "explore an app and record trajectories");
  explore->add_option("--env", o.env, "sim model JSON, tcp://host:port or exec:<command>")->required();
  explore->add_option("--app", o.app, "application id");
  explore->add_option("--branching", o.branching, "tasks generated per node")->check(CLI::PositiveNumber);
  explore->add_option("--depth", o.depth, "maximum recursion depth")->check(CLI::NonNegativeNumber);
  explore->add_option("--max-steps", o.max_steps, "steps per task")->check(CLI::PositiveNumber);
  explore->add_option("--out", o.out_dir, "output directory")->required();
  explore->add_flag("--overwrite", o.overwrite, "replace trajectories already in --out");

  auto* mine = app.add_subcommand("mine", "mine knowledge from recorded trajectories into a store");
  mine->add_option("--traj", o.traj_dir, "trajectory directory")->required()->check(CLI::ExistingDirectory);
  mine->add_option("--store", o.store_path, "knowledge store file");

  auto* run = app.add_subcommand("run", "execute one goal with knowledge guidance");
  run->add_option("--env", o.env, "sim model JSON, tcp://host:port or exec:<command>")->required();
  run->add_option("--app", o.app, "application id");
  run->add_option("--goal", o.goal, "instruction")->required();
  run->add_option("--store", o.store_path, "knowledge store file");
  run->add_option("--max-steps", o.max_steps, "step budget")->check(CLI::PositiveNumber);
  run->add_option("--report", o.report_path, "also write the JSON report here");

  auto* eval = app.add_subcommand("eval", "benchmarks");
  eval->require_subcommand(1);
  auto* krb = eval->add_subcommand("krb", "keyword-scored element understanding benchmark");
  krb->add_option("--dataset", o.dataset, "krb.jsonl")->required()->check(CLI::ExistingFile);
  krb->add_option("--store", o.store_path, "retrieve similar-element knowledge from this store");
  krb->add_flag("--ranked", o.ranked, "rank retrieved knowledge before prompting");
  krb->add_option("--report", o.report_path, "write the JSON report here");

  auto* store = app.add_subcommand("store", "inspect a knowledge store");
  store->require_subcommand(1);
  auto* ls = store->add_subcommand("ls", "list entries");
  ls->add_option("--store", o.store_path, "knowledge store file");
  auto* show = store->add_subcommand("show", "print one entry");
  show->add_option("id", o.entry_id, "entry id")->required();
  show->add_option("--store", o.store_path, "knowledge store file");

  std::vector<std::string> argv_storage{"uiknow"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code == 0 ? 0 : 2;
  }

  try {
    if (*explore) return cmd_explore(o, out);
    if (*mine) return cmd_mine(o, out);
    if (*run) return cmd_run(o, out);
    if (*krb) return cmd_eval_krb(o, out);
    if (*ls) return cmd_store_ls(o, out);
    if (*show) return cmd_store_show(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, out, err);
}

}  // namespace uiknow::cli
