#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "prodgraph/prodgraph.hpp"

namespace prodgraph::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kToolVersion = "prodgraph 1.0.0";

// Index directory layout.
constexpr const char* kNeighborsFile = "neighbors.tsv";
constexpr const char* kConfigFile = "config.json";
constexpr const char* kTimingFile = "timing.tsv";
constexpr const char* kClustersFile = "clusters.tsv";
constexpr const char* kCategoriesFile = "categories.tsv";

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path.string());
  return out;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory: " + dir.string());
}

void write_config(const fs::path& dir, const std::string& command, const json& args, const json& params) {
  json cfg;
  cfg["tool"] = kToolVersion;
  cfg["command"] = command;
  cfg["args"] = args;
  cfg["params"] = params;
  auto out = open_output(dir / kConfigFile);
  out << cfg.dump(2) << '\n';
}

void report_parse(std::ostream& err, const std::string& path, const ParseReport& r) {
  err << path << ": " << r.accepted << " accepted, " << r.rejected << " rejected of " << r.total << " lines\n";
  for (const auto& why : r.reasons) err << "  " << why << '\n';
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

ShardPlan make_plan(std::size_t shards, std::size_t workers, const std::string& partitioner) {
  ShardPlan plan;
  plan.shard_count = shards;
  plan.worker_count = resolve_workers(workers);
  if (partitioner == "hash") {
    plan.partitioner = Partitioner::Hash;
  } else if (partitioner == "range") {
    plan.partitioner = Partitioner::Range;
  } else {
    throw ValidationError("unknown partitioner '" + partitioner + "'");
  }
  plan.validate();
  return plan;
}

ShardDumper make_dumper(const std::string& dir, const Dictionaries& dicts) {
  if (dir.empty()) return {};
  prepare_dir(dir);
  return [dir, &dicts](std::size_t shard, std::span<const EmitRecord> records) {
    std::ostringstream name;
    name << "shard-" << shard << ".tsv";
    auto out = open_output(fs::path(dir) / name.str());
    write_shard_records(out, records, dicts);
  };
}

struct PipelineFlags {
  std::size_t shards = 1;
  std::size_t workers = 1;
  std::string partitioner = "hash";
  std::string dump_shards;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--shards", shards, "Number of key shards")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", workers, "Worker threads (0 = all hardware threads)");
    cmd->add_option("--partitioner", partitioner, "Item partitioner: hash or range");
    cmd->add_option("--dump-shards", dump_shards, "Write shuffled shard records to this directory");
  }

  void record(json& args) const {
    args["shards"] = shards;
    args["workers"] = workers;
    args["partitioner"] = partitioner;
    if (!dump_shards.empty()) args["dump-shards"] = dump_shards;
  }
};

// ---------------------------------------------------------------- build-swing

struct BuildSwing {
  std::string clicks;
  std::string out_dir;
  double alpha = 1.0;
  std::size_t top_k = 100;
  bool user_weighting = true;
  std::size_t max_user_degree = 0;
  std::string pair_mode = "unordered";
  bool strict = false;
  PipelineFlags pipeline;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("build-swing", "Build the substitute index from a click log");
    cmd->add_option("--clicks", clicks, "Behavior log (click events are used)")->required();
    cmd->add_option("--out", out_dir, "Output index directory")->required();
    cmd->add_option("--alpha", alpha, "Smoothing coefficient");
    cmd->add_option("--top-k", top_k, "Neighbors kept per seed")->check(CLI::PositiveNumber);
    cmd->add_option("--user-weighting", user_weighting, "Down-weight active users by 1/sqrt(|I_u|)");
    cmd->add_option("--max-user-degree", max_user_degree, "Drop users with more clicks than this (0 = off)");
    cmd->add_option("--pair-mode", pair_mode, "unordered (default) or ordered user pairs");
    cmd->add_flag("--strict", strict, "Fail on the first malformed log line");
    pipeline.add_to(cmd);
    cmd->callback([this] { selected = true; });
  }

  int run(std::ostream& /*out*/, std::ostream& err) const {
    SwingParams params;
    params.alpha = alpha;
    params.top_k = top_k;
    params.user_weighting = user_weighting;
    if (max_user_degree > 0) params.max_user_degree = max_user_degree;
    if (pair_mode == "unordered") {
      params.pair_mode = PairMode::Unordered;
    } else if (pair_mode == "ordered") {
      params.pair_mode = PairMode::Ordered;
    } else {
      throw ValidationError("unknown pair mode '" + pair_mode + "'");
    }
    params.validate();
    auto plan = make_plan(pipeline.shards, pipeline.workers, pipeline.partitioner);

    Dictionaries dicts;
    auto log = parse_log(fs::path(clicks), dicts, ParseOptions{strict});
    report_parse(err, clicks, log.report);
    auto graph = BipartiteGraph::from_events(log.events, Action::Click);
    auto result = run_pipeline(graph, SwingScorer(params), plan, make_dumper(pipeline.dump_shards, dicts));

    prepare_dir(out_dir);
    {
      auto f = open_output(fs::path(out_dir) / kNeighborsFile);
      write_neighbors(f, result.lists, dicts.items);
    }
    {
      auto f = open_output(fs::path(out_dir) / kTimingFile);
      write_timing(f, result.shards, result.map_ms);
    }
    json args;
    args["clicks"] = clicks;
    args["out"] = out_dir;
    args["alpha"] = alpha;
    args["top-k"] = top_k;
    args["user-weighting"] = user_weighting;
    args["max-user-degree"] = max_user_degree;
    args["pair-mode"] = pair_mode;
    if (strict) args["strict"] = true;
    pipeline.record(args);
    json p;
    p["alpha"] = params.alpha;
    p["user_weighting"] = params.user_weighting;
    p["top_k"] = params.top_k;
    p["max_user_degree"] = params.max_user_degree ? json(*params.max_user_degree) : json(nullptr);
    p["pair_mode"] = pair_mode;
    p["shard_count"] = plan.shard_count;
    p["worker_count"] = plan.worker_count;
    p["partitioner"] = pipeline.partitioner;
    p["items"] = graph.items().size();
    p["users"] = graph.users().size();
    p["edges"] = graph.edge_count();
    write_config(out_dir, "build-swing", args, p);
    err << "wrote " << result.lists.size() << " seed lists to " << out_dir << '\n';
    return kExitOk;
  }

  bool selected = false;
};

// ------------------------------------------------------------- build-baseline

struct BuildBaseline {
  std::string clicks;
  std::string ratings;
  std::string measure = "cosine";
  std::string out_dir;
  std::size_t top_k = 100;
  bool strict = false;
  PipelineFlags pipeline;
  bool selected = false;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("build-baseline", "Build a neighborhood-baseline index");
    cmd->add_option("--clicks", clicks, "Behavior log (click events are used)");
    cmd->add_option("--ratings", ratings, "Explicit ratings user<TAB>item<TAB>rating (pearson)");
    cmd->add_option("--measure", measure, "cosine | jaccard | pearson | weighted-cf");
    cmd->add_option("--out", out_dir, "Output index directory")->required();
    cmd->add_option("--top-k", top_k, "Neighbors kept per seed")->check(CLI::PositiveNumber);
    cmd->add_flag("--strict", strict, "Fail on the first malformed log line");
    pipeline.add_to(cmd);
    cmd->callback([this] { selected = true; });
  }

  int run(std::ostream& /*out*/, std::ostream& err) const {
    auto m = parse_measure(measure);
    if (!m) throw ValidationError("unknown measure '" + measure + "'");
    auto plan = make_plan(pipeline.shards, pipeline.workers, pipeline.partitioner);

    Dictionaries dicts;
    RatingsView view;
    BipartiteGraph graph;
    if (*m == Measure::Pearson) {
      if (ratings.empty()) throw ValidationError("--measure pearson needs --ratings");
      auto triples = parse_ratings(fs::path(ratings), dicts);
      view = RatingsView(triples);
      if (view.as_events().empty()) throw ValidationError("no ratings in " + ratings);
      graph = BipartiteGraph::from_events(view.as_events(), Action::Click);
    } else {
      if (clicks.empty()) throw ValidationError("--measure " + measure + " needs --clicks");
      auto log = parse_log(fs::path(clicks), dicts, ParseOptions{strict});
      report_parse(err, clicks, log.report);
      graph = BipartiteGraph::from_events(log.events, Action::Click);
    }
    BaselineScorer scorer(*m, graph, top_k, *m == Measure::Pearson ? &view : nullptr);
    auto result = run_pipeline(graph, scorer, plan, make_dumper(pipeline.dump_shards, dicts));

    prepare_dir(out_dir);
    {
      auto f = open_output(fs::path(out_dir) / kNeighborsFile);
      write_neighbors(f, result.lists, dicts.items);
    }
    {
      auto f = open_output(fs::path(out_dir) / kTimingFile);
      write_timing(f, result.shards, result.map_ms);
    }
    json args;
    if (!clicks.empty()) args["clicks"] = clicks;
    if (!ratings.empty()) args["ratings"] = ratings;
    args["measure"] = measure;
    args["out"] = out_dir;
    args["top-k"] = top_k;
    if (strict) args["strict"] = true;
    pipeline.record(args);
    json p;
    p["measure"] = measure;
    p["top_k"] = top_k;
    p["shard_count"] = plan.shard_count;
    p["worker_count"] = plan.worker_count;
    p["items"] = graph.items().size();
    p["users"] = graph.users().size();
    p["edges"] = graph.edge_count();
    write_config(out_dir, "build-baseline", args, p);
    err << "wrote " << result.lists.size() << " seed lists to " << out_dir << '\n';
    return kExitOk;
  }
};

// -------------------------------------------------------------------- cluster

struct Cluster {
  std::string swing_index;
  std::string out_dir;
  double beta = 0.25;
  std::size_t iterations = 10;
  std::uint64_t rng_seed = 0;
  std::size_t top_n = 0;
  bool stop_when_stable = false;
  bool selected = false;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("cluster", "Cluster items by label propagation over a swing index");
    cmd->add_option("--swing-index", swing_index, "Swing index directory")->required();
    cmd->add_option("--out", out_dir, "Output directory")->required();
    cmd->add_option("--beta", beta, "Damping: a visit updates only when random() > beta");
    cmd->add_option("--iterations", iterations, "Propagation sweeps")->check(CLI::PositiveNumber);
    cmd->add_option("--rng-seed", rng_seed, "Seed for the update gate");
    cmd->add_option("--top-n", top_n, "Neighbors per seed turned into edges (0 = all)");
    cmd->add_flag("--stop-when-stable", stop_when_stable, "Stop after a sweep that changes no label");
    cmd->callback([this] { selected = true; });
  }

  int run(std::ostream& /*out*/, std::ostream& err) const {
    LpParams params;
    params.beta = beta;
    params.iterations = iterations;
    params.rng_seed = rng_seed;
    params.stop_when_stable = stop_when_stable;
    params.validate();

    IdDictionary<ItemId> items;
    auto index = read_neighbors(fs::path(swing_index) / kNeighborsFile, items);
    auto digraph = SimilarityDigraph::from_index(index, top_n == 0 ? kUnbounded : top_n);
    if (digraph.empty()) throw ValidationError("swing index " + swing_index + " has no entries");
    auto clusters = propagate(digraph, params);

    prepare_dir(out_dir);
    {
      auto f = open_output(fs::path(out_dir) / kClustersFile);
      write_clusters(f, clusters, items);
    }
    json args;
    args["swing-index"] = swing_index;
    args["out"] = out_dir;
    args["beta"] = beta;
    args["iterations"] = iterations;
    args["rng-seed"] = rng_seed;
    args["top-n"] = top_n;
    if (stop_when_stable) args["stop-when-stable"] = true;
    json p;
    p["beta"] = params.beta;
    p["iterations"] = params.iterations;
    p["rng_seed"] = params.rng_seed;
    p["rng"] = "mt19937_64, draw = (x >> 11) * 2^-53, one draw per node visit";
    p["top_n"] = top_n == 0 ? json(nullptr) : json(top_n);
    p["nodes"] = digraph.size();
    p["edges"] = digraph.edge_count();
    p["clusters"] = clusters.cluster_count();
    write_config(out_dir, "cluster", args, p);
    err << "wrote " << clusters.size() << " items in " << clusters.cluster_count() << " clusters to " << out_dir
        << '\n';
    return kExitOk;
  }
};

// ------------------------------------------------------------- build-surprise

struct BuildSurprise {
  std::string purchases;
  std::string catalog;
  std::string clusters_dir;
  std::string out_dir;
  double omega = 0.8;
  std::size_t gamma = 1;
  std::size_t top_k = 100;
  double time_unit = 86400.0;
  std::string normalization = "product";
  bool strict = false;
  PipelineFlags pipeline;
  bool selected = false;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("build-surprise", "Build the complementary index from purchases");
    cmd->add_option("--purchases", purchases, "Behavior log (purchase events are used)")->required();
    cmd->add_option("--catalog", catalog, "item<TAB>category map");
    cmd->add_option("--clusters", clusters_dir, "Cluster directory from 'cluster' (omit for omega = 1)");
    cmd->add_option("--out", out_dir, "Output index directory")->required();
    cmd->add_option("--omega", omega, "Blend weight of item-level relevance");
    cmd->add_option("--gamma", gamma, "Item-level candidates need more than gamma co-purchasers");
    cmd->add_option("--top-k", top_k, "Neighbors kept per seed")->check(CLI::PositiveNumber);
    cmd->add_option("--time-unit", time_unit, "Seconds per time-decay unit");
    cmd->add_option("--normalization", normalization, "product (|U_i||U_j|) or sqrt");
    cmd->add_flag("--strict", strict, "Fail on the first malformed log line");
    pipeline.add_to(cmd);
    cmd->callback([this] { selected = true; });
  }

  int run(std::ostream& /*out*/, std::ostream& err) const {
    SurpriseParams params;
    params.omega = clusters_dir.empty() ? 1.0 : omega;
    params.gamma = gamma;
    params.top_k = top_k;
    params.time_unit = time_unit;
    if (normalization == "product") {
      params.normalization = Normalization::Product;
    } else if (normalization == "sqrt") {
      params.normalization = Normalization::SqrtProduct;
    } else {
      throw ValidationError("unknown normalization '" + normalization + "'");
    }
    params.validate();
    if (!(omega >= 0.0 && omega <= 1.0)) throw ValidationError("omega must lie in [0, 1]");
    auto plan = make_plan(pipeline.shards, pipeline.workers, pipeline.partitioner);

    Dictionaries dicts;
    Catalog cat;
    if (!catalog.empty()) cat = parse_catalog(fs::path(catalog), dicts);
    auto log = parse_log(fs::path(purchases), dicts, ParseOptions{strict});
    report_parse(err, purchases, log.report);
    merge_categories(cat, log.categories, dicts);
    std::vector<BehaviorEvent> bought;
    for (const auto& e : log.events) {
      if (e.action == Action::Purchase) bought.push_back(e);
    }
    cat.count_purchases(bought);

    std::optional<ClusterAssignment> clusters;
    if (!clusters_dir.empty()) clusters = read_clusters(fs::path(clusters_dir) / kClustersFile, dicts.items);

    auto graph = BipartiteGraph::from_events(bought, Action::Purchase);
    CategoryRelevance relevance(graph, cat);
    SurpriseScorer scorer(graph, cat, relevance, clusters ? &*clusters : nullptr, params);
    auto result = run_pipeline(graph, scorer, plan, make_dumper(pipeline.dump_shards, dicts));

    prepare_dir(out_dir);
    {
      auto f = open_output(fs::path(out_dir) / kNeighborsFile);
      write_surprise(f, result.lists, dicts.items);
    }
    {
      auto f = open_output(fs::path(out_dir) / kCategoriesFile);
      write_category_report(f, relevance, dicts.categories);
    }
    {
      auto f = open_output(fs::path(out_dir) / kTimingFile);
      write_timing(f, result.shards, result.map_ms);
    }
    json args;
    args["purchases"] = purchases;
    if (!catalog.empty()) args["catalog"] = catalog;
    if (!clusters_dir.empty()) args["clusters"] = clusters_dir;
    args["out"] = out_dir;
    args["omega"] = omega;
    args["gamma"] = gamma;
    args["top-k"] = top_k;
    args["time-unit"] = time_unit;
    args["normalization"] = normalization;
    if (strict) args["strict"] = true;
    pipeline.record(args);
    json p;
    p["omega"] = params.omega;
    p["omega_forced_without_clusters"] = clusters_dir.empty();
    p["gamma"] = params.gamma;
    p["time_unit_seconds"] = params.time_unit;
    p["top_k"] = params.top_k;
    p["normalization"] = normalization;
    p["shard_count"] = plan.shard_count;
    p["worker_count"] = plan.worker_count;
    p["items"] = graph.items().size();
    p["users"] = graph.users().size();
    p["edges"] = graph.edge_count();
    p["categories"] = relevance.category_count();
    write_config(out_dir, "build-surprise", args, p);
    err << "wrote " << result.lists.size() << " seed lists to " << out_dir << '\n';
    return kExitOk;
  }
};

// ------------------------------------------------------------------- evaluate

struct Evaluate {
  std::string index_dir;
  std::string events;
  Timestamp split = 0;
  std::size_t k = 0;
  std::uint64_t rng_seed = 0;
  std::string seed_mode = "first";
  std::string action = "any";
  std::string report;
  std::string plot_data;
  bool selected = false;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("evaluate", "Hit-based offline evaluation of an index");
    cmd->add_option("--index", index_dir, "Index directory")->required();
    cmd->add_option("--events", events, "Behavior log holding the test period")->required();
    cmd->add_option("--split", split, "Train/test boundary; test events are strictly after it")->required();
    cmd->add_option("--k", k, "Prediction cutoff")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--rng-seed", rng_seed, "Seed for random seed selection");
    cmd->add_option("--seed-mode", seed_mode, "first (default) or random");
    cmd->add_option("--action", action, "any | click | purchase");
    cmd->add_option("--report", report, "Write the metric report TSV here");
    cmd->add_option("--emit-plot-data", plot_data, "Write per-day metric TSV here");
    cmd->callback([this] { selected = true; });
  }

  int run(std::ostream& out, std::ostream& err) const {
    EvalOptions opts;
    opts.split = split;
    opts.k = k;
    opts.rng_seed = rng_seed;
    if (seed_mode == "first") {
      opts.selection = SeedSelection::First;
    } else if (seed_mode == "random") {
      opts.selection = SeedSelection::Random;
    } else {
      throw ValidationError("unknown seed mode '" + seed_mode + "'");
    }
    if (action == "click") {
      opts.action = Action::Click;
    } else if (action == "purchase") {
      opts.action = Action::Purchase;
    } else if (action != "any") {
      throw ValidationError("unknown action filter '" + action + "'");
    }

    Dictionaries dicts;
    auto index = read_neighbors(fs::path(index_dir) / kNeighborsFile, dicts.items);
    auto log = parse_log(fs::path(events), dicts);
    report_parse(err, events, log.report);
    auto cases = build_cases(log.events, index, opts);
    if (cases.empty()) throw ValidationError("no user has two or more distinct test events after the split");
    auto metrics = score(cases);
    std::size_t hits = 0;
    for (const auto& c : cases) hits += case_metrics(c).hits;

    out << "cases        " << metrics.case_count << '\n'
        << "hits         " << hits << '\n'
        << "precision@" << k << "  " << format_score(metrics.precision) << '\n'
        << "recall@" << k << "     " << format_score(metrics.recall) << '\n'
        << "map_literal  " << format_score(metrics.map_literal) << '\n'
        << "ap_standard  " << format_score(metrics.ap_standard) << '\n';

    if (!report.empty()) {
      auto f = open_output(report);
      f << "metric\tvalue\n"
        << "cases\t" << metrics.case_count << '\n'
        << "hits\t" << hits << '\n'
        << "precision\t" << format_score(metrics.precision) << '\n'
        << "recall\t" << format_score(metrics.recall) << '\n'
        << "map_literal\t" << format_score(metrics.map_literal) << '\n'
        << "ap_standard\t" << format_score(metrics.ap_standard) << '\n';
    }
    if (!plot_data.empty()) {
      auto f = open_output(plot_data);
      f << "day\tcases\tprecision\trecall\tmap_literal\tap_standard\n";
      for (const auto& d : score_by_day(cases)) {
        f << d.day << '\t' << d.metrics.case_count << '\t' << format_score(d.metrics.precision) << '\t'
          << format_score(d.metrics.recall) << '\t' << format_score(d.metrics.map_literal) << '\t'
          << format_score(d.metrics.ap_standard) << '\n';
      }
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------------- query

struct Query {
  std::string index_dir;
  std::string item;
  std::size_t k = 10;
  bool selected = false;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("query", "Print the ranked neighbors of one item");
    cmd->add_option("--index", index_dir, "Index directory")->required();
    cmd->add_option("--item", item, "Seed item id")->required();
    cmd->add_option("--k", k, "Rows to print")->check(CLI::PositiveNumber);
    cmd->callback([this] { selected = true; });
  }

  int run(std::ostream& out, std::ostream& /*err*/) const {
    const auto path = fs::path(index_dir) / kNeighborsFile;
    auto in = detail::open_input(path);
    std::string raw;
    std::size_t printed = 0;
    bool found = false;
    while (std::getline(in, raw)) {
      auto line = detail::chomp(raw);
      auto tab = line.find('\t');
      if (line.substr(0, tab) != item) {
        if (found) break;  // rows of one seed are contiguous
        continue;
      }
      found = true;
      if (printed < k) {
        out << line << '\n';
        ++printed;
      }
    }
    if (!found) throw ValidationError("item '" + item + "' is not a seed in " + path.string());
    return kExitOk;
  }
};

// --------------------------------------------------------------------- replay

struct Replay {
  std::string config;
  std::string out_override;
  bool selected = false;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("replay", "Re-run a command from its recorded config.json");
    cmd->add_option("--config", config, "config.json written by a previous run")->required();
    cmd->add_option("--out", out_override, "Write to this directory instead of the recorded one");
    cmd->callback([this] { selected = true; });
  }

  std::vector<std::string> argv() const {
    auto in = detail::open_input(config);
    json cfg;
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw ValidationError(config + ": " + e.what());
    }
    if (!cfg.contains("command") || !cfg.contains("args")) {
      throw ValidationError(config + ": missing 'command' or 'args'");
    }
    std::vector<std::string> args{cfg["command"].get<std::string>()};
    for (const auto& [key, value] : cfg["args"].items()) {
      if (key == "out" && !out_override.empty()) continue;
      if (value.is_boolean()) {
        if (key == "strict" || key == "stop-when-stable") {
          if (value.get<bool>()) args.push_back("--" + key);
          continue;
        }
        args.push_back("--" + key);
        args.push_back(value.get<bool>() ? "true" : "false");
      } else if (value.is_string()) {
        args.push_back("--" + key);
        args.push_back(value.get<std::string>());
      } else {
        args.push_back("--" + key);
        args.push_back(value.dump());
      }
    }
    if (!out_override.empty()) {
      args.push_back("--out");
      args.push_back(out_override);
    }
    return args;
  }
};

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
  CLI::App app{"Product graph construction: substitute (swing) and complementary (surprise) indexes"};
  app.require_subcommand(1);
  BuildSwing build_swing;
  BuildBaseline build_baseline;
  Cluster cluster;
  BuildSurprise build_surprise;
  Evaluate evaluate;
  Query query;
  Replay replay;
  build_swing.add_to(app);
  build_baseline.add_to(app);
  cluster.add_to(app);
  build_surprise.add_to(app);
  evaluate.add_to(app);
  query.add_to(app);
  replay.add_to(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (build_swing.selected) return build_swing.run(out, err);
    if (build_baseline.selected) return build_baseline.run(out, err);
    if (cluster.selected) return cluster.run(out, err);
    if (build_surprise.selected) return build_surprise.run(out, err);
    if (evaluate.selected) return evaluate.run(out, err);
    if (query.selected) return query.run(out, err);
    if (replay.selected) {
      if (depth > 0) throw ValidationError("replay cannot replay itself");
      return dispatch(replay.argv(), out, err, depth + 1);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInconsistent;
  }
  err << "error: no command\n";
  return kExitInvalid;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return dispatch(args, out, err, 0);
}

}  // namespace prodgraph::cli
