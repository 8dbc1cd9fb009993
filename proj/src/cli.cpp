#include "kermit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "kermit/augment.hpp"
#include "kermit/checkpoint.hpp"
#include "kermit/config.hpp"
#include "kermit/describe.hpp"
#include "kermit/errors.hpp"
#include "kermit/eval.hpp"
#include "kermit/http_client.hpp"
#include "kermit/kg.hpp"
#include "kermit/prompt.hpp"
#include "kermit/synth.hpp"
#include "kermit/train.hpp"
#include "kermit/util.hpp"

namespace kermit {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

// Union of the keys a config file may set; anything else is a typo.
const char* const kKnownConfigKeys[] = {
    "dataset",       "registry",      "cache",
    "checkpoint",    "mode",          "split",
    "splits",        "out",           "seed",
    "epochs",        "batch_size",    "learning_rate",
    "weight_decay",  "beta1",         "beta2",
    "epsilon",       "d",             "max_len",
    "pooling",       "min_vocab_frequency", "checkpoint_every",
    "gamma",         "tau",           "margin_mode",
    "threads",       "ranks",         "stub",
    "max_in_flight", "timeout",       "requests_per_second",
    "retries",       "entities",     "relations",
    "source",        "relation",      "direction",
    "k",
};

Direction direction_from_string(const std::string& text) {
  if (text == "fwd") return Direction::forward;
  if (text == "bwd") return Direction::backward;
  throw ConfigError("unknown direction '" + text + "' (expected fwd or bwd)");
}

Split split_from_string(const std::string& text) {
  if (text == "train") return Split::train;
  if (text == "valid") return Split::valid;
  if (text == "test") return Split::test;
  throw ConfigError("unknown split '" + text +
                    "' (expected train, valid or test)");
}

// The config file is applied before flag parsing, so flags given on the
// command line overwrite whatever it set. The last --config wins.
std::optional<fs::path> scan_for_config(const std::vector<std::string>& args) {
  std::optional<fs::path> found;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      found = args[i + 1];
      ++i;
    } else if (args[i].rfind("--config=", 0) == 0) {
      found = args[i].substr(std::string("--config=").size());
    }
  }
  return found;
}

void check_config_keys(const ConfigMap& config) {
  for (const std::string& key : config.keys()) {
    const auto* begin = std::begin(kKnownConfigKeys);
    const auto* end = std::end(kKnownConfigKeys);
    if (std::find(begin, end, key) == end) {
      throw ConfigError(config.origin() + ": unknown configuration key '" +
                        key + "'");
    }
  }
}

// --- options ---------------------------------------------------------------

struct DatasetArgs {
  fs::path directory;
  fs::path registry;  // empty = the dataset's own relations.json
};

struct SynthOptions {
  std::uint64_t seed = 42;
  int entities = 50;
  int relations = 4;
  fs::path out = "runs/synth";
};

struct PrepareOptions {
  DatasetArgs data;
  std::uint64_t seed = 42;
  fs::path out = "runs/prepare";
};

struct DescribeOptions {
  DatasetArgs data;
  fs::path cache;
  std::string splits = "train,valid,test";
  bool stub = false;
  int max_in_flight = 4;
  double timeout = 30.0;
  double requests_per_second = 1.0;
  int retries = 2;
  std::uint64_t seed = 42;
  fs::path out = "runs/describe";
};

struct TrainOptions {
  DatasetArgs data;
  fs::path cache;
  std::string mode = "baseline";
  TrainConfig train;
  std::string pooling = "mean";
  LossConfig loss;
  std::string margin_mode = "positive_only";
  std::uint64_t seed = 42;
  fs::path out = "runs/train";
};

struct EvalOptions {
  DatasetArgs data;
  fs::path cache;
  fs::path checkpoint;
  std::string split = "test";
  int threads = 1;
  bool ranks = false;
  std::uint64_t seed = 42;
  fs::path out = "runs/eval";
};

struct PredictOptions {
  DatasetArgs data;
  fs::path cache;
  fs::path checkpoint;
  std::string source;
  std::string relation;
  std::string direction = "fwd";
  int k = 10;
  std::uint64_t seed = 42;
  fs::path out = "runs/predict";
};

void apply_dataset(const ConfigMap& config, DatasetArgs& args) {
  config.read("dataset", args.directory);
  config.read("registry", args.registry);
}

void apply(const ConfigMap& config, SynthOptions& opts) {
  config.read("seed", opts.seed);
  config.read("entities", opts.entities);
  config.read("relations", opts.relations);
  config.read("out", opts.out);
}

void apply(const ConfigMap& config, PrepareOptions& opts) {
  apply_dataset(config, opts.data);
  config.read("seed", opts.seed);
  config.read("out", opts.out);
}

void apply(const ConfigMap& config, DescribeOptions& opts) {
  apply_dataset(config, opts.data);
  config.read("cache", opts.cache);
  config.read("splits", opts.splits);
  config.read("stub", opts.stub);
  config.read("max_in_flight", opts.max_in_flight);
  config.read("timeout", opts.timeout);
  config.read("requests_per_second", opts.requests_per_second);
  config.read("retries", opts.retries);
  config.read("seed", opts.seed);
  config.read("out", opts.out);
}

void apply(const ConfigMap& config, TrainOptions& opts) {
  apply_dataset(config, opts.data);
  config.read("cache", opts.cache);
  config.read("mode", opts.mode);
  config.read("epochs", opts.train.epochs);
  config.read("batch_size", opts.train.batch_size);
  config.read("learning_rate", opts.train.learning_rate);
  config.read("weight_decay", opts.train.weight_decay);
  config.read("beta1", opts.train.beta1);
  config.read("beta2", opts.train.beta2);
  config.read("epsilon", opts.train.epsilon);
  config.read("d", opts.train.d);
  config.read("max_len", opts.train.max_len);
  config.read("pooling", opts.pooling);
  config.read("min_vocab_frequency", opts.train.min_vocab_frequency);
  config.read("checkpoint_every", opts.train.checkpoint_every);
  config.read("gamma", opts.loss.gamma);
  config.read("tau", opts.loss.tau);
  config.read("margin_mode", opts.margin_mode);
  config.read("seed", opts.seed);
  config.read("out", opts.out);
}

void apply(const ConfigMap& config, EvalOptions& opts) {
  apply_dataset(config, opts.data);
  config.read("cache", opts.cache);
  config.read("checkpoint", opts.checkpoint);
  config.read("split", opts.split);
  config.read("threads", opts.threads);
  config.read("ranks", opts.ranks);
  config.read("seed", opts.seed);
  config.read("out", opts.out);
}

void apply(const ConfigMap& config, PredictOptions& opts) {
  apply_dataset(config, opts.data);
  config.read("cache", opts.cache);
  config.read("checkpoint", opts.checkpoint);
  config.read("source", opts.source);
  config.read("relation", opts.relation);
  config.read("direction", opts.direction);
  config.read("k", opts.k);
  config.read("seed", opts.seed);
  config.read("out", opts.out);
}

// --- metadata --------------------------------------------------------------

fs::path resolve_in(const fs::path& directory, const std::string& name) {
  const fs::path path(name);
  return path.is_absolute() ? path : directory / path;
}

ordered_json input_entry(const fs::path& path) {
  return ordered_json{{"path", path.string()}, {"digest", file_digest(path)}};
}

DatasetFormat format_for(const DatasetArgs& args) {
  DatasetFormat format;
  if (!args.registry.empty()) format.relations_file = args.registry.string();
  return format;
}

ordered_json dataset_inputs(const DatasetArgs& args) {
  const DatasetFormat format = format_for(args);
  ordered_json inputs;
  inputs["entities"] = input_entry(resolve_in(args.directory, format.entities_file));
  inputs["relations"] =
      input_entry(resolve_in(args.directory, format.relations_file));
  inputs["train"] = input_entry(resolve_in(args.directory, format.train_file));
  inputs["valid"] = input_entry(resolve_in(args.directory, format.valid_file));
  inputs["test"] = input_entry(resolve_in(args.directory, format.test_file));
  return inputs;
}

void write_run_metadata(const fs::path& out_dir, const std::string& command,
                        const ordered_json& config_echo, std::uint64_t seed,
                        const ordered_json& inputs,
                        const ordered_json& extra) {
  ordered_json doc;
  doc["command"] = command;
  doc["config"] = config_echo;
  doc["seed"] = seed;
  doc["inputs"] = inputs;
  for (const auto& [key, value] : extra.items()) doc[key] = value;
  fs::create_directories(out_dir);
  write_text_file(out_dir / "run.json", doc.dump(2) + "\n");
}

KnowledgeGraph load_graph(const DatasetArgs& args) {
  if (args.directory.empty()) {
    throw ConfigError("no dataset directory given (--dataset or 'dataset')");
  }
  return load_dataset(args.directory, format_for(args));
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

// --- subcommands -----------------------------------------------------------

int cmd_synth(const SynthOptions& opts) {
  const SynthSummary summary =
      generate_synthetic_kg(opts.seed, opts.entities, opts.relations, opts.out);
  ordered_json echo{{"entities", opts.entities},
                    {"relations", opts.relations},
                    {"out", opts.out.string()}};
  ordered_json outputs;
  for (const char* name :
       {"entities.tsv", "relations.json", "train.txt", "valid.txt",
        "test.txt"}) {
    outputs[name] = input_entry(opts.out / name);
  }
  ordered_json extra;
  extra["summary"] = ordered_json{{"concepts", summary.n_concepts},
                                  {"items", summary.n_items},
                                  {"train", summary.n_train},
                                  {"valid", summary.n_valid},
                                  {"test", summary.n_test}};
  extra["outputs"] = outputs;
  write_run_metadata(opts.out, "synth", echo, opts.seed, ordered_json::object(),
                     extra);
  std::cout << "synth: wrote " << opts.out.string() << " ("
            << summary.n_concepts << " concepts, " << summary.n_items
            << " items; triples " << summary.n_train << "/" << summary.n_valid
            << "/" << summary.n_test << " train/valid/test)\n";
  return 0;
}

void write_query_manifest(const fs::path& path,
                          const std::vector<Query>& queries,
                          const KnowledgeGraph& graph) {
  std::string text;
  for (const Query& query : queries) {
    text += graph.entity(query.source).raw_key;
    text += '\t';
    text += graph.relation(query.relation).raw_key;
    text += '\t';
    text += to_string(query.direction);
    text += '\t';
    text += graph.entity(query.answer).raw_key;
    text += '\n';
  }
  write_text_file(path, text);
}

int cmd_prepare(const PrepareOptions& opts) {
  const KnowledgeGraph graph = load_graph(opts.data);
  fs::create_directories(opts.out);
  ordered_json query_counts;
  ordered_json triple_counts;
  for (const Split split : {Split::train, Split::valid, Split::test}) {
    const std::vector<Query> queries =
        symmetrize(graph, graph.registry(), split);
    write_query_manifest(
        opts.out / (std::string("queries_") + to_string(split) + ".tsv"),
        queries, graph);
    triple_counts[to_string(split)] = graph.triples(split).size();
    query_counts[to_string(split)] = queries.size();
  }
  ordered_json echo{{"dataset", opts.data.directory.string()},
                    {"registry", opts.data.registry.string()},
                    {"out", opts.out.string()}};
  ordered_json extra;
  extra["entities"] = graph.entities().size();
  extra["relations"] = graph.relations().size();
  extra["triple_relations"] = graph.n_triple_relations();
  extra["triples"] = triple_counts;
  extra["queries"] = query_counts;
  extra["warnings"] = graph.load_warnings();
  write_run_metadata(opts.out, "prepare", echo, opts.seed,
                     dataset_inputs(opts.data), extra);
  std::cout << "prepare: " << graph.entities().size() << " entities, "
            << graph.relations().size() << " relations ("
            << graph.n_triple_relations() << " in triples); queries "
            << query_counts["train"].get<std::size_t>() << "/"
            << query_counts["valid"].get<std::size_t>() << "/"
            << query_counts["test"].get<std::size_t>()
            << " train/valid/test\n";
  return 0;
}

int cmd_describe(const DescribeOptions& opts) {
  if (opts.cache.empty()) {
    throw ConfigError("no cache file given (--cache or 'cache')");
  }
  const KnowledgeGraph graph = load_graph(opts.data);

  std::vector<Query> queries;
  std::vector<std::string> split_names;
  for (const std::string& field : split_char(opts.splits, ',')) {
    if (!field.empty()) split_names.push_back(field);
  }
  if (split_names.empty()) {
    throw ConfigError("no splits selected ('" + opts.splits + "')");
  }
  for (const std::string& name : split_names) {
    const std::vector<Query> part =
        symmetrize(graph, graph.registry(), split_from_string(name));
    queries.insert(queries.end(), part.begin(), part.end());
  }

  if (!opts.cache.parent_path().empty()) {
    fs::create_directories(opts.cache.parent_path());
  }
  DescriptionCache cache = DescriptionCache::open(opts.cache);

  StubClient stub_client(graph);
  std::unique_ptr<HttpChatClient> http_client;
  GenerationClient* client = &stub_client;
  if (!opts.stub) {
    ServiceConfig service = service_config_from_env();
    service.timeout_seconds = opts.timeout;
    service.retries = opts.retries;
    service.requests_per_second = opts.requests_per_second;
    service.max_in_flight = opts.max_in_flight;
    http_client = std::make_unique<HttpChatClient>(std::move(service));
    client = http_client.get();
  }

  const DescribeReport report =
      run_describe_stage(*client, cache, default_prompt_template(), queries,
                         graph, opts.max_in_flight);

  ordered_json echo{{"dataset", opts.data.directory.string()},
                    {"registry", opts.data.registry.string()},
                    {"cache", opts.cache.string()},
                    {"splits", opts.splits},
                    {"stub", opts.stub},
                    {"max_in_flight", opts.max_in_flight},
                    {"timeout", opts.timeout},
                    {"requests_per_second", opts.requests_per_second},
                    {"retries", opts.retries},
                    {"out", opts.out.string()}};
  ordered_json extra;
  extra["n_queries"] = queries.size();
  extra["cached"] = report.cached;
  extra["generated"] = report.fresh;
  extra["cache_file"] = input_entry(opts.cache);
  write_run_metadata(opts.out, "describe", echo, opts.seed,
                     dataset_inputs(opts.data), extra);
  std::cout << "describe: " << queries.size() << " queries, " << report.cached
            << " cached, " << report.fresh << " generated -> "
            << opts.cache.string() << "\n";
  return 0;
}

int cmd_train(const TrainOptions& opts) {
  const KnowledgeGraph graph = load_graph(opts.data);
  const SequenceMode mode = sequence_mode_from_string(opts.mode);
  const std::vector<Query> queries =
      symmetrize(graph, graph.registry(), Split::train);

  std::optional<DescriptionCache> cache;
  if (mode != SequenceMode::baseline) {
    if (opts.cache.empty()) {
      throw ConfigError(std::string("mode '") + to_string(mode) +
                        "' needs a description cache (--cache or 'cache')");
    }
    cache = DescriptionCache::open(opts.cache);
  }

  TrainConfig train_config = opts.train;
  train_config.seed = opts.seed;
  train_config.pooling = pooling_from_string(opts.pooling);
  train_config.checkpoint_dir = opts.out / "checkpoints";
  LossConfig loss_config = opts.loss;
  loss_config.margin_mode = margin_mode_from_string(opts.margin_mode);

  const TrainResult result =
      fit(graph, queries, cache ? &*cache : nullptr, train_config, loss_config,
          mode);

  ordered_json echo{{"dataset", opts.data.directory.string()},
                    {"registry", opts.data.registry.string()},
                    {"cache", opts.cache.string()},
                    {"mode", opts.mode},
                    {"epochs", train_config.epochs},
                    {"batch_size", train_config.batch_size},
                    {"learning_rate", train_config.learning_rate},
                    {"weight_decay", train_config.weight_decay},
                    {"beta1", train_config.beta1},
                    {"beta2", train_config.beta2},
                    {"epsilon", train_config.epsilon},
                    {"d", train_config.d},
                    {"max_len", train_config.max_len},
                    {"pooling", opts.pooling},
                    {"min_vocab_frequency", train_config.min_vocab_frequency},
                    {"checkpoint_every", train_config.checkpoint_every},
                    {"gamma", loss_config.gamma},
                    {"tau", loss_config.tau},
                    {"margin_mode", opts.margin_mode},
                    {"out", opts.out.string()}};
  ordered_json inputs = dataset_inputs(opts.data);
  if (!opts.cache.empty()) inputs["cache"] = input_entry(opts.cache);
  ordered_json extra;
  extra["n_queries"] = queries.size();
  extra["epoch_loss"] = result.epoch_loss;
  extra["steps"] = result.steps;
  extra["wall_seconds"] = result.wall_seconds;
  extra["checkpoint"] = input_entry(result.final_checkpoint);
  write_run_metadata(opts.out, "train", echo, opts.seed, inputs, extra);
  std::cout << "train: " << train_config.epochs << " epochs, " << result.steps
            << " steps, loss " << format_double(result.epoch_loss.front())
            << " -> " << format_double(result.epoch_loss.back())
            << ", checkpoint " << result.final_checkpoint.string() << "\n";
  return 0;
}

int cmd_eval(const EvalOptions& opts) {
  if (opts.checkpoint.empty()) {
    throw ConfigError("no checkpoint given (--checkpoint or 'checkpoint')");
  }
  const KnowledgeGraph graph = load_graph(opts.data);
  const Checkpoint checkpoint = load_checkpoint(opts.checkpoint);
  const Split split = split_from_string(opts.split);

  std::optional<DescriptionCache> cache;
  if (checkpoint.mode != SequenceMode::baseline) {
    if (opts.cache.empty()) {
      throw ConfigError(std::string("mode '") + to_string(checkpoint.mode) +
                        "' needs a description cache (--cache or 'cache')");
    }
    cache = DescriptionCache::open(opts.cache);
  }

  const FilterIndex filter = build_filter_index(graph);
  EvalConfig eval_config;
  eval_config.threads = opts.threads;
  eval_config.collect_ranks = opts.ranks;
  const EvalReport report = evaluate_split(
      graph, filter, checkpoint, split, cache ? &*cache : nullptr, eval_config);

  fs::create_directories(opts.out);
  ordered_json metrics{{"split", opts.split},
                       {"mode", to_string(checkpoint.mode)},
                       {"mrr", report.overall.mrr},
                       {"hit1", report.overall.hit1},
                       {"hit3", report.overall.hit3},
                       {"hit10", report.overall.hit10},
                       {"n_queries", report.overall.n_queries},
                       {"checkpoint_id", checkpoint_digest(opts.checkpoint)}};
  const fs::path metrics_path = opts.out / "metrics.json";
  write_text_file(metrics_path, metrics.dump(2) + "\n");

  if (opts.ranks) {
    std::string text;
    for (std::size_t i = 0; i < report.ranks.size(); ++i) {
      const Query& query = report.queries[i];
      text += graph.entity(query.source).raw_key;
      text += ' ';
      text += graph.relation(query.relation).raw_key;
      text += ' ';
      text += to_string(query.direction);
      text += '\t';
      text += std::to_string(report.ranks[i]);
      text += '\n';
    }
    write_text_file(opts.out / "ranks.tsv", text);
  }

  ordered_json echo{{"dataset", opts.data.directory.string()},
                    {"registry", opts.data.registry.string()},
                    {"cache", opts.cache.string()},
                    {"checkpoint", opts.checkpoint.string()},
                    {"split", opts.split},
                    {"threads", opts.threads},
                    {"ranks", opts.ranks},
                    {"out", opts.out.string()}};
  ordered_json inputs = dataset_inputs(opts.data);
  inputs["checkpoint"] = input_entry(opts.checkpoint);
  if (!opts.cache.empty()) inputs["cache"] = input_entry(opts.cache);
  ordered_json extra;
  extra["metrics"] = metrics;
  extra["metrics_file"] = metrics_path.string();
  write_run_metadata(opts.out, "eval", echo, opts.seed, inputs, extra);
  std::cout << "eval " << opts.split << " (" << to_string(checkpoint.mode)
            << "): MRR " << format_double(report.overall.mrr) << " Hit@1 "
            << format_double(report.overall.hit1) << " Hit@3 "
            << format_double(report.overall.hit3) << " Hit@10 "
            << format_double(report.overall.hit10) << " over "
            << report.overall.n_queries << " queries\n";
  return 0;
}

int cmd_predict(const PredictOptions& opts) {
  if (opts.checkpoint.empty()) {
    throw ConfigError("no checkpoint given (--checkpoint or 'checkpoint')");
  }
  if (opts.source.empty() || opts.relation.empty()) {
    throw ConfigError("predict needs --source and --relation keys");
  }
  const KnowledgeGraph graph = load_graph(opts.data);
  const Checkpoint checkpoint = load_checkpoint(opts.checkpoint);
  const Direction direction = direction_from_string(opts.direction);
  const EntityId source = graph.entity_id(opts.source);
  const RelationId relation = graph.relation_id(opts.relation);

  std::optional<DescriptionCache> cache;
  if (checkpoint.mode != SequenceMode::baseline) {
    if (opts.cache.empty()) {
      throw ConfigError(std::string("mode '") + to_string(checkpoint.mode) +
                        "' needs a description cache (--cache or 'cache')");
    }
    cache = DescriptionCache::open(opts.cache);
  }

  OpenQuery query{source,
                  direction == Direction::backward
                      ? graph.relation(relation).inverse_id
                      : relation,
                  direction};
  const FilterIndex filter = build_filter_index(graph);
  const std::vector<Prediction> predictions =
      predict_topk(graph, checkpoint, cache ? &*cache : nullptr, query, opts.k,
                   filter.known(source, relation, direction));

  std::string table;
  ordered_json listed = ordered_json::array();
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Entity& entity = graph.entity(predictions[i].entity);
    char score[32];
    std::snprintf(score, sizeof(score), "%.6f", predictions[i].score);
    table += std::to_string(i + 1);
    table += '\t';
    table += entity.raw_key;
    table += '\t';
    table += entity.name;
    table += '\t';
    table += score;
    table += '\n';
    listed.push_back(ordered_json{{"rank", i + 1},
                                  {"entity", entity.raw_key},
                                  {"name", entity.name},
                                  {"score", predictions[i].score}});
  }
  fs::create_directories(opts.out);
  write_text_file(opts.out / "predictions.tsv", table);

  ordered_json echo{{"dataset", opts.data.directory.string()},
                    {"registry", opts.data.registry.string()},
                    {"cache", opts.cache.string()},
                    {"checkpoint", opts.checkpoint.string()},
                    {"source", opts.source},
                    {"relation", opts.relation},
                    {"direction", opts.direction},
                    {"k", opts.k},
                    {"out", opts.out.string()}};
  ordered_json inputs = dataset_inputs(opts.data);
  inputs["checkpoint"] = input_entry(opts.checkpoint);
  if (!opts.cache.empty()) inputs["cache"] = input_entry(opts.cache);
  ordered_json extra;
  extra["predictions"] = listed;
  write_run_metadata(opts.out, "predict", echo, opts.seed, inputs, extra);
  std::cout << table;
  return 0;
}

// --- wiring ----------------------------------------------------------------

void add_common(CLI::App* sub, std::string& config_sink, std::uint64_t& seed,
                fs::path& out) {
  sub->add_option("--config", config_sink,
                  "Flat key=value config file; flags override its values");
  sub->add_option("--seed", seed, "Seed for all stage randomness");
  sub->add_option("--out", out, "Output directory for artifacts and run.json");
}

void add_dataset(CLI::App* sub, DatasetArgs& args) {
  sub->add_option("--dataset", args.directory,
                  "Dataset directory (train/valid/test + entities/relations)");
  sub->add_option("--registry", args.registry,
                  "Inverse-relation registry file overriding relations.json");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"KERMIT: knowledge-graph completion with predictive "
               "descriptions and curated inverse relations"};
  app.require_subcommand(1);
  std::string config_sink;  // value consumed by the pre-scan below
  app.add_option("--config", config_sink, "Flat key=value config file");

  SynthOptions synth_opts;
  PrepareOptions prepare_opts;
  DescribeOptions describe_opts;
  TrainOptions train_opts;
  EvalOptions eval_opts;
  PredictOptions predict_opts;

  // Config file first, flags second, so flags win.
  ConfigMap config;
  try {
    if (const auto config_path = scan_for_config(args)) {
      config = ConfigMap::parse_file(*config_path);
      check_config_keys(config);
    }
    apply(config, synth_opts);
    apply(config, prepare_opts);
    apply(config, describe_opts);
    apply(config, train_opts);
    apply(config, eval_opts);
    apply(config, predict_opts);
  } catch (const Error& error) {
    std::cerr << "kermit: error: " << error.what() << "\n";
    return 1;
  }

  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic benchmark dataset");
  add_common(synth_cmd, config_sink, synth_opts.seed, synth_opts.out);
  synth_cmd->add_option("--entities", synth_opts.entities,
                        "Total entity count (concepts + items)");
  synth_cmd->add_option("--relations", synth_opts.relations,
                        "Forward relation count (inverses are added)");

  CLI::App* prepare_cmd = app.add_subcommand(
      "prepare", "Load a dataset, validate the registry, write query manifests");
  add_common(prepare_cmd, config_sink, prepare_opts.seed, prepare_opts.out);
  add_dataset(prepare_cmd, prepare_opts.data);

  CLI::App* describe_cmd = app.add_subcommand(
      "describe", "Generate predictive descriptions into the cache");
  add_common(describe_cmd, config_sink, describe_opts.seed, describe_opts.out);
  add_dataset(describe_cmd, describe_opts.data);
  describe_cmd->add_option("--cache", describe_opts.cache,
                           "JSONL description cache to fill");
  describe_cmd->add_option("--splits", describe_opts.splits,
                           "Comma-separated splits to cover");
  describe_cmd->add_flag("--stub", describe_opts.stub,
                         "Use the offline stub client instead of the service");
  describe_cmd->add_option("--max-in-flight", describe_opts.max_in_flight,
                           "Concurrent generation requests");
  describe_cmd->add_option("--timeout", describe_opts.timeout,
                           "Per-request timeout in seconds");
  describe_cmd->add_option("--requests-per-second",
                           describe_opts.requests_per_second,
                           "Rate limit (0 = unlimited)");
  describe_cmd->add_option("--retries", describe_opts.retries,
                           "Retries per failed generation");

  CLI::App* train_cmd =
      app.add_subcommand("train", "Train the bi-encoder on the train split");
  add_common(train_cmd, config_sink, train_opts.seed, train_opts.out);
  add_dataset(train_cmd, train_opts.data);
  train_cmd->add_option("--cache", train_opts.cache,
                        "Description cache (required for full/pred_only)");
  train_cmd->add_option("--mode", train_opts.mode,
                        "Sequence mode: baseline, full or pred_only");
  train_cmd->add_option("--epochs", train_opts.train.epochs, "Training epochs");
  train_cmd->add_option("--batch-size", train_opts.train.batch_size,
                        "In-batch negative pool size");
  train_cmd->add_option("--learning-rate", train_opts.train.learning_rate,
                        "Initial learning rate (decays linearly)");
  train_cmd->add_option("--weight-decay", train_opts.train.weight_decay,
                        "Decoupled weight decay");
  train_cmd->add_option("--beta1", train_opts.train.beta1,
                        "First-moment decay");
  train_cmd->add_option("--beta2", train_opts.train.beta2,
                        "Second-moment decay");
  train_cmd->add_option("--epsilon", train_opts.train.epsilon,
                        "Adaptive-update damping");
  train_cmd->add_option("--d", train_opts.train.d, "Embedding width");
  train_cmd->add_option("--max-len", train_opts.train.max_len,
                        "Token sequence length");
  train_cmd->add_option("--pooling", train_opts.pooling,
                        "Sentence pooling: mean or cls");
  train_cmd->add_option("--min-vocab-frequency",
                        train_opts.train.min_vocab_frequency,
                        "Minimum token frequency kept in the vocabulary");
  train_cmd->add_option("--checkpoint-every", train_opts.train.checkpoint_every,
                        "Epochs between periodic checkpoints (0 = final only)");
  train_cmd->add_option("--gamma", train_opts.loss.gamma, "Additive margin");
  train_cmd->add_option("--tau", train_opts.loss.tau, "Softmax temperature");
  train_cmd->add_option("--margin-mode", train_opts.margin_mode,
                        "Margin placement: positive_only or literal");

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Rank a split and report MRR / Hit@k");
  add_common(eval_cmd, config_sink, eval_opts.seed, eval_opts.out);
  add_dataset(eval_cmd, eval_opts.data);
  eval_cmd->add_option("--cache", eval_opts.cache,
                       "Description cache (required for full/pred_only)");
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoint,
                       "Checkpoint to evaluate");
  eval_cmd->add_option("--split", eval_opts.split,
                       "Split to evaluate: train, valid or test");
  eval_cmd->add_option("--threads", eval_opts.threads,
                       "Ranking worker threads");
  eval_cmd->add_flag("--ranks", eval_opts.ranks,
                     "Also write per-query ranks.tsv");

  CLI::App* predict_cmd =
      app.add_subcommand("predict", "Top-k completions for one query");
  add_common(predict_cmd, config_sink, predict_opts.seed, predict_opts.out);
  add_dataset(predict_cmd, predict_opts.data);
  predict_cmd->add_option("--cache", predict_opts.cache,
                          "Description cache (required for full/pred_only)");
  predict_cmd->add_option("--checkpoint", predict_opts.checkpoint,
                          "Checkpoint to predict with");
  predict_cmd->add_option("--source", predict_opts.source,
                          "Source entity raw key");
  predict_cmd->add_option("--relation", predict_opts.relation,
                          "Relation raw key (as written in the dataset)");
  predict_cmd->add_option("--direction", predict_opts.direction,
                          "fwd = predict tails, bwd = predict heads");
  predict_cmd->add_option("--k", predict_opts.k, "Completions to list");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("kermit");
  for (const std::string& arg : args) argv_storage.push_back(arg);
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const std::string& arg : argv_storage) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& error) {
    std::cerr << "kermit: " << error.what() << "\n"
              << "run 'kermit --help' for usage\n";
    return 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth_opts);
    if (prepare_cmd->parsed()) return cmd_prepare(prepare_opts);
    if (describe_cmd->parsed()) return cmd_describe(describe_opts);
    if (train_cmd->parsed()) return cmd_train(train_opts);
    if (eval_cmd->parsed()) return cmd_eval(eval_opts);
    if (predict_cmd->parsed()) return cmd_predict(predict_opts);
  } catch (const std::exception& error) {
    std::cerr << "kermit: error: " << error.what() << "\n";
    return 1;
  }
  std::cerr << "kermit: no subcommand selected\n";
  return 2;
}

}  // namespace kermit
