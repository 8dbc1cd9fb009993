#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "kermit/cli.hpp"
#include "kermit/config.hpp"
#include "kermit/errors.hpp"
#include "kermit/kg.hpp"
#include "kermit/util.hpp"
#include "test_support.hpp"

using namespace kermit;
using kermit::test::TempDir;
using nlohmann::json;

namespace {

int cli(std::initializer_list<std::string> args) {
  return run_cli(std::vector<std::string>(args));
}

json read_json(const std::filesystem::path& path) {
  return json::parse(read_text_file(path));
}

std::size_t count_lines(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::size_t lines = 0;
  for (const char c : text) lines += c == '\n';
  return lines;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config files parse comments, trimming and repeats") {
  const ConfigMap config = ConfigMap::parse_text(
      "# full-line comment\n"
      "  dataset =  data/toy   # trailing comment\n"
      "epochs=20\n"
      "\n"
      "note = a=b=c\n"
      "epochs = 7\n",
      "test.cfg");
  CHECK(config.get_string("dataset") == "data/toy");
  CHECK(config.get_string("epochs") == "7");  // later assignment wins
  CHECK(config.get_string("note") == "a=b=c");  // value may contain '='
  CHECK(config.keys() ==
        std::vector<std::string>{"dataset", "epochs", "note"});
  CHECK(config.contains("note"));
  CHECK_FALSE(config.contains("absent"));
  CHECK_THROWS_AS(config.get_string("absent"), ConfigError);
}

TEST_CASE("config files reject malformed lines with their location") {
  try {
    ConfigMap::parse_text("ok = 1\nnot a pair\n", "bad.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("bad.cfg:2") != std::string::npos);
  }
  CHECK_THROWS_AS(ConfigMap::parse_text("= value\n", "x"), ConfigError);
  CHECK_THROWS_AS(ConfigMap::parse_file("/nonexistent/conf"), LoadError);
}

TEST_CASE("typed config reads validate their values") {
  const ConfigMap config = ConfigMap::parse_text(
      "count = 31\nrate = 0.25\nflag_on = yes\nflag_off = false\n"
      "big = 18446744073709551615\nnegative = -4\nword = hello\n",
      "typed.cfg");
  int count = 0;
  config.read("count", count);
  CHECK(count == 31);
  int untouched = 99;
  config.read("absent", untouched);
  CHECK(untouched == 99);
  double rate = 0.0;
  config.read("rate", rate);
  CHECK(rate == 0.25);
  bool on = false, off = true;
  config.read("flag_on", on);
  config.read("flag_off", off);
  CHECK(on);
  CHECK_FALSE(off);
  std::uint64_t big = 0;
  config.read("big", big);
  CHECK(big == 18446744073709551615ULL);

  int bad = 0;
  CHECK_THROWS_AS(config.read("word", bad), ConfigError);
  std::uint64_t no_sign = 0;
  CHECK_THROWS_AS(config.read("negative", no_sign), ConfigError);
  bool not_a_flag = false;
  CHECK_THROWS_AS(config.read("word", not_a_flag), ConfigError);
}

TEST_CASE("usage errors exit with 2, help with 0") {
  CHECK(cli({}) == 2);
  CHECK(cli({"frobnicate"}) == 2);
  CHECK(cli({"train", "--no-such-flag"}) == 2);
  CHECK(cli({"--help"}) == 0);
  CHECK(cli({"synth", "--help"}) == 0);
  CHECK(cli({"train", "--help"}) == 0);
  CHECK(cli({"predict", "--help"}) == 0);
}

TEST_CASE("synth writes a deterministic dataset with metadata") {
  TempDir tmp;
  const std::string out_a = (tmp / "a").string();
  const std::string out_b = (tmp / "b").string();
  const std::vector<std::string> args = {"synth", "--seed", "9",
                                         "--entities", "30",
                                         "--relations", "2"};
  std::vector<std::string> run_a = args;
  run_a.insert(run_a.end(), {"--out", out_a});
  std::vector<std::string> run_b = args;
  run_b.insert(run_b.end(), {"--out", out_b});
  REQUIRE(run_cli(run_a) == 0);
  REQUIRE(run_cli(run_b) == 0);

  for (const std::string name :
       {"entities.tsv", "relations.json", "train.txt", "valid.txt",
        "test.txt"}) {
    CHECK(read_text_file(tmp.path() / "a" / name) ==
          read_text_file(tmp.path() / "b" / name));
  }

  const json meta = read_json(tmp.path() / "a" / "run.json");
  CHECK(meta.at("command") == "synth");
  CHECK(meta.at("seed") == 9);
  const KnowledgeGraph g = load_dataset(tmp.path() / "a");
  CHECK(meta.at("summary").at("train").get<std::size_t>() ==
        g.triples(Split::train).size());
  CHECK(g.entities().size() == 30);
}

TEST_CASE("the full pipeline runs end to end") {
  TempDir tmp;
  const std::string data = (tmp / "data").string();
  REQUIRE(cli({"synth", "--seed", "9", "--entities", "30", "--relations", "2",
               "--out", data}) == 0);
  const KnowledgeGraph graph = load_dataset(data);

  // prepare: one manifest per split, two queries per triple.
  const std::string prep = (tmp / "prep").string();
  REQUIRE(cli({"prepare", "--dataset", data, "--out", prep}) == 0);
  for (const Split split : {Split::train, Split::valid, Split::test}) {
    const auto manifest = tmp.path() / "prep" /
                          (std::string("queries_") + to_string(split) + ".tsv");
    CHECK(count_lines(manifest) == 2 * graph.triples(split).size());
  }
  const json prep_meta = read_json(tmp.path() / "prep" / "run.json");
  CHECK(prep_meta.at("queries").at("train").get<std::size_t>() ==
        2 * graph.triples(Split::train).size());

  // describe twice: the second pass generates nothing and changes nothing.
  const std::string cache = (tmp / "cache.jsonl").string();
  const std::string desc1 = (tmp / "desc1").string();
  const std::string desc2 = (tmp / "desc2").string();
  REQUIRE(cli({"describe", "--dataset", data, "--cache", cache, "--stub",
               "--out", desc1}) == 0);
  const json first = read_json(tmp.path() / "desc1" / "run.json");
  CHECK(first.at("generated").get<std::size_t>() > 0);
  CHECK(first.at("cached").get<std::size_t>() == 0);
  const std::string cache_bytes = read_text_file(cache);

  REQUIRE(cli({"describe", "--dataset", data, "--cache", cache, "--stub",
               "--out", desc2}) == 0);
  const json second = read_json(tmp.path() / "desc2" / "run.json");
  CHECK(second.at("generated").get<std::size_t>() == 0);
  CHECK(read_text_file(cache) == cache_bytes);

  // train a small baseline model.
  const std::string train_out = (tmp / "train").string();
  REQUIRE(cli({"train", "--dataset", data, "--mode", "baseline", "--epochs",
               "2", "--d", "12", "--max-len", "32", "--batch-size", "16",
               "--out", train_out}) == 0);
  const auto checkpoint = tmp.path() / "train" / "checkpoints" / "final.ckpt";
  REQUIRE(std::filesystem::exists(checkpoint));
  const json train_meta = read_json(tmp.path() / "train" / "run.json");
  CHECK(train_meta.at("epoch_loss").size() == 2);
  CHECK(train_meta.at("config").at("epochs") == 2);
  CHECK(train_meta.at("inputs").at("train").at("digest") ==
        file_digest(tmp.path() / "data" / "train.txt"));

  // eval emits metrics.json with the full key set, plus ranks on request.
  const std::string eval_out = (tmp / "eval").string();
  REQUIRE(cli({"eval", "--dataset", data, "--checkpoint", checkpoint.string(),
               "--split", "test", "--ranks", "--out", eval_out}) == 0);
  const json metrics = read_json(tmp.path() / "eval" / "metrics.json");
  const std::vector<std::string> expected_keys = {
      "split", "mode", "mrr", "hit1", "hit3", "hit10", "n_queries",
      "checkpoint_id"};
  CHECK(metrics.size() == expected_keys.size());
  for (const std::string& key : expected_keys) CHECK(metrics.contains(key));
  CHECK(metrics.at("split") == "test");
  CHECK(metrics.at("mode") == "baseline");
  CHECK(metrics.at("mrr").get<double>() > 0.0);
  CHECK(metrics.at("mrr").get<double>() <= 1.0);
  CHECK(metrics.at("n_queries").get<std::size_t>() ==
        2 * graph.triples(Split::test).size());
  CHECK(count_lines(tmp.path() / "eval" / "ranks.tsv") ==
        2 * graph.triples(Split::test).size());

  // predict lists k candidates for an explicit query.
  const std::string predict_out = (tmp / "predict").string();
  const std::string source = graph.entity(graph.triples(Split::test)[0].head)
                                 .raw_key;
  const std::string relation =
      graph.relation(graph.triples(Split::test)[0].relation).raw_key;
  REQUIRE(cli({"predict", "--dataset", data, "--checkpoint",
               checkpoint.string(), "--source", source, "--relation", relation,
               "--k", "3", "--out", predict_out}) == 0);
  CHECK(count_lines(tmp.path() / "predict" / "predictions.tsv") == 3);
  const json predict_meta = read_json(tmp.path() / "predict" / "run.json");
  CHECK(predict_meta.at("predictions").size() == 3);
}

TEST_CASE("config files feed stages and flags override them") {
  TempDir tmp;
  const std::string data = (tmp / "data").string();
  REQUIRE(cli({"synth", "--seed", "4", "--entities", "20", "--relations", "1",
               "--out", data}) == 0);

  const auto config_path = tmp / "run.cfg";
  write_text_file(config_path,
                  "dataset = " + data + "\n" +
                  "epochs = 2\n"
                  "d = 10\n"
                  "max_len = 32\n"
                  "batch_size = 8\n"
                  "out = " + (tmp / "from_config").string() + "\n");

  REQUIRE(cli({"train", "--config", config_path.string()}) == 0);
  const json from_config = read_json(tmp.path() / "from_config" / "run.json");
  CHECK(from_config.at("config").at("epochs") == 2);
  CHECK(from_config.at("epoch_loss").size() == 2);

  // A flag beats the same setting in the file.
  const std::string override_out = (tmp / "from_flag").string();
  REQUIRE(cli({"train", "--config", config_path.string(), "--epochs", "1",
               "--out", override_out}) == 0);
  const json from_flag = read_json(tmp.path() / "from_flag" / "run.json");
  CHECK(from_flag.at("config").at("epochs") == 1);
  CHECK(from_flag.at("epoch_loss").size() == 1);
}

TEST_CASE("stage failures exit with 1") {
  TempDir tmp;
  // No dataset anywhere.
  CHECK(cli({"train", "--epochs", "1"}) == 1);
  // Unknown configuration key.
  const auto bad_key = tmp / "bad_key.cfg";
  write_text_file(bad_key, "dataset = somewhere\nvolume = 11\n");
  CHECK(cli({"train", "--config", bad_key.string()}) == 1);
  // Malformed configuration file.
  const auto malformed = tmp / "malformed.cfg";
  write_text_file(malformed, "no equals sign here\n");
  CHECK(cli({"train", "--config", malformed.string()}) == 1);
  // Bad enum value.
  const std::string data = (tmp / "data").string();
  REQUIRE(cli({"synth", "--entities", "12", "--relations", "1", "--out",
               data}) == 0);
  CHECK(cli({"train", "--dataset", data, "--mode", "psychic", "--epochs",
             "1", "--out", (tmp / "t").string()}) == 1);
  // Non-baseline training without a cache.
  CHECK(cli({"train", "--dataset", data, "--mode", "full", "--epochs", "1",
             "--out", (tmp / "t2").string()}) == 1);
  // Eval without a checkpoint.
  CHECK(cli({"eval", "--dataset", data, "--out", (tmp / "e").string()}) == 1);
  // Predict without a source entity.
  CHECK(cli({"predict", "--dataset", data, "--checkpoint",
             (tmp / "none.ckpt").string(), "--out",
             (tmp / "p").string()}) == 1);
  // Missing dataset directory.
  CHECK(cli({"prepare", "--dataset", (tmp / "void").string(), "--out",
             (tmp / "pr").string()}) == 1);
}

TEST_CASE("credentials are not accepted as configuration keys") {
  TempDir tmp;
  const auto leaky = tmp / "leaky.cfg";
  write_text_file(leaky,
                  "dataset = somewhere\nKERMIT_SERVICE_KEY = sk-secret\n");
  // The key never becomes configuration; the run fails up front.
  CHECK(cli({"describe", "--config", leaky.string(), "--cache",
             (tmp / "c.jsonl").string(), "--stub",
             "--out", (tmp / "d").string()}) == 1);
}

}  // TEST_SUITE("cli")
