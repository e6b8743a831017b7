#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "vgplan/errors.hpp"
#include "vgplan/pipeline.hpp"
#include "test_support.hpp"

using namespace vgplan;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_run(const fs::path& root, std::uint64_t seed = 0) {
  RunConfig c = make_run_config("desk", "tiny", "desk");
  c.data_dir = root / "data";
  c.checkpoint_dir = root / "ckpt";
  c.report_dir = root / "reports";
  c.seed = seed;
  c.corpus = CorpusOptions{40, 8, 3, 3, 8};
  c.tests.count = 6;
  c.tests.max_len = 6;
  c.tests.min_blocks = c.tests.max_blocks = 3;
  c.model.context = 160;
  c.generator_train.epochs = 1;
  c.generator_train.warmup_steps = 2;
  c.verifier_train.epochs = 1;
  c.verifier_train.warmup_steps = 2;
  c.inference.k = 2;
  c.inference.max_plan_length = 6;
  c.k_values = {1, 2};
  c.tau_values = {0.5, 1.0};
  c.probe = {2, 2};
  return c;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

std::map<std::string, std::string> checksums(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = file_checksum(e.path());
  return out;
}

}  // namespace

TEST(Pipeline, Profiles) {
  const RunConfig paper = make_run_config("paper", "paper", "paper-finetune");
  EXPECT_EQ(paper.corpus.num_states, 10000);
  EXPECT_EQ(paper.corpus.validation_states, 6000);
  EXPECT_EQ(paper.corpus.min_blocks, 3);
  EXPECT_EQ(paper.corpus.max_blocks, 8);
  EXPECT_EQ(paper.corpus.max_len, 20);
  EXPECT_EQ(paper.tests.count, 200);
  EXPECT_EQ(paper.model.layers, 12);
  EXPECT_EQ(paper.model.width, 768);
  EXPECT_DOUBLE_EQ(paper.generator_train.learning_rate, 5e-6);
  EXPECT_NO_THROW(paper.validate());

  const RunConfig desk = make_run_config();
  EXPECT_EQ(desk.corpus.num_states, 2000);
  EXPECT_EQ(desk.corpus.min_blocks, 3);
  EXPECT_EQ(desk.corpus.max_blocks, 5);
  EXPECT_EQ(desk.model.layers, 4);
  EXPECT_EQ(desk.model.heads, 4);
  EXPECT_EQ(desk.model.width, 128);
  EXPECT_EQ(desk.model.context, 512);
  EXPECT_EQ(desk.inference.k, 25);
  EXPECT_DOUBLE_EQ(desk.inference.sampling.temperature, 1.0);
  EXPECT_DOUBLE_EQ(desk.inference.sampling.top_p, 0.99);
  EXPECT_EQ(desk.inference.max_plan_length, 40);
  EXPECT_EQ(desk.k_values, (std::vector<int>{1, 8, 16, 25}));
  EXPECT_EQ(desk.tau_values, (std::vector<double>{0.2, 0.5, 0.8, 1.1}));

  EXPECT_THROW(make_run_config("huge"), ConfigError);
  EXPECT_THROW(make_run_config("desk", "gpt4"), ConfigError);
  EXPECT_THROW(make_run_config("desk", "desk", "rlhf"), ConfigError);
  RunConfig bad = desk;
  bad.corpus.max_blocks = 9;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = desk;
  bad.k_values = {8, 1};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = desk;
  bad.inference.k = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Pipeline, DescribeOmitsPathsAndWorkers) {
  RunConfig a = make_run_config();
  RunConfig b = a;
  b.data_dir = "/elsewhere";
  b.workers = 7;
  EXPECT_EQ(describe(a), describe(b));
  b.seed = 1;
  EXPECT_NE(describe(a), describe(b));
}

TEST(Pipeline, ReplayFixture) {
  EXPECT_EQ(cmd_replay_fixture().transitions_checked, 40);
  TempDir dir;
  auto plan = example_plan();
  // Delete one proposition from transition 7's NEXT STATE.
  auto& ns = plan[6].next_state;
  ns.erase(0, ns.find('\n') + 1);
  { std::ofstream(dir / "bad.txt") << format_transcript(plan); }
  try {
    cmd_replay_fixture(dir / "bad.txt");
    FAIL() << "expected FixtureMismatch";
  } catch (const FixtureMismatch& e) {
    EXPECT_EQ(e.transition(), 7);
  }
  // Inapplicable action at transition 3.
  plan = example_plan();
  plan[2].action = "(stack b2 b2)";
  { std::ofstream(dir / "bad2.txt") << format_transcript(plan); }
  try {
    cmd_replay_fixture(dir / "bad2.txt");
    FAIL() << "expected FixtureMismatch";
  } catch (const FixtureMismatch& e) {
    EXPECT_EQ(e.transition(), 3);
  }
  { std::ofstream(dir / "good.txt") << format_transcript(example_plan()); }
  EXPECT_EQ(cmd_replay_fixture(dir / "good.txt").transitions_checked, 40);
  EXPECT_THROW(cmd_replay_fixture(dir / "absent.txt"), MissingArtifact);
}

TEST(Pipeline, GenDataDeterministicAcrossWorkers) {
  TempDir a, b;
  RunConfig ca = tiny_run(a.path());
  RunConfig cb = tiny_run(b.path());
  cb.workers = 3;
  const GenDataSummary sa = cmd_gen_data(ca);
  cmd_gen_data(cb);
  EXPECT_EQ(checksums(ca.data_dir), checksums(cb.data_dir));
  EXPECT_EQ(line_count(ca.data_dir / artifacts::kTrainTransitions), sa.train_transitions);
  EXPECT_EQ(sa.verifier_train, 2 * sa.train_transitions);
  EXPECT_EQ(sa.test_instances, 6u);

  const auto manifest = nlohmann::json::parse(testing_support::slurp(ca.data_dir / artifacts::kManifest));
  EXPECT_EQ(manifest["seed"], 0);
  EXPECT_EQ(manifest["profile"], "desk");
  EXPECT_TRUE(manifest.contains("label_noise_rate"));
  EXPECT_EQ(manifest["counts"]["train_transitions"], sa.train_transitions);
  EXPECT_EQ(manifest["checksums"][artifacts::kTestInstances],
            file_checksum(ca.data_dir / artifacts::kTestInstances));
  // A rerun reproduces every file.
  const auto first = checksums(ca.data_dir);
  cmd_gen_data(ca);
  EXPECT_EQ(checksums(ca.data_dir), first);
}

TEST(Pipeline, MissingArtifacts) {
  TempDir dir;
  const RunConfig c = tiny_run(dir.path());
  EXPECT_THROW(cmd_train(c, TrainTarget::kGenerator), MissingArtifact);
  cmd_gen_data(c);
  EXPECT_THROW(cmd_train(c, TrainTarget::kVerifierFromGenerator), MissingArtifact);
  EXPECT_THROW(cmd_eval(c, Method::kGenerator), MissingArtifact);
  EXPECT_FALSE(fs::exists(checkpoint_path(c, TrainTarget::kVerifierFromGenerator)));
}

TEST(Pipeline, EndToEndTinyRun) {
  TempDir dir;
  RunConfig c = tiny_run(dir.path());
  c.dump_plans = true;
  cmd_gen_data(c);
  const TrainSummary g = cmd_train(c, TrainTarget::kGenerator);
  const std::size_t per_epoch = (g.examples + 15) / 16;
  EXPECT_EQ(g.log.steps.size(), per_epoch * static_cast<std::size_t>(c.generator_train.epochs));
  EXPECT_EQ(line_count(c.checkpoint_dir / "generator.steps.jsonl"), g.log.steps.size());
  EXPECT_TRUE(fs::exists(c.checkpoint_dir / "generator.ckpt"));

  const TrainSummary vg = cmd_train(c, TrainTarget::kVerifierFromGenerator);
  const TrainSummary vb = cmd_train(c, TrainTarget::kVerifierFresh);
  EXPECT_GE(vg.validation_oracle_accuracy, 0.0);
  EXPECT_LE(vg.validation_oracle_accuracy, 1.0);
  EXPECT_TRUE(fs::exists(c.checkpoint_dir / "verifier_from_generator.ckpt"));
  EXPECT_TRUE(fs::exists(c.checkpoint_dir / "verifier_fresh.ckpt"));
  (void)vb;

  const EvalReport gen = cmd_eval(c, Method::kGenerator);
  const EvalReport ver = cmd_eval(c, Method::kGeneratorVerifier);
  const EvalReport oracle = cmd_eval(c, Method::kGeneratorOracle);
  EXPECT_EQ(gen.instances.size(), 6u);
  EXPECT_EQ(oracle.btr(), 0.0);
  EXPECT_EQ(ver.method, "gen+ver@k");
  EXPECT_EQ(read_report(c.report_dir / "eval_gen_at_k.json"), gen);
  EXPECT_TRUE(fs::exists(c.report_dir / "eval_gen_at_k.csv"));
  EXPECT_TRUE(fs::exists(c.report_dir / "eval_gen_at_k_plans" / "instance_000.txt"));

  const SweepResult sk = cmd_sweep(c, SweepAxis::kAttempts, Method::kGeneratorVerifier);
  EXPECT_EQ(sk.values, (std::vector<double>{1, 2}));
  const SweepResult st = cmd_sweep(c, SweepAxis::kTemperature, Method::kGenerator);
  EXPECT_EQ(st.values, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(read_sweep(c.report_dir / "sweep_tau_gen_at_k.json"), st);

  // Retraining with the same config reproduces the checkpoint bit for bit.
  const std::string before = file_checksum(c.checkpoint_dir / "generator.ckpt");
  RunConfig c2 = c;
  c2.workers = 2;
  cmd_train(c2, TrainTarget::kGenerator);
  EXPECT_EQ(file_checksum(c.checkpoint_dir / "generator.ckpt"), before);
  EXPECT_EQ(cmd_eval(c2, Method::kGenerator), gen);
}

TEST(Pipeline, NameParsing) {
  EXPECT_EQ(method_from_string("gen@k"), Method::kGenerator);
  EXPECT_EQ(method_from_string("gen+ver@k"), Method::kGeneratorVerifier);
  EXPECT_EQ(method_from_string("gen+oracle@k"), Method::kGeneratorOracle);
  EXPECT_THROW(method_from_string("beam"), ConfigError);
  EXPECT_EQ(sweep_axis_from_string("tau"), SweepAxis::kTemperature);
  EXPECT_THROW(sweep_axis_from_string("p"), ConfigError);
  EXPECT_EQ(train_target_from_string("verifier:fresh"), TrainTarget::kVerifierFresh);
  EXPECT_EQ(checkpoint_stem(TrainTarget::kVerifierFromGenerator), "verifier_from_generator");
}
