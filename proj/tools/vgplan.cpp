// vgplan: data generation, training, evaluation, sweeps and fixture replay.
//
// Exit codes: 0 success, 1 validation failure (bad config, fixture mismatch,
// any other error), 2 missing artifact.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vgplan/errors.hpp"
#include "vgplan/pipeline.hpp"

namespace {

using namespace vgplan;

// Command-line overrides; unset values keep the profile defaults.
struct Overrides {
  std::string profile = "desk", model_profile = "desk", train_profile = "desk";
  std::optional<std::string> data_dir, checkpoint_dir, report_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> num_states, validation_states, min_blocks, max_blocks, max_len;
  std::optional<int> test_count, test_max_len;
  std::optional<std::string> negatives_mode;
  std::optional<int> negatives_per_positive;
  std::optional<int> gen_epochs, ver_epochs, max_steps, batch_size;
  std::optional<double> learning_rate;
  std::optional<int> k, l_max, max_tokens;
  std::optional<double> tau, top_p, threshold;
  std::optional<std::string> verifier_init;
  std::vector<int> k_values;
  std::vector<double> tau_values;
  bool oracle_states = false;
  bool dump_plans = false;
  bool quiet = false;
};

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--profile", o.profile, "Dataset profile: desk | paper")->capture_default_str();
  app.add_option("--model-profile", o.model_profile, "Model profile: desk | tiny | paper")
      ->capture_default_str();
  app.add_option("--train-profile", o.train_profile, "Training profile: desk | paper-finetune")
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Master seed");
  app.add_option("--workers", o.workers, "Worker threads (never changes outputs)");
  app.add_option("--data-dir", o.data_dir, "Corpus directory");
  app.add_option("--checkpoint-dir", o.checkpoint_dir, "Checkpoint directory");
  app.add_option("--report-dir", o.report_dir, "Report directory");

  app.add_option("--num-states", o.num_states, "Training initial states");
  app.add_option("--validation-states", o.validation_states, "Validation initial states");
  app.add_option("--min-blocks", o.min_blocks, "Fewest blocks per instance");
  app.add_option("--max-blocks", o.max_blocks, "Most blocks per instance");
  app.add_option("--max-len", o.max_len, "Maximum trajectory length");
  app.add_option("--tests", o.test_count, "Number of test instances");
  app.add_option("--test-max-len", o.test_max_len, "Maximum test trajectory length");
  app.add_option("--negatives", o.negatives_mode, "Negative sampling pool: global | instance");
  app.add_option("--negatives-per-positive", o.negatives_per_positive, "Negatives per positive");

  app.add_option("--gen-epochs", o.gen_epochs, "Generator epochs");
  app.add_option("--ver-epochs", o.ver_epochs, "Verifier epochs");
  app.add_option("--max-steps", o.max_steps, "Cap on optimizer steps (0 = none)");
  app.add_option("--batch-size", o.batch_size, "Training batch size");
  app.add_option("--lr", o.learning_rate, "Peak learning rate");
  app.add_option("--verifier-init", o.verifier_init, "Verifier init: from_generator | fresh");

  app.add_option("-k,--k", o.k, "Planning attempts");
  app.add_option("--tau", o.tau, "Sampling temperature");
  app.add_option("--top-p", o.top_p, "Nucleus mass");
  app.add_option("--l-max,--L_max", o.l_max, "Maximum plan length");
  app.add_option("--max-tokens", o.max_tokens, "Token budget per sampled completion");
  app.add_option("--threshold", o.threshold, "Verifier acceptance threshold");
  app.add_flag("--oracle-states", o.oracle_states, "Replace generated next states by the simulator's");
  app.add_option("--k-values", o.k_values, "k values for the attempt sweep")->delimiter(',');
  app.add_option("--tau-values", o.tau_values, "Temperatures for the tau sweep")->delimiter(',');
  app.add_flag("--dump-plans", o.dump_plans, "Write per-instance plan transcripts");
  app.add_flag("-q,--quiet", o.quiet, "No progress output");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = make_run_config(o.profile, o.model_profile, o.train_profile);
  if (o.data_dir) c.data_dir = *o.data_dir;
  if (o.checkpoint_dir) c.checkpoint_dir = *o.checkpoint_dir;
  if (o.report_dir) c.report_dir = *o.report_dir;
  if (o.seed) c.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (o.num_states) c.corpus.num_states = *o.num_states;
  if (o.validation_states) c.corpus.validation_states = *o.validation_states;
  if (o.min_blocks) c.corpus.min_blocks = c.tests.min_blocks = *o.min_blocks;
  if (o.max_blocks) c.corpus.max_blocks = c.tests.max_blocks = *o.max_blocks;
  if (o.max_len) c.corpus.max_len = *o.max_len;
  if (o.test_count) c.tests.count = *o.test_count;
  if (o.test_max_len) c.tests.max_len = *o.test_max_len;
  if (o.negatives_mode) c.negatives.mode = negative_mode_from_string(*o.negatives_mode);
  if (o.negatives_per_positive) c.negatives.negatives_per_positive = *o.negatives_per_positive;
  if (o.gen_epochs) c.generator_train.epochs = *o.gen_epochs;
  if (o.ver_epochs) c.verifier_train.epochs = *o.ver_epochs;
  if (o.max_steps) c.generator_train.max_steps = c.verifier_train.max_steps = *o.max_steps;
  if (o.batch_size) c.generator_train.batch_size = c.verifier_train.batch_size = *o.batch_size;
  if (o.learning_rate) c.generator_train.learning_rate = c.verifier_train.learning_rate = *o.learning_rate;
  if (o.verifier_init) c.verifier_init = verifier_init_from_string(*o.verifier_init);
  if (o.k) c.inference.k = *o.k;
  if (o.tau) c.inference.sampling.temperature = *o.tau;
  if (o.top_p) c.inference.sampling.top_p = *o.top_p;
  if (o.l_max) c.inference.max_plan_length = *o.l_max;
  if (o.max_tokens) c.inference.sampling.max_tokens = *o.max_tokens;
  if (o.threshold) c.inference.threshold = *o.threshold;
  if (o.oracle_states) c.inference.oracle_states = true;
  if (!o.k_values.empty()) c.k_values = o.k_values;
  if (!o.tau_values.empty()) c.tau_values = o.tau_values;
  c.dump_plans = o.dump_plans;
  c.validate();
  return c;
}

void print_report(const EvalReport& r) {
  std::printf("%s k=%d tau=%g top_p=%g L_max=%d instances=%zu GRR=%.4f BTR=%.4f\n", r.method.c_str(),
              r.k, r.tau, r.top_p, r.max_plan_length, r.instances.size(), r.grr(), r.btr());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vgplan: verifier-gated Blocksworld planning with learned sequence models"};
  app.set_config("--config", "", "Key-value config file (command-line flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  add_common(app, o);

  auto* gen = app.add_subcommand("gen-data", "Build corpora, verifier data and test instances");
  auto* train_gen = app.add_subcommand("train-gen", "Train the generator");
  auto* train_ver = app.add_subcommand("train-ver", "Train the verifier (--verifier-init chooses V_generator or V_base)");
  std::string init_flag;
  train_ver->add_option("--init", init_flag, "Alias for --verifier-init");
  auto* eval = app.add_subcommand("eval", "Evaluate one planning method on the test set");
  std::string method = "gen@k";
  eval->add_option("--method", method, "gen@k | gen+ver@k | gen+oracle@k")->capture_default_str();
  auto* sweep = app.add_subcommand("sweep", "Sweep k or tau for one method");
  std::string axis = "k";
  std::string sweep_method = "gen+ver@k";
  sweep->add_option("--axis", axis, "k | tau")->capture_default_str();
  sweep->add_option("--method", sweep_method, "gen@k | gen+ver@k | gen+oracle@k")->capture_default_str();
  auto* replay = app.add_subcommand("replay-fixture", "Replay the bundled reference plan through the simulator");
  std::optional<std::string> transcript;
  replay->add_option("--transcript", transcript, "Replay this transcript file instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const Logger log = o.quiet ? Logger{} : Logger([](const std::string& m) { std::cerr << m << '\n'; });
  try {
    if (*replay) {
      const ReplayResult r = cmd_replay_fixture(transcript ? std::optional<std::filesystem::path>(*transcript)
                                                           : std::nullopt);
      std::printf("replay-fixture: %d transitions replayed, all match\n", r.transitions_checked);
      return 0;
    }
    if (!init_flag.empty()) o.verifier_init = init_flag;
    const RunConfig c = resolve(o);
    if (*gen) {
      const GenDataSummary s = cmd_gen_data(c, log);
      std::printf("train transitions %zu, validation transitions %zu, verifier examples %zu, "
                  "test instances %zu, label-noise rate %.4f\n",
                  s.train_transitions, s.validation_transitions, s.verifier_train, s.test_instances,
                  s.label_noise_rate);
    } else if (*train_gen) {
      const TrainSummary s = cmd_train(c, TrainTarget::kGenerator, log);
      std::printf("generator: %zu steps, validation loss %.4f, token accuracy %.4f\n", s.log.steps.size(),
                  s.validation_loss, s.validation_accuracy);
    } else if (*train_ver) {
      const TrainTarget t = c.verifier_init == VerifierInit::kFromGenerator ? TrainTarget::kVerifierFromGenerator
                                                                            : TrainTarget::kVerifierFresh;
      const TrainSummary s = cmd_train(c, t, log);
      std::printf("%s: %zu steps, validation accuracy %.4f (labels) %.4f (oracle)\n",
                  checkpoint_stem(t).c_str(), s.log.steps.size(), s.validation_accuracy,
                  s.validation_oracle_accuracy);
    } else if (*eval) {
      print_report(cmd_eval(c, method_from_string(method), log));
    } else if (*sweep) {
      const SweepResult r = cmd_sweep(c, sweep_axis_from_string(axis), method_from_string(sweep_method), log);
      for (const auto& rep : r.reports) print_report(rep);
    }
  } catch (const MissingArtifact& e) {
    std::cerr << "missing artifact: " << e.what() << '\n';
    return 2;
  } catch (const FixtureMismatch& e) {
    std::cerr << "fixture mismatch at transition " << e.transition() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
