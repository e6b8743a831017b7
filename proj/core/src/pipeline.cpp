#include "vgplan/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include <json.hpp>
#include <zlib.h>

#include "vgplan/checkpoint.hpp"
#include "vgplan/errors.hpp"
#include "vgplan/records.hpp"

namespace vgplan {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void RunConfig::validate() const {
  if (corpus.num_states < 1) throw ConfigError("num_states must be >= 1");
  if (corpus.validation_states < 0) throw ConfigError("validation_states must be >= 0");
  if (corpus.min_blocks < 1 || corpus.max_blocks < corpus.min_blocks) {
    throw ConfigError("block range must satisfy 1 <= min_blocks <= max_blocks");
  }
  if (tests.min_blocks < 1 || tests.max_blocks < tests.min_blocks) {
    throw ConfigError("test block range must satisfy 1 <= min_blocks <= max_blocks");
  }
  if (std::max(corpus.max_blocks, tests.max_blocks) > vocab_blocks) {
    throw ConfigError("block count exceeds the vocabulary's " + std::to_string(vocab_blocks) + " blocks");
  }
  if (corpus.max_len < 1 || tests.max_len < 2) throw ConfigError("trajectory lengths too small");
  if (tests.count < 1) throw ConfigError("test count must be >= 1");
  if (negatives.negatives_per_positive < 1) throw ConfigError("negatives_per_positive must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  ModelConfig m = model;
  m.vocab_size = 1;
  m.validate();
  inference.validate();
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    if (k_values[i] < 1 || (i && k_values[i] <= k_values[i - 1])) {
      throw ConfigError("k values must be positive and strictly increasing");
    }
  }
  for (std::size_t i = 0; i < tau_values.size(); ++i) {
    if (!(tau_values[i] > 0) || (i && tau_values[i] <= tau_values[i - 1])) {
      throw ConfigError("tau values must be positive and strictly increasing");
    }
  }
  if (probe.rollouts < 1 || probe.max_steps < 1) throw ConfigError("diversity probe sizes must be >= 1");
}

void apply_dataset_profile(RunConfig& c, const std::string& profile) {
  if (profile == "desk") {
    c.corpus = CorpusOptions{2000, 200, 3, 5, 20};
    c.tests = TestSetOptions{};
    c.tests.min_blocks = 3;
    c.tests.max_blocks = 5;
  } else if (profile == "paper") {
    c.corpus = CorpusOptions{10000, 6000, 3, 8, 20};
    c.tests = TestSetOptions{};
    c.tests.min_blocks = 3;
    c.tests.max_blocks = 8;
  } else {
    throw ConfigError("unknown dataset profile '" + profile + "' (desk | paper)");
  }
  c.profile = profile;
}

void apply_model_profile(RunConfig& c, const std::string& profile) {
  if (profile == "desk") {
    c.model = ModelConfig{4, 4, 128, 512, 0};
  } else if (profile == "tiny") {
    c.model = ModelConfig{2, 2, 32, 512, 0};
  } else if (profile == "paper") {
    c.model = ModelConfig{12, 12, 768, 1024, 0};  // GPT-2 small geometry
  } else {
    throw ConfigError("unknown model profile '" + profile + "' (desk | tiny | paper)");
  }
  c.model_profile = profile;
}

void apply_train_profile(RunConfig& c, const std::string& profile) {
  if (profile == "desk") {
    c.generator_train = desk_generator_train_config();
    c.verifier_train = desk_verifier_train_config();
  } else if (profile == "paper-finetune") {
    c.generator_train = paper_generator_train_config();
    c.verifier_train = paper_verifier_train_config();
  } else {
    throw ConfigError("unknown train profile '" + profile + "' (desk | paper-finetune)");
  }
  c.train_profile = profile;
}

RunConfig make_run_config(const std::string& profile, const std::string& model_profile,
                          const std::string& train_profile) {
  RunConfig c;
  apply_dataset_profile(c, profile);
  apply_model_profile(c, model_profile);
  apply_train_profile(c, train_profile);
  return c;
}

namespace {

ordered_json train_json(const TrainConfig& t) {
  return {{"batch_size", t.batch_size}, {"epochs", t.epochs},
          {"learning_rate", t.learning_rate}, {"warmup_steps", t.warmup_steps},
          {"cosine_decay", t.cosine_decay}, {"min_lr_ratio", t.min_lr_ratio},
          {"grad_clip", t.grad_clip}, {"max_steps", t.max_steps},
          {"full_sequence_loss", t.full_sequence_loss}};
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["profile"] = c.profile;
  j["model_profile"] = c.model_profile;
  j["train_profile"] = c.train_profile;
  j["seed"] = c.seed;
  j["corpus"] = {{"num_states", c.corpus.num_states},
                 {"validation_states", c.corpus.validation_states},
                 {"min_blocks", c.corpus.min_blocks},
                 {"max_blocks", c.corpus.max_blocks},
                 {"max_len", c.corpus.max_len}};
  j["tests"] = {{"count", c.tests.count},
                {"max_len", c.tests.max_len},
                {"min_blocks", c.tests.min_blocks},
                {"max_blocks", c.tests.max_blocks},
                {"inclusive_midpoint", c.tests.inclusive_midpoint}};
  j["negatives"] = {{"per_positive", c.negatives.negatives_per_positive},
                    {"mode", to_string(c.negatives.mode)},
                    {"oracle_filter", c.negatives.oracle_filter}};
  j["vocab_blocks"] = c.vocab_blocks;
  j["model"] = {{"layers", c.model.layers}, {"heads", c.model.heads},
                {"width", c.model.width}, {"context", c.model.context}};
  j["generator_train"] = train_json(c.generator_train);
  j["verifier_train"] = train_json(c.verifier_train);
  j["verifier_init"] = to_string(c.verifier_init);
  j["inference"] = {{"k", c.inference.k},
                    {"max_plan_length", c.inference.max_plan_length},
                    {"tau", c.inference.sampling.temperature},
                    {"top_p", c.inference.sampling.top_p},
                    {"max_tokens", c.inference.sampling.max_tokens},
                    {"threshold", c.inference.threshold},
                    {"oracle_states", c.inference.oracle_states}};
  j["k_values"] = c.k_values;
  j["tau_values"] = c.tau_values;
  j["probe"] = {{"rollouts", c.probe.rollouts}, {"max_steps", c.probe.max_steps}};
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void require(const fs::path& p, const std::string& hint) {
  if (!fs::exists(p)) throw MissingArtifact(p.string() + " not found (" + hint + ")");
}

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Vocabulary run_vocab(const RunConfig& c) { return Vocabulary(c.vocab_blocks); }

ModelConfig run_model(const RunConfig& c, const Vocabulary& v) {
  ModelConfig m = c.model;
  m.vocab_size = static_cast<int>(v.size());
  return m;
}

}  // namespace

std::string describe(const RunConfig& c) { return config_json(c).dump(); }

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  uLong crc = crc32(0L, Z_NULL, 0);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    const auto n = in.gcount();
    if (n > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buf), static_cast<uInt>(n));
  }
  char hex[16];
  std::snprintf(hex, sizeof hex, "%08lx", static_cast<unsigned long>(crc));
  return hex;
}

// --- gen-data ----------------------------------------------------------------

GenDataSummary cmd_gen_data(const RunConfig& c, const Logger& log) {
  c.validate();
  const fs::path dir = c.data_dir;
  fs::create_directories(dir);
  say(log, "exploring " + std::to_string(c.corpus.num_states) + " + " +
               std::to_string(c.corpus.validation_states) + " initial states");
  const Corpus corpus = build_trajectory_corpus(c.corpus, c.seed, c.workers);
  const auto train = build_generator_corpus(corpus.train);
  const auto validation = build_generator_corpus(corpus.validation);

  Rng neg_train(derive_seed(c.seed, StreamDomain::kVerifierNegatives, {0}));
  const VerifierCorpus ver_train = build_verifier_corpus(train, c.negatives, neg_train);
  VerifierCorpus ver_val;
  if (!validation.empty()) {
    Rng neg_val(derive_seed(c.seed, StreamDomain::kVerifierNegatives, {1}));
    ver_val = build_verifier_corpus(validation, c.negatives, neg_val);
  }
  say(log, "building " + std::to_string(c.tests.count) + " test instances");
  const auto tests = build_test_set(c.tests, c.seed, c.workers);

  const Vocabulary vocab = run_vocab(c);
  std::size_t max_tokens = 0;
  for (const auto* set : {&train, &validation}) {
    for (const auto& t : *set) {
      const auto tt = tokenize_transition(vocab, t.goal_text, t.state_text, t.action_text,
                                          t.next_state_text, static_cast<std::size_t>(c.model.context));
      max_tokens = std::max(max_tokens, tt.tokens.size());
    }
  }

  auto trajectories = [](const std::vector<Trajectory>& ts) {
    std::vector<TrajectoryRecord> out;
    out.reserve(ts.size());
    for (const auto& t : ts) out.push_back(to_record(t));
    return out;
  };
  write_records(dir / artifacts::kTrainTrajectories, trajectories(corpus.train));
  write_records(dir / artifacts::kValidationTrajectories, trajectories(corpus.validation));
  write_records(dir / artifacts::kTrainTransitions, train);
  write_records(dir / artifacts::kValidationTransitions, validation);
  write_records(dir / artifacts::kVerifierTrain, ver_train.examples);
  write_records(dir / artifacts::kVerifierValidation, ver_val.examples);
  write_records(dir / artifacts::kTestInstances, tests);

  GenDataSummary s;
  s.train_trajectories = corpus.train.size();
  s.validation_trajectories = corpus.validation.size();
  s.train_transitions = train.size();
  s.validation_transitions = validation.size();
  s.verifier_train = ver_train.examples.size();
  s.verifier_validation = ver_val.examples.size();
  s.test_instances = tests.size();
  s.label_noise_rate = ver_train.label_noise_rate();
  s.validation_label_noise_rate = ver_val.label_noise_rate();
  s.max_transition_tokens = max_tokens;

  ordered_json m;
  m["profile"] = c.profile;
  m["seed"] = c.seed;
  m["config"] = config_json(c);
  m["counts"] = {{"train_trajectories", s.train_trajectories},
                 {"validation_trajectories", s.validation_trajectories},
                 {"train_transitions", s.train_transitions},
                 {"validation_transitions", s.validation_transitions},
                 {"verifier_train", s.verifier_train},
                 {"verifier_validation", s.verifier_validation},
                 {"test_instances", s.test_instances}};
  m["label_noise_rate"] = s.label_noise_rate;
  m["validation_label_noise_rate"] = s.validation_label_noise_rate;
  m["false_negatives"] = ver_train.false_negatives;
  m["max_transition_tokens"] = s.max_transition_tokens;
  ordered_json files;
  for (const char* f : {artifacts::kTrainTrajectories, artifacts::kValidationTrajectories,
                        artifacts::kTrainTransitions, artifacts::kValidationTransitions,
                        artifacts::kVerifierTrain, artifacts::kVerifierValidation,
                        artifacts::kTestInstances}) {
    files[f] = file_checksum(dir / f);
  }
  m["checksums"] = files;
  write_text(dir / artifacts::kManifest, m.dump(2) + "\n");
  say(log, std::to_string(s.train_transitions) + " training transitions, label-noise rate " +
               fmt("%.4f", s.label_noise_rate));
  return s;
}

// --- training ------------------------------------------------------------------

std::string to_string(TrainTarget t) {
  switch (t) {
    case TrainTarget::kGenerator: return "generator";
    case TrainTarget::kVerifierFromGenerator: return "verifier:from_generator";
    case TrainTarget::kVerifierFresh: return "verifier:fresh";
  }
  return "?";
}

TrainTarget train_target_from_string(const std::string& s) {
  if (s == "generator") return TrainTarget::kGenerator;
  if (s == "verifier:from_generator" || s == "from_generator") return TrainTarget::kVerifierFromGenerator;
  if (s == "verifier:fresh" || s == "fresh") return TrainTarget::kVerifierFresh;
  throw ConfigError("unknown training target '" + s + "'");
}

std::string checkpoint_stem(TrainTarget t) {
  switch (t) {
    case TrainTarget::kGenerator: return artifacts::kGenerator;
    case TrainTarget::kVerifierFromGenerator: return "verifier_from_generator";
    case TrainTarget::kVerifierFresh: return "verifier_fresh";
  }
  return "?";
}

fs::path checkpoint_path(const RunConfig& c, TrainTarget t) {
  return c.checkpoint_dir / (checkpoint_stem(t) + ".ckpt");
}

namespace {

StepCallback step_logger(const Logger& log, std::size_t per_epoch, const std::string& what) {
  if (!log) return {};
  const std::size_t every = std::max<std::size_t>(1, per_epoch / 10);
  return [=](const StepRecord& r) {
    if (r.step % every == 0) {
      log(what + " step " + std::to_string(r.step) + " epoch " + std::to_string(r.epoch) +
          " loss " + fmt("%.4f", r.loss) + " acc " + fmt("%.4f", r.accuracy));
    }
  };
}

void write_summary(const fs::path& path, const RunConfig& c, TrainTarget t, const TrainSummary& s) {
  ordered_json j;
  j["target"] = to_string(t);
  j["config"] = config_json(c);
  j["examples"] = s.examples;
  j["steps"] = s.log.steps.size();
  j["validation_loss"] = s.validation_loss;
  j["validation_accuracy"] = s.validation_accuracy;
  if (s.validation_oracle_accuracy >= 0) j["validation_oracle_accuracy"] = s.validation_oracle_accuracy;
  write_text(path, j.dump(2) + "\n");
}

}  // namespace

TrainSummary cmd_train(const RunConfig& c, TrainTarget target, const Logger& log) {
  c.validate();
  const Vocabulary vocab = run_vocab(c);
  const ModelConfig mc = run_model(c, vocab);
  const auto ctx = static_cast<std::size_t>(mc.context);
  const std::string stem = checkpoint_stem(target);
  TrainSummary s;
  Transformer<float> model(mc, target == TrainTarget::kGenerator ? HeadKind::kLanguageModel
                                                                 : HeadKind::kClassifier);
  if (target == TrainTarget::kGenerator) {
    const fs::path tp = c.data_dir / artifacts::kTrainTransitions;
    const fs::path vp = c.data_dir / artifacts::kValidationTransitions;
    require(tp, "run gen-data first");
    require(vp, "run gen-data first");
    TrainConfig tc = c.generator_train;
    tc.seed = c.seed;
    tc.context = mc.context;
    const auto train = make_lm_examples(vocab, read_records<Transition>(tp), ctx, tc.full_sequence_loss);
    const auto val = make_lm_examples(vocab, read_records<Transition>(vp), ctx, tc.full_sequence_loss);
    Rng rng(derive_seed(c.seed, StreamDomain::kModelInit, {0}));
    model.init(rng);
    s.examples = train.size();
    say(log, "training generator on " + std::to_string(train.size()) + " transitions");
    s.log = train_generator(model, train, val, tc,
                            step_logger(log, (train.size() + 15) / 16, "generator"));
    if (!val.empty()) {
      const LossStats v = evaluate_lm(model, val);
      s.validation_loss = v.loss;
      s.validation_accuracy = v.count ? static_cast<double>(v.correct) / static_cast<double>(v.count) : 0.0;
    }
  } else {
    const fs::path tp = c.data_dir / artifacts::kVerifierTrain;
    const fs::path vp = c.data_dir / artifacts::kVerifierValidation;
    require(tp, "run gen-data first");
    require(vp, "run gen-data first");
    std::optional<Checkpoint> generator;
    const VerifierInit init = target == TrainTarget::kVerifierFromGenerator ? VerifierInit::kFromGenerator
                                                                            : VerifierInit::kFresh;
    if (init == VerifierInit::kFromGenerator) {
      const fs::path gp = checkpoint_path(c, TrainTarget::kGenerator);
      require(gp, "train the generator first");
      generator = load_checkpoint(gp, &vocab);
    }
    model = make_verifier(init, generator ? &generator->model : nullptr, mc, c.seed);
    TrainConfig tc = c.verifier_train;
    tc.seed = c.seed;
    tc.context = mc.context;
    const auto raw_val = read_records<VerifierExample>(vp);
    const auto train = make_cls_examples(vocab, read_records<VerifierExample>(tp), ctx);
    const auto val = make_cls_examples(vocab, raw_val, ctx);
    s.examples = train.size();
    say(log, "training " + stem + " on " + std::to_string(train.size()) + " examples");
    s.log = train_verifier(model, train, val, tc, step_logger(log, (train.size() + 15) / 16, stem));
    if (!val.empty()) {
      const LossStats v = evaluate_classifier(model, val);
      s.validation_loss = v.loss;
      s.validation_accuracy = static_cast<double>(v.correct) / static_cast<double>(v.count);
      // Accuracy against true applicability rather than the weak labels.
      std::vector<ClsExample> truth = val;
      for (std::size_t i = 0; i < truth.size(); ++i) {
        truth[i].label = is_applicable(parse_state(raw_val[i].state_text).state,
                                       parse_action(raw_val[i].action_text));
      }
      const LossStats o = evaluate_classifier(model, truth);
      s.validation_oracle_accuracy = static_cast<double>(o.correct) / static_cast<double>(o.count);
    }
  }
  fs::create_directories(c.checkpoint_dir);
  save_checkpoint(c.checkpoint_dir / (stem + ".ckpt"), model, vocab);
  write_train_log((c.checkpoint_dir / (stem + ".steps.jsonl")).string(),
                  (c.checkpoint_dir / (stem + ".epochs.jsonl")).string(), s.log);
  write_summary(c.checkpoint_dir / (stem + ".summary.json"), c, target, s);
  say(log, stem + " done: validation accuracy " + fmt("%.4f", s.validation_accuracy));
  return s;
}

// --- evaluation ------------------------------------------------------------------

std::string to_string(Method m) {
  switch (m) {
    case Method::kGenerator: return "gen@k";
    case Method::kGeneratorVerifier: return "gen+ver@k";
    case Method::kGeneratorOracle: return "gen+oracle@k";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "gen@k" || s == "gen") return Method::kGenerator;
  if (s == "gen+ver@k" || s == "gen+ver") return Method::kGeneratorVerifier;
  if (s == "gen+oracle@k" || s == "gen+oracle") return Method::kGeneratorOracle;
  throw ConfigError("unknown method '" + s + "' (gen@k | gen+ver@k | gen+oracle@k)");
}

std::string report_stem(const RunConfig& c, Method m) {
  switch (m) {
    case Method::kGenerator: return "gen_at_k";
    case Method::kGeneratorVerifier: return "gen_ver_" + to_string(c.verifier_init) + "_at_k";
    case Method::kGeneratorOracle: return "gen_oracle_at_k";
  }
  return "?";
}

namespace {

// Loaded models and the planner built on them.
struct PlannerBundle {
  Vocabulary vocab;
  std::optional<Checkpoint> generator;
  std::optional<Checkpoint> verifier;
  std::unique_ptr<TransitionGate> gate;
  Planner planner;
  std::vector<PlanningInstance> instances;
};

std::unique_ptr<PlannerBundle> load_planner(const RunConfig& c, Method m) {
  c.validate();
  auto b = std::make_unique<PlannerBundle>(PlannerBundle{run_vocab(c), {}, {}, {}, {}, {}});
  const fs::path tests = c.data_dir / artifacts::kTestInstances;
  require(tests, "run gen-data first");
  const fs::path gp = checkpoint_path(c, TrainTarget::kGenerator);
  require(gp, "run train-gen first");
  b->instances = to_planning_instances(read_records<TestInstance>(tests));
  b->generator = load_checkpoint(gp, &b->vocab);
  b->planner.method = to_string(m);
  b->planner.generator = &b->generator->model;
  b->planner.generator_id = "generator:" + file_checksum(gp);
  if (m == Method::kGeneratorVerifier) {
    const TrainTarget t = c.verifier_init == VerifierInit::kFromGenerator ? TrainTarget::kVerifierFromGenerator
                                                                          : TrainTarget::kVerifierFresh;
    const fs::path vp = checkpoint_path(c, t);
    require(vp, "run train-ver first");
    b->verifier = load_checkpoint(vp, &b->vocab);
    b->gate = std::make_unique<LearnedGate>(b->verifier->model, b->vocab, c.inference.threshold);
    b->planner.verifier_id = checkpoint_stem(t) + ":" + file_checksum(vp);
  } else if (m == Method::kGeneratorOracle) {
    b->gate = std::make_unique<OracleGate>();
    b->planner.verifier_id = "oracle";
  }
  b->planner.gate = b->gate.get();
  return b;
}

void dump_plans(const fs::path& dir, const std::vector<PlanningInstance>& instances,
                const std::vector<PlanResult>& results) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < results.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "instance_%03zu.txt", i);
    std::string text;
    if (results[i].plan) {
      text = format_transcript(plan_transcript(instances[i], results[i]));
    } else {
      text = "NO PLAN after " + std::to_string(results[i].attempts_used) + " attempts";
    }
    write_text(dir / name, text + "\n");
  }
}

}  // namespace

EvalReport cmd_eval(const RunConfig& c, Method m, const Logger& log) {
  auto b = load_planner(c, m);
  say(log, "evaluating " + to_string(m) + " on " + std::to_string(b->instances.size()) + " instances");
  std::vector<PlanResult> results;
  EvalReport rep = run_benchmark(b->planner, b->vocab, b->instances, c.inference, c.seed, c.workers,
                                 c.dump_plans ? &results : nullptr);
  const std::string stem = "eval_" + report_stem(c, m);
  emit_report(rep, c.report_dir / (stem + ".csv"), ReportFormat::kCsv);
  emit_report(rep, c.report_dir / (stem + ".json"), ReportFormat::kStructured);
  if (c.dump_plans) dump_plans(c.report_dir / (stem + "_plans"), b->instances, results);
  say(log, to_string(m) + ": GRR " + fmt("%.3f", rep.grr()) + " BTR " + fmt("%.3f", rep.btr()));
  return rep;
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "k") return SweepAxis::kAttempts;
  if (s == "tau") return SweepAxis::kTemperature;
  throw ConfigError("unknown sweep axis '" + s + "' (k | tau)");
}

SweepResult cmd_sweep(const RunConfig& c, SweepAxis axis, Method m, const Logger& log) {
  auto b = load_planner(c, m);
  SweepResult r;
  std::string stem;
  if (axis == SweepAxis::kAttempts) {
    say(log, "sweeping k for " + to_string(m));
    r = sweep_attempts(b->planner, b->vocab, b->instances, c.k_values, c.inference, c.seed, c.workers);
    stem = "sweep_k_" + report_stem(c, m);
  } else {
    say(log, "sweeping tau for " + to_string(m));
    r = sweep_temperature(b->planner, b->vocab, b->instances, c.tau_values, c.inference, c.seed,
                          c.workers, c.probe);
    stem = "sweep_tau_" + report_stem(c, m);
  }
  emit_report(r, c.report_dir / (stem + ".csv"), ReportFormat::kCsv);
  emit_report(r, c.report_dir / (stem + ".json"), ReportFormat::kStructured);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    say(log, r.axis + "=" + fmt("%g", r.values[i]) + ": GRR " + fmt("%.3f", r.reports[i].grr()) +
                 " BTR " + fmt("%.3f", r.reports[i].btr()));
  }
  return r;
}

ReplayResult cmd_replay_fixture(const std::optional<fs::path>& path) {
  if (!path) return replay_transcript(example_plan());
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw MissingArtifact(path->string() + " not found");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return replay_transcript(parse_transcript(text));
}

}  // namespace vgplan
