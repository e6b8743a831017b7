#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vgplan/dataset.hpp"
#include "vgplan/eval.hpp"
#include "vgplan/planner.hpp"
#include "vgplan/training.hpp"
#include "vgplan/transcript.hpp"
#include "vgplan/transformer.hpp"

namespace vgplan {

// File names inside the data and checkpoint directories.
namespace artifacts {
inline constexpr const char* kTrainTrajectories = "train_trajectories.jsonl";
inline constexpr const char* kValidationTrajectories = "validation_trajectories.jsonl";
inline constexpr const char* kTrainTransitions = "train_transitions.jsonl";
inline constexpr const char* kValidationTransitions = "validation_transitions.jsonl";
inline constexpr const char* kVerifierTrain = "verifier_train.jsonl";
inline constexpr const char* kVerifierValidation = "verifier_validation.jsonl";
inline constexpr const char* kTestInstances = "test_instances.jsonl";
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kGenerator = "generator";
}  // namespace artifacts

// Everything a pipeline run depends on. Profiles fill in defaults; callers
// then override individual fields.
struct RunConfig {
  std::filesystem::path data_dir = "runs/data";
  std::filesystem::path checkpoint_dir = "runs/checkpoints";
  std::filesystem::path report_dir = "runs/reports";

  std::string profile = "desk";        // dataset shape: desk | paper
  std::string model_profile = "desk";  // desk | tiny | paper
  std::string train_profile = "desk";  // desk | paper-finetune
  std::uint64_t seed = 0;
  int workers = 1;

  CorpusOptions corpus;
  TestSetOptions tests;
  VerifierCorpusOptions negatives;
  int vocab_blocks = 8;
  ModelConfig model;
  TrainConfig generator_train;
  TrainConfig verifier_train;
  VerifierInit verifier_init = VerifierInit::kFromGenerator;
  InferenceConfig inference;
  std::vector<int> k_values{1, 8, 16, 25};
  std::vector<double> tau_values{0.2, 0.5, 0.8, 1.1};
  DiversityProbe probe;
  bool dump_plans = false;  // write per-instance transcripts next to reports

  void validate() const;  // throws ConfigError
};

// Closed profile sets; throw ConfigError for unknown names.
RunConfig make_run_config(const std::string& profile = "desk", const std::string& model_profile = "desk",
                          const std::string& train_profile = "desk");
void apply_dataset_profile(RunConfig& c, const std::string& profile);
void apply_model_profile(RunConfig& c, const std::string& profile);
void apply_train_profile(RunConfig& c, const std::string& profile);

// Canonical JSON echo of the configuration, minus paths and worker count
// (which never influence results).
std::string describe(const RunConfig& c);

// CRC-32 of a file's bytes, as 8 hex digits. Throws IoError.
std::string file_checksum(const std::filesystem::path& path);

using Logger = std::function<void(const std::string&)>;

struct GenDataSummary {
  std::size_t train_trajectories = 0, validation_trajectories = 0;
  std::size_t train_transitions = 0, validation_transitions = 0;
  std::size_t verifier_train = 0, verifier_validation = 0;
  std::size_t test_instances = 0;
  double label_noise_rate = 0.0;             // training verifier corpus
  double validation_label_noise_rate = 0.0;
  std::size_t max_transition_tokens = 0;
};

// Writes trajectories, transitions, verifier corpora, test instances and a
// manifest (counts, seed, profile, label-noise rate, file checksums).
GenDataSummary cmd_gen_data(const RunConfig& c, const Logger& log = {});

enum class TrainTarget { kGenerator, kVerifierFromGenerator, kVerifierFresh };
std::string to_string(TrainTarget t);
TrainTarget train_target_from_string(const std::string& s);

// Checkpoint stem for a target: "generator", "verifier_from_generator", ...
std::string checkpoint_stem(TrainTarget t);
std::filesystem::path checkpoint_path(const RunConfig& c, TrainTarget t);

struct TrainSummary {
  TrainLog log;
  std::size_t examples = 0;
  double validation_loss = 0.0;
  double validation_accuracy = 0.0;        // against the stored labels
  double validation_oracle_accuracy = -1;  // verifier only: against true applicability
};

// Writes <stem>.ckpt, <stem>.steps.jsonl (one line per optimizer step),
// <stem>.epochs.jsonl and <stem>.summary.json into checkpoint_dir. Throws
// MissingArtifact when corpora or the generator checkpoint are absent.
TrainSummary cmd_train(const RunConfig& c, TrainTarget target, const Logger& log = {});

enum class Method { kGenerator, kGeneratorVerifier, kGeneratorOracle };
std::string to_string(Method m);  // "gen@k", "gen+ver@k", "gen+oracle@k"
Method method_from_string(const std::string& s);

// Report stem, e.g. "eval_gen_ver_from_generator_at_k".
std::string report_stem(const RunConfig& c, Method m);

EvalReport cmd_eval(const RunConfig& c, Method m, const Logger& log = {});

enum class SweepAxis { kAttempts, kTemperature };
SweepAxis sweep_axis_from_string(const std::string& s);  // "k" | "tau"
SweepResult cmd_sweep(const RunConfig& c, SweepAxis axis, Method m, const Logger& log = {});

// Replays the bundled reference plan, or the transcript at `path`.
ReplayResult cmd_replay_fixture(const std::optional<std::filesystem::path>& path = std::nullopt);

}  // namespace vgplan
