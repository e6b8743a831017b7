#include "vgplan/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vgplan/errors.hpp"

namespace vgplan {

using nlohmann::ordered_json;

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::kGoalReached: return "goal_reached";
    case Outcome::kBadTransition: return "bad_transition";
    case Outcome::kNoPlanProposed: return "no_plan";
    case Outcome::kOffGoal: return "off_goal";
  }
  return "?";
}

Outcome outcome_from_string(const std::string& s) {
  for (Outcome o : {Outcome::kGoalReached, Outcome::kBadTransition, Outcome::kNoPlanProposed,
                    Outcome::kOffGoal}) {
    if (to_string(o) == s) return o;
  }
  throw ConfigError("unknown outcome '" + s + "'");
}

PlanOutcome score_plan(const PlanningInstance& instance,
                       const std::optional<std::vector<std::string>>& plan) {
  if (!plan) return {Outcome::kNoPlanProposed, -1};
  State s = instance.initial;
  for (std::size_t i = 0; i < plan->size(); ++i) {
    GroundedAction a;
    try {
      a = parse_action((*plan)[i]);
    } catch (const ParseError&) {
      return {Outcome::kBadTransition, static_cast<int>(i)};
    } catch (const ArityError&) {
      return {Outcome::kBadTransition, static_cast<int>(i)};
    }
    if (!is_applicable(s, a)) return {Outcome::kBadTransition, static_cast<int>(i)};
    s = apply(s, a);
  }
  return {is_goal(s, instance.goal) ? Outcome::kGoalReached : Outcome::kOffGoal, -1};
}

std::size_t EvalReport::count(Outcome o) const {
  return static_cast<std::size_t>(std::count_if(instances.begin(), instances.end(),
                                                [o](const InstanceRecord& r) { return r.outcome.kind == o; }));
}

double EvalReport::grr() const {
  return instances.empty() ? 0.0 : static_cast<double>(count(Outcome::kGoalReached)) / static_cast<double>(instances.size());
}

double EvalReport::btr() const {
  return instances.empty() ? 0.0 : static_cast<double>(count(Outcome::kBadTransition)) / static_cast<double>(instances.size());
}

std::optional<double> EvalReport::mean_distinct_rollouts() const {
  if (instances.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& r : instances) {
    if (r.distinct_rollouts < 0) return std::nullopt;
    sum += r.distinct_rollouts;
  }
  return sum / static_cast<double>(instances.size());
}

std::vector<PlanningInstance> to_planning_instances(const std::vector<TestInstance>& tests) {
  std::vector<PlanningInstance> out;
  out.reserve(tests.size());
  for (const auto& t : tests) out.push_back({t.initial, t.goal});
  return out;
}

EvalReport make_report(const Planner& planner, const InferenceConfig& config, std::uint64_t seed,
                       const std::vector<PlanningInstance>& instances,
                       const std::vector<PlanResult>& results) {
  if (instances.size() != results.size()) throw ShapeMismatch("one result per instance expected");
  EvalReport rep;
  rep.method = planner.method;
  rep.k = config.k;
  rep.tau = config.sampling.temperature;
  rep.top_p = config.sampling.top_p;
  rep.max_plan_length = config.max_plan_length;
  rep.seed = seed;
  rep.generator_id = planner.generator_id;
  rep.verifier_id = planner.verifier_id;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    InstanceRecord rec;
    rec.index = static_cast<int>(i);
    rec.outcome = score_plan(instances[i], results[i].plan);
    rec.attempts_used = results[i].attempts_used;
    rec.successful_attempt = results[i].successful_attempt;
    rec.plan_length = results[i].plan ? static_cast<int>(results[i].plan->size()) : -1;
    rep.instances.push_back(rec);
  }
  return rep;
}

EvalReport run_benchmark(const Planner& planner, const Vocabulary& vocab,
                         const std::vector<PlanningInstance>& instances,
                         const InferenceConfig& config, std::uint64_t seed, int workers,
                         std::vector<PlanResult>* results) {
  if (instances.empty()) throw ConfigError("benchmark needs at least one instance");
  if (!planner.generator) throw MissingArtifact("planner has no generator");
  RolloutOptions opt;
  opt.workers = workers;
  opt.keep_attempts = results != nullptr;
  auto res = plan_instances(*planner.generator, vocab, planner.gate, instances, config, seed, opt);
  EvalReport rep = make_report(planner, config, seed, instances, res);
  if (results) *results = std::move(res);
  return rep;
}

PlanResult truncate_attempts(const PlanResult& r, int k) {
  PlanResult out;
  out.attempts_used = std::min(r.attempts_used, k);
  if (r.successful_attempt > 0 && r.successful_attempt <= k) {
    out.plan = r.plan;
    out.successful_attempt = r.successful_attempt;
  }
  for (const auto& a : r.attempts) {
    if (static_cast<int>(out.attempts.size()) >= out.attempts_used) break;
    out.attempts.push_back(a);
  }
  return out;
}

namespace {

template <class V>
void require_increasing(const std::vector<V>& v, const char* what) {
  if (v.empty()) throw ConfigError(std::string(what) + " list is empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i - 1] < v[i])) throw ConfigError(std::string(what) + " values must be strictly increasing");
  }
}

}  // namespace

SweepResult sweep_attempts(const Planner& planner, const Vocabulary& vocab,
                           const std::vector<PlanningInstance>& instances,
                           const std::vector<int>& k_values, const InferenceConfig& config,
                           std::uint64_t seed, int workers) {
  require_increasing(k_values, "k");
  if (k_values.front() < 1) throw ConfigError("k must be >= 1");
  InferenceConfig full = config;
  full.k = k_values.back();
  RolloutOptions opt;
  opt.workers = workers;
  opt.keep_attempts = false;
  const auto results = plan_instances(*planner.generator, vocab, planner.gate, instances, full, seed, opt);
  SweepResult sweep;
  sweep.axis = "k";
  for (int k : k_values) {
    std::vector<PlanResult> cut;
    cut.reserve(results.size());
    for (const auto& r : results) cut.push_back(truncate_attempts(r, k));
    InferenceConfig c = config;
    c.k = k;
    sweep.values.push_back(k);
    sweep.reports.push_back(make_report(planner, c, seed, instances, cut));
  }
  return sweep;
}

std::vector<int> distinct_rollouts(const Transformer<float>& generator, const Vocabulary& vocab,
                                   const std::vector<PlanningInstance>& instances,
                                   const SamplingParams& sampling, const DiversityProbe& probe,
                                   std::uint64_t seed, int workers) {
  InferenceConfig c;
  c.k = probe.rollouts;
  c.max_plan_length = probe.max_steps;
  c.sampling = sampling;
  RolloutOptions opt;
  opt.stop_at_goal = false;
  opt.keep_attempts = true;
  opt.domain = StreamDomain::kDiversityProbe;
  opt.workers = workers;
  const auto results = plan_instances(generator, vocab, nullptr, instances, c, seed, opt);
  std::vector<int> out;
  for (const auto& r : results) {
    std::set<std::vector<std::string>> seen;
    for (const auto& a : r.attempts) {
      std::vector<std::string> actions;
      for (const auto& st : a.steps) actions.push_back(st.action_text);
      seen.insert(std::move(actions));
    }
    out.push_back(static_cast<int>(seen.size()));
  }
  return out;
}

SweepResult sweep_temperature(const Planner& planner, const Vocabulary& vocab,
                              const std::vector<PlanningInstance>& instances,
                              const std::vector<double>& taus, const InferenceConfig& config,
                              std::uint64_t seed, int workers, const DiversityProbe& probe) {
  require_increasing(taus, "tau");
  if (!(taus.front() > 0.0)) throw ConfigError("tau values must be positive");
  SweepResult sweep;
  sweep.axis = "tau";
  for (double tau : taus) {
    InferenceConfig c = config;
    c.sampling.temperature = tau;
    EvalReport rep = run_benchmark(planner, vocab, instances, c, seed, workers);
    const auto distinct = distinct_rollouts(*planner.generator, vocab, instances, c.sampling, probe, seed, workers);
    for (std::size_t i = 0; i < distinct.size(); ++i) rep.instances[i].distinct_rollouts = distinct[i];
    sweep.values.push_back(tau);
    sweep.reports.push_back(std::move(rep));
  }
  return sweep;
}

// --- report files ----------------------------------------------------------

std::string csv_header() {
  return "method,k,tau,grr,btr,top_p,l_max,seed,instances,goal_reached,bad_transition,no_plan,"
         "off_goal,mean_distinct_rollouts,generator,verifier";
}

std::string csv_row(const EvalReport& r) {
  char buf[512];
  const auto div = r.mean_distinct_rollouts();
  std::snprintf(buf, sizeof buf, "%s,%d,%g,%.6f,%.6f,%g,%d,%llu,%zu,%zu,%zu,%zu,%zu,%s,%s,%s",
                r.method.c_str(), r.k, r.tau, r.grr(), r.btr(), r.top_p, r.max_plan_length,
                static_cast<unsigned long long>(r.seed), r.instances.size(),
                r.count(Outcome::kGoalReached), r.count(Outcome::kBadTransition),
                r.count(Outcome::kNoPlanProposed), r.count(Outcome::kOffGoal),
                div ? std::to_string(*div).c_str() : "", r.generator_id.c_str(), r.verifier_id.c_str());
  return buf;
}

namespace {

ordered_json to_json(const EvalReport& r) {
  ordered_json j;
  j["method"] = r.method;
  j["k"] = r.k;
  j["tau"] = r.tau;
  j["top_p"] = r.top_p;
  j["max_plan_length"] = r.max_plan_length;
  j["seed"] = r.seed;
  j["generator"] = r.generator_id;
  j["verifier"] = r.verifier_id;
  j["grr"] = r.grr();
  j["btr"] = r.btr();
  ordered_json counts;
  for (Outcome o : {Outcome::kGoalReached, Outcome::kBadTransition, Outcome::kNoPlanProposed,
                    Outcome::kOffGoal}) {
    counts[to_string(o)] = r.count(o);
  }
  j["counts"] = counts;
  if (auto d = r.mean_distinct_rollouts()) j["mean_distinct_rollouts"] = *d;
  ordered_json inst = ordered_json::array();
  for (const auto& rec : r.instances) {
    ordered_json x;
    x["index"] = rec.index;
    x["outcome"] = to_string(rec.outcome.kind);
    x["bad_index"] = rec.outcome.bad_index;
    x["attempts_used"] = rec.attempts_used;
    x["successful_attempt"] = rec.successful_attempt;
    x["plan_length"] = rec.plan_length;
    x["distinct_rollouts"] = rec.distinct_rollouts;
    inst.push_back(x);
  }
  j["instances"] = inst;
  return j;
}

EvalReport report_from_json(const ordered_json& j) {
  EvalReport r;
  r.method = j.at("method").get<std::string>();
  r.k = j.at("k").get<int>();
  r.tau = j.at("tau").get<double>();
  r.top_p = j.at("top_p").get<double>();
  r.max_plan_length = j.at("max_plan_length").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.generator_id = j.at("generator").get<std::string>();
  r.verifier_id = j.at("verifier").get<std::string>();
  for (const auto& x : j.at("instances")) {
    InstanceRecord rec;
    rec.index = x.at("index").get<int>();
    rec.outcome.kind = outcome_from_string(x.at("outcome").get<std::string>());
    rec.outcome.bad_index = x.at("bad_index").get<int>();
    rec.attempts_used = x.at("attempts_used").get<int>();
    rec.successful_attempt = x.at("successful_attempt").get<int>();
    rec.plan_length = x.at("plan_length").get<int>();
    rec.distinct_rollouts = x.at("distinct_rollouts").get<int>();
    r.instances.push_back(rec);
  }
  return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

ordered_json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(e.what(), 1);
  }
}

}  // namespace

void emit_report(const EvalReport& r, const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    write_text(path, csv_header() + "\n" + csv_row(r) + "\n");
  } else {
    write_text(path, to_json(r).dump(2) + "\n");
  }
}

void emit_report(const SweepResult& r, const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    std::string text = csv_header() + "\n";
    for (const auto& rep : r.reports) text += csv_row(rep) + "\n";
    write_text(path, text);
  } else {
    ordered_json j;
    j["axis"] = r.axis;
    j["values"] = r.values;
    ordered_json reps = ordered_json::array();
    for (const auto& rep : r.reports) reps.push_back(to_json(rep));
    j["reports"] = reps;
    write_text(path, j.dump(2) + "\n");
  }
}

EvalReport read_report(const std::filesystem::path& path) {
  try {
    return report_from_json(read_json(path));
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(e.what(), 1);
  }
}

SweepResult read_sweep(const std::filesystem::path& path) {
  try {
    const auto j = read_json(path);
    SweepResult s;
    s.axis = j.at("axis").get<std::string>();
    s.values = j.at("values").get<std::vector<double>>();
    for (const auto& rep : j.at("reports")) s.reports.push_back(report_from_json(rep));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(e.what(), 1);
  }
}

}  // namespace vgplan
