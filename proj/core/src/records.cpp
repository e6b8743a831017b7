#include "vgplan/records.hpp"

#include <fstream>

#include <json.hpp>

#include "vgplan/errors.hpp"

namespace vgplan {

using nlohmann::json;

TrajectoryRecord to_record(const Trajectory& t) {
  TrajectoryRecord r;
  for (const auto& s : t.states) r.states.push_back(serialize_state(s));
  for (const auto& a : t.actions) r.actions.push_back(serialize_action(a));
  return r;
}

namespace {

json to_json_value(const Transition& t) {
  return {{"goal_text", t.goal_text},
          {"state_text", t.state_text},
          {"action_text", t.action_text},
          {"next_state_text", t.next_state_text}};
}

json to_json_value(const VerifierExample& e) {
  return {{"state_text", e.state_text},
          {"action_text", e.action_text},
          {"label", e.valid ? "valid" : "invalid"}};
}

json to_json_value(const TestInstance& t) {
  return {{"initial", serialize_state(t.initial)},
          {"goal", serialize_state(t.goal)},
          {"source_length", t.source_length}};
}

json to_json_value(const TrajectoryRecord& t) {
  return {{"states", t.states}, {"actions", t.actions}};
}

template <class T>
T from_json_value(const json& j);

template <>
Transition from_json_value<Transition>(const json& j) {
  return {j.at("goal_text").get<std::string>(), j.at("state_text").get<std::string>(),
          j.at("action_text").get<std::string>(), j.at("next_state_text").get<std::string>()};
}

template <>
VerifierExample from_json_value<VerifierExample>(const json& j) {
  const auto label = j.at("label").get<std::string>();
  if (label != "valid" && label != "invalid") throw std::invalid_argument("bad label '" + label + "'");
  return {j.at("state_text").get<std::string>(), j.at("action_text").get<std::string>(),
          label == "valid"};
}

template <>
TestInstance from_json_value<TestInstance>(const json& j) {
  auto initial = parse_state(j.at("initial").get<std::string>());
  auto goal = parse_state(j.at("goal").get<std::string>());
  if (!initial.consistent || !goal.consistent) {
    throw std::invalid_argument("test instance states must be physically consistent");
  }
  return {std::move(initial.state), std::move(goal.state), j.at("source_length").get<int>()};
}

template <>
TrajectoryRecord from_json_value<TrajectoryRecord>(const json& j) {
  TrajectoryRecord r{j.at("states").get<std::vector<std::string>>(),
                     j.at("actions").get<std::vector<std::string>>()};
  if (r.states.size() != r.actions.size() + 1) throw std::invalid_argument("states/actions size mismatch");
  return r;
}

}  // namespace

template <class T>
std::string encode_record(const T& record) {
  return to_json_value(record).dump();
}

template <class T>
T decode_record(const std::string& line, std::size_t line_no) {
  try {
    return from_json_value<T>(json::parse(line));
  } catch (const std::exception& e) {
    throw DecodeError(e.what(), line_no);
  }
}

template <class T>
void write_records(const std::filesystem::path& path, const std::vector<T>& records) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& r : records) out << encode_record(r) << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

template <class T>
std::vector<T> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    out.push_back(decode_record<T>(line, line_no));
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  return out;
}

#define VGPLAN_INSTANTIATE_RECORD(T)                                                  \
  template std::string encode_record<T>(const T&);                                    \
  template T decode_record<T>(const std::string&, std::size_t);                       \
  template void write_records<T>(const std::filesystem::path&, const std::vector<T>&); \
  template std::vector<T> read_records<T>(const std::filesystem::path&);

VGPLAN_INSTANTIATE_RECORD(Transition)
VGPLAN_INSTANTIATE_RECORD(VerifierExample)
VGPLAN_INSTANTIATE_RECORD(TestInstance)
VGPLAN_INSTANTIATE_RECORD(TrajectoryRecord)

#undef VGPLAN_INSTANTIATE_RECORD

}  // namespace vgplan
