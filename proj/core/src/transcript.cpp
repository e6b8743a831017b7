#include "vgplan/transcript.hpp"

#include <sstream>

#include "vgplan/blocksworld.hpp"
#include "vgplan/errors.hpp"

namespace vgplan {

namespace detail {
extern const std::string_view kExamplePlanText;
}

namespace {

constexpr std::string_view kHeader = "TRANSITION ";

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\n' || s[b] == '\r' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\n' || s[e - 1] == '\r' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string format_transition_block(const TranscriptEntry& e) {
  std::string out;
  out += "GOAL:\n" + e.goal + "\n\n";
  out += "STATE:\n" + e.state + "\n\n";
  out += "ACTION:\n" + e.action + "\n\n";
  out += "NEXT STATE:\n" + e.next_state + "\n";
  return out;
}

std::string format_transcript(const std::vector<TranscriptEntry>& entries) {
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    out += std::string(kHeader) + std::to_string(i + 1) + "\n";
    out += format_transition_block(entries[i]);
    out += "\n";
  }
  return out;
}

std::vector<TranscriptEntry> parse_transcript(std::string_view text) {
  std::vector<TranscriptEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  TranscriptEntry* cur = nullptr;
  std::string* field = nullptr;
  std::size_t line_no = 0;
  auto finish = [&] {
    if (!cur) return;
    for (std::string* f : {&cur->goal, &cur->state, &cur->action, &cur->next_state}) *f = trim(*f);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind(kHeader, 0) == 0) {
      finish();
      out.emplace_back();
      cur = &out.back();
      field = nullptr;
      continue;
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!cur) throw DecodeError("content before the first TRANSITION header", line_no);
    if (t == "GOAL:") {
      field = &cur->goal;
    } else if (t == "STATE:") {
      field = &cur->state;
    } else if (t == "ACTION:") {
      field = &cur->action;
    } else if (t == "NEXT STATE:") {
      field = &cur->next_state;
    } else if (field) {
      if (!field->empty()) *field += '\n';
      *field += t;
    } else {
      throw DecodeError("content outside a section", line_no);
    }
  }
  finish();
  return out;
}

std::string_view example_plan_text() { return detail::kExamplePlanText; }

std::vector<TranscriptEntry> example_plan() { return parse_transcript(example_plan_text()); }

ReplayResult replay_transcript(const std::vector<TranscriptEntry>& entries) {
  if (entries.empty()) throw FixtureMismatch("empty transcript", 0);
  auto fail = [](int n, const std::string& why) -> FixtureMismatch {
    return FixtureMismatch("transition " + std::to_string(n) + ": " + why, n);
  };
  State current;
  try {
    current = parse_state(entries.front().state).state;
  } catch (const Error& e) {
    throw fail(1, std::string("STATE does not parse: ") + e.what());
  }
  const std::string goal = entries.front().goal;
  ReplayResult result;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    const auto& e = entries[i];
    if (e.goal != goal) throw fail(n, "GOAL differs from the first transition's GOAL");
    if (serialize_state(current) != e.state) {
      throw fail(n, "STATE differs from the simulated state");
    }
    GroundedAction action;
    try {
      action = parse_action(e.action);
    } catch (const Error& err) {
      throw fail(n, std::string("ACTION does not parse: ") + err.what());
    }
    if (!is_applicable(current, action)) throw fail(n, "ACTION " + e.action + " is not applicable");
    current = apply(current, action);
    if (serialize_state(current) != e.next_state) {
      throw fail(n, "NEXT STATE differs from the simulator:\n" + serialize_state(current));
    }
    ++result.transitions_checked;
  }
  return result;
}

}  // namespace vgplan
