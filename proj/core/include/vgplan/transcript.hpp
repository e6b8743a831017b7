#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vgplan {

// One (goal, state, action, next state) block in the human-readable
// transition layout:
//
//   GOAL:
//   (arm-empty)
//   ...
//
//   STATE:
//   ...
//
//   ACTION:
//   (unstack b1 b4)
//
//   NEXT STATE:
//   ...
struct TranscriptEntry {
  std::string goal;
  std::string state;
  std::string action;
  std::string next_state;

  bool operator==(const TranscriptEntry&) const = default;
};

std::string format_transition_block(const TranscriptEntry& e);

// Blocks are introduced by a "TRANSITION <n>" header line.
std::string format_transcript(const std::vector<TranscriptEntry>& entries);
std::vector<TranscriptEntry> parse_transcript(std::string_view text);

// The bundled 40-step reference plan (4 blocks) in transcript form.
std::string_view example_plan_text();
std::vector<TranscriptEntry> example_plan();

struct ReplayResult {
  int transitions_checked = 0;
};

// Replays the transcript through the simulator starting from the first
// entry's STATE. Every ACTION must be applicable, every NEXT STATE must match
// the simulator byte-for-byte after canonical serialization, each STATE must
// equal the previous NEXT STATE, and every GOAL must equal the first.
// Throws FixtureMismatch naming the first divergent transition.
ReplayResult replay_transcript(const std::vector<TranscriptEntry>& entries);

}  // namespace vgplan
