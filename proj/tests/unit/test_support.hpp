#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the code it checks.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vgplan/blocksworld.hpp"

namespace testing_support {

inline std::string join_sorted(std::vector<std::string> lines) {
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) out += (i ? "\n" : "") + lines[i];
  return out;
}

// Canonical texts of every arm-empty configuration of blocks b1..bn, by
// brute force over support assignments (0 = table).
inline std::set<std::string> enumerate_arm_empty_states(int n) {
  std::set<std::string> out;
  std::vector<int> support(static_cast<std::size_t>(n) + 1, 0);
  const auto valid = [&] {
    for (int x = 1; x <= n; ++x) {
      if (support[x] == x) return false;
      for (int y = x + 1; y <= n; ++y) {
        if (support[x] != 0 && support[x] == support[y]) return false;
      }
      int cur = x;  // follow supports to the table; more than n hops means a cycle
      for (int hop = 0; cur != 0; ++hop) {
        if (hop > n) return false;
        cur = support[cur];
      }
    }
    return true;
  };
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  while (true) {
    for (int x = 1; x <= n; ++x) support[x] = digits[x - 1];
    if (valid()) {
      std::vector<std::string> lines{"(arm-empty)"};
      for (int x = 1; x <= n; ++x) {
        const std::string bx = "b" + std::to_string(x);
        if (support[x] == 0) lines.push_back("(on-table " + bx + ")");
        else lines.push_back("(on " + bx + " b" + std::to_string(support[x]) + ")");
        bool covered = false;
        for (int z = 1; z <= n; ++z) covered = covered || support[z] == x;
        if (!covered) lines.push_back("(clear " + bx + ")");
      }
      out.insert(join_sorted(lines));
    }
    int i = 0;
    while (i < n && ++digits[i] > n) digits[i++] = 0;
    if (i == n) break;
  }
  return out;
}

// Checks the physical invariants from first principles; "" when they hold.
inline std::string physical_violation(const vgplan::State& s) {
  using vgplan::Predicate;
  int arm_empty = 0;
  std::map<int, int> holding, on_table, clear, below_count, above_count;
  std::map<int, int> on;  // x -> y
  for (const auto& p : s.props()) {
    switch (p.symbol) {
      case Predicate::kArmEmpty: ++arm_empty; break;
      case Predicate::kHolding: ++holding[p.args[0]]; break;
      case Predicate::kOnTable: ++on_table[p.args[0]]; break;
      case Predicate::kClear: ++clear[p.args[0]]; break;
      case Predicate::kOn:
        ++below_count[p.args[0]];
        ++above_count[p.args[1]];
        on[p.args[0]] = p.args[1];
        break;
    }
  }
  if (arm_empty + static_cast<int>(holding.size()) != 1) return "arm state";
  for (int b : s.universe()) {
    const int places = (holding.count(b) ? 1 : 0) + (on_table.count(b) ? 1 : 0) + below_count[b];
    if (places != 1) return "placement of b" + std::to_string(b);
    if (above_count[b] > 1) return "two blocks on b" + std::to_string(b);
    const bool should_be_clear = above_count[b] == 0 && !holding.count(b);
    if (should_be_clear != (clear.count(b) > 0)) return "clear b" + std::to_string(b);
    int cur = b;
    for (std::size_t hop = 0; on.count(cur); ++hop) {
      if (hop > s.universe().size()) return "cycle";
      cur = on[cur];
    }
  }
  return "";
}

// STRIPS successor over proposition text, written from the action schemas
// alone. Returns nullopt when a precondition is missing or the action text
// is not well formed.
inline std::optional<std::string> strips_apply(const std::string& state_text,
                                               const std::string& action_text) {
  std::set<std::string> props;
  for (std::size_t start = 0; start <= state_text.size();) {
    std::size_t end = state_text.find('\n', start);
    if (end == std::string::npos) end = state_text.size();
    if (end > start) props.insert(state_text.substr(start, end - start));
    start = end + 1;
  }
  if (action_text.size() < 2 || action_text.front() != '(' || action_text.back() != ')') return std::nullopt;
  std::vector<std::string> words;
  std::string cur;
  for (char c : action_text.substr(1, action_text.size() - 2)) {
    if (c == ' ') {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) words.push_back(cur);
  if (words.empty()) return std::nullopt;
  const auto p = [](const std::string& name, const std::vector<std::string>& args) {
    std::string out = "(" + name;
    for (const auto& a : args) out += " " + a;
    return out + ")";
  };
  std::vector<std::string> pre, del, add;
  const std::string& op = words[0];
  if (op == "pickup" && words.size() == 2) {
    const auto& x = words[1];
    pre = {p("clear", {x}), p("on-table", {x}), p("arm-empty", {})};
    del = pre;
    add = {p("holding", {x})};
  } else if (op == "putdown" && words.size() == 2) {
    const auto& x = words[1];
    pre = {p("holding", {x})};
    del = pre;
    add = {p("clear", {x}), p("on-table", {x}), p("arm-empty", {})};
  } else if (op == "stack" && words.size() == 3) {
    const auto &x = words[1], &y = words[2];
    pre = {p("holding", {x}), p("clear", {y})};
    del = pre;
    add = {p("on", {x, y}), p("clear", {x}), p("arm-empty", {})};
  } else if (op == "unstack" && words.size() == 3) {
    const auto &x = words[1], &y = words[2];
    pre = {p("on", {x, y}), p("clear", {x}), p("arm-empty", {})};
    del = pre;
    add = {p("holding", {x}), p("clear", {y})};
  } else {
    return std::nullopt;
  }
  for (const auto& q : pre) {
    if (!props.count(q)) return std::nullopt;
  }
  for (const auto& q : del) props.erase(q);
  for (const auto& q : add) props.insert(q);
  return join_sorted(std::vector<std::string>(props.begin(), props.end()));
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "vgplan_test_XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace testing_support
