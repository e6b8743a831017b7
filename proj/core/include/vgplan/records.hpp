#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vgplan/dataset.hpp"

namespace vgplan {

// Line-delimited JSON records. One object per line; field names follow the
// struct members. read_records throws DecodeError with the 1-based line
// number of the first bad line, IoError when the file cannot be opened.

struct TrajectoryRecord {
  std::vector<std::string> states;
  std::vector<std::string> actions;

  bool operator==(const TrajectoryRecord&) const = default;
};

TrajectoryRecord to_record(const Trajectory& t);

// Record types supported by the reader/writer.
template <class T>
void write_records(const std::filesystem::path& path, const std::vector<T>& records);

template <class T>
std::vector<T> read_records(const std::filesystem::path& path);

// Single-line codecs, exposed for tests and for the report writer.
template <class T>
std::string encode_record(const T& record);

template <class T>
T decode_record(const std::string& line, std::size_t line_no);

}  // namespace vgplan
