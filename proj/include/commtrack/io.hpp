#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "commtrack/graph.hpp"

namespace commtrack {

/// Parse failure tied to a 1-based input line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class DuplicatePolicy { sum, reject };

struct LoadOptions {
  DuplicatePolicy duplicates = DuplicatePolicy::sum;
  bool allow_self_loops = false;
};

struct LoadReport {
  std::size_t lines = 0;
  std::size_t edges = 0;
  std::size_t duplicate_edges = 0;
};

/// Edge list: `snapshot u v [weight]`, whitespace separated, `#` comments.
/// A two-field line `snapshot u` declares an isolated node. Snapshot indices
/// must be positive and contiguous from 1.
SnapshotSeries read_snapshots(std::istream& in, const LoadOptions& options = {}, LoadReport* report = nullptr);
SnapshotSeries load_snapshots(const std::filesystem::path& path, const LoadOptions& options = {},
                              LoadReport* report = nullptr);
void write_snapshots(std::ostream& out, const SnapshotSeries& series);

/// Membership file: `snapshot community node`. Returns one Partition per
/// snapshot of `series` (empty where the file has no entries). Community ids
/// are arbitrary strings; communities are ordered by first appearance.
PartitionSeries read_partitions(std::istream& in, const SnapshotSeries& series);
PartitionSeries load_partitions(const std::filesystem::path& path, const SnapshotSeries& series);
void write_partitions(std::ostream& out, const PartitionSeries& partitions, const NodeIndex& nodes);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace commtrack
