#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "spincorr/accumulator.hpp"
#include "spincorr/event.hpp"

namespace spincorr {

inline constexpr int kEventFormatVersion = 1;

/// Leading comment block of an event file.
struct EventFileHeader {
  int format_version{kEventFormatVersion};
  ModelSpec model;
  std::uint64_t seed{};
  std::uint64_t count{};
};

/// Writes the canonical CSV interchange format:
///   # spincorr-events format=1
///   # model=<descriptor>
///   # two_s=<2S>
///   # seed=<seed>
///   # count=<n>
///   seq,theta_a_rad,theta_b_rad,outcome_a_2m,outcome_b_2m
/// LF line endings, planar angles with 12 significant digits, rows in ascending
/// seq. Returns the number of rows written. Records failing the lattice
/// invariants or the ordering are rejected with a data_error naming the seq;
/// non-planar settings cannot be represented and are likewise rejected.
std::uint64_t write_events(std::ostream& out, const ModelSpec& model, std::uint64_t seed,
                           std::span<const EventRecord> records);
std::uint64_t write_events_file(const std::filesystem::path& path, const ModelSpec& model,
                                std::uint64_t seed, std::span<const EventRecord> records);

/// Streams records through fn in file order, validating each row (malformed
/// rows raise data_error with the line number; lattice violations with the
/// seq). Returns the header; the declared count must match the rows seen.
EventFileHeader for_each_event(std::istream& in,
                               const std::function<void(const EventRecord&)>& fn);

struct EventFile {
  EventFileHeader header;
  std::vector<EventRecord> records;
};

EventFile read_events(std::istream& in);
EventFile read_events_file(const std::filesystem::path& path);

struct FileAccumulation {
  EventFileHeader header;
  AccumulatorState accumulator;
};

/// One-pass, constant-memory accumulation. The file must hold a single setting
/// pair (the first row declares it; any deviation is a data_error) and at
/// least one event.
FileAccumulation accumulate_file(std::istream& in);
FileAccumulation accumulate_file(const std::filesystem::path& path);

}  // namespace spincorr
