#include "spincorr/eventlog.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "spincorr/errors.hpp"

namespace spincorr {

namespace {

constexpr const char* kFormatLinePrefix = "# spincorr-events format=";
constexpr const char* kColumnHeader = "seq,theta_a_rad,theta_b_rad,outcome_a_2m,outcome_b_2m";

std::string format_angle(double angle) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", angle);
  return buf;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
  std::ostringstream msg;
  msg << "malformed event file at line " << line_no << ": " << why;
  throw data_error(msg.str());
}

template <typename Int>
bool parse_int(std::string_view text, Int& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(std::string_view text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

// Splits a row into exactly n comma-separated fields.
bool split_fields(const std::string& line, std::string_view* fields, std::size_t n) {
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) return false;
    fields[i] = std::string_view(line).substr(start, comma - start);
    start = comma + 1;
  }
  if (line.find(',', start) != std::string::npos) return false;
  fields[n - 1] = std::string_view(line).substr(start);
  return true;
}

struct HeaderFields {
  std::optional<int> format_version;
  std::optional<std::string> model;
  std::optional<int> two_s;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> count;
};

EventFileHeader parse_header(std::istream& in, std::size_t& line_no) {
  HeaderFields fields;
  std::string line;
  while (true) {
    if (!std::getline(in, line)) malformed(line_no + 1, "unexpected end of file in header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == kColumnHeader) break;
    if (line.rfind("# ", 0) != 0) {
      malformed(line_no, "expected '# key=value' header line or the column header");
    }
    const std::string body = line.substr(2);
    if (body.rfind("spincorr-events format=", 0) == 0) {
      int v = 0;
      if (!parse_int(std::string_view(body).substr(23), v)) malformed(line_no, "bad format version");
      fields.format_version = v;
    } else if (body.rfind("model=", 0) == 0) {
      fields.model = body.substr(6);
    } else if (body.rfind("two_s=", 0) == 0) {
      int v = 0;
      if (!parse_int(std::string_view(body).substr(6), v)) malformed(line_no, "bad two_s");
      fields.two_s = v;
    } else if (body.rfind("seed=", 0) == 0) {
      std::uint64_t v = 0;
      if (!parse_int(std::string_view(body).substr(5), v)) malformed(line_no, "bad seed");
      fields.seed = v;
    } else if (body.rfind("count=", 0) == 0) {
      std::uint64_t v = 0;
      if (!parse_int(std::string_view(body).substr(6), v)) malformed(line_no, "bad count");
      fields.count = v;
    }
    // unknown comment lines are tolerated within a recognized major version
  }

  if (!fields.format_version) malformed(line_no, "missing format line");
  if (*fields.format_version != kEventFormatVersion) {
    std::ostringstream msg;
    msg << "unsupported event file format version " << *fields.format_version;
    throw data_error(msg.str());
  }
  if (!fields.model || !fields.two_s || !fields.seed || !fields.count) {
    malformed(line_no, "header is missing one of model/two_s/seed/count");
  }

  EventFileHeader header;
  header.format_version = *fields.format_version;
  try {
    header.model = ModelSpec::from_descriptor(*fields.model, SpinMagnitude(*fields.two_s));
  } catch (const validation_error& e) {
    throw data_error(std::string("invalid event file header: ") + e.what());
  }
  header.seed = *fields.seed;
  header.count = *fields.count;
  return header;
}

}  // namespace

std::uint64_t write_events(std::ostream& out, const ModelSpec& model, std::uint64_t seed,
                           std::span<const EventRecord> records) {
  out << kFormatLinePrefix << kEventFormatVersion << '\n';
  out << "# model=" << model.descriptor() << '\n';
  out << "# two_s=" << model.spin().two_s() << '\n';
  out << "# seed=" << seed << '\n';
  out << "# count=" << records.size() << '\n';
  out << kColumnHeader << '\n';

  bool have_prev = false;
  std::uint64_t prev_seq = 0;
  for (const EventRecord& rec : records) {
    if (have_prev && rec.seq <= prev_seq) {
      std::ostringstream msg;
      msg << "record seq=" << rec.seq << " is not in ascending seq order";
      throw data_error(msg.str());
    }
    prev_seq = rec.seq;
    have_prev = true;
    try {
      validate_event(rec, model.spin());
      out << rec.seq << ',' << format_angle(rec.setting_a.planar_angle()) << ','
          << format_angle(rec.setting_b.planar_angle()) << ',' << rec.outcome_a.two_m() << ','
          << rec.outcome_b.two_m() << '\n';
    } catch (const validation_error& e) {
      std::ostringstream msg;
      msg << "record seq=" << rec.seq << " rejected: " << e.what();
      throw data_error(msg.str());
    }
    if (!out) throw data_error("write failure while emitting event rows");
  }
  out.flush();
  if (!out) throw data_error("write failure while emitting event rows");
  return records.size();
}

std::uint64_t write_events_file(const std::filesystem::path& path, const ModelSpec& model,
                                std::uint64_t seed, std::span<const EventRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open '" + path.string() + "' for writing");
  return write_events(out, model, seed, records);
}

namespace {

EventFileHeader stream_rows(std::istream& in,
                            const std::function<void(const EventFileHeader&, const EventRecord&)>& fn) {
  std::size_t line_no = 0;
  const EventFileHeader header = parse_header(in, line_no);
  const SpinMagnitude spin = header.model.spin();

  std::uint64_t rows = 0;
  bool have_prev = false;
  std::uint64_t prev_seq = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::string_view fields[5];
    if (!split_fields(line, fields, 5)) malformed(line_no, "expected 5 comma-separated fields");

    std::uint64_t seq = 0;
    double theta_a = 0.0, theta_b = 0.0;
    int two_ma = 0, two_mb = 0;
    if (!parse_int(fields[0], seq)) malformed(line_no, "bad seq field");
    if (!parse_double(fields[1], theta_a)) malformed(line_no, "bad theta_a_rad field");
    if (!parse_double(fields[2], theta_b)) malformed(line_no, "bad theta_b_rad field");
    if (!parse_int(fields[3], two_ma)) malformed(line_no, "bad outcome_a_2m field");
    if (!parse_int(fields[4], two_mb)) malformed(line_no, "bad outcome_b_2m field");
    // the 1e-9 slack covers 12-digit rounding of angles just under 2*pi;
    // from_planar_angle wraps such values back into range
    if (!(theta_a >= 0.0 && theta_a < 2.0 * kPi + 1e-9) ||
        !(theta_b >= 0.0 && theta_b < 2.0 * kPi + 1e-9)) {
      malformed(line_no, "planar angle outside [0, 2*pi)");
    }

    if (have_prev && seq <= prev_seq) {
      std::ostringstream msg;
      msg << "event seq=" << seq << " out of ascending order (line " << line_no << ")";
      throw data_error(msg.str());
    }
    prev_seq = seq;
    have_prev = true;

    EventRecord rec{seq, Setting::from_planar_angle(theta_a), Setting::from_planar_angle(theta_b),
                    Outcome(two_ma), Outcome(two_mb)};
    try {
      validate_event(rec, spin);
    } catch (const validation_error& e) {
      throw data_error(e.what());  // already names the seq
    }
    fn(header, rec);
    ++rows;
  }
  if (in.bad()) throw data_error("read failure while scanning event rows");
  if (rows != header.count) {
    std::ostringstream msg;
    msg << "event file declares count=" << header.count << " but has " << rows << " rows";
    throw data_error(msg.str());
  }
  return header;
}

}  // namespace

EventFileHeader for_each_event(std::istream& in,
                               const std::function<void(const EventRecord&)>& fn) {
  return stream_rows(in, [&fn](const EventFileHeader&, const EventRecord& rec) { fn(rec); });
}

EventFile read_events(std::istream& in) {
  EventFile file;
  file.header = for_each_event(in, [&](const EventRecord& rec) { file.records.push_back(rec); });
  return file;
}

EventFile read_events_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open '" + path.string() + "' for reading");
  return read_events(in);
}

FileAccumulation accumulate_file(std::istream& in) {
  std::optional<AccumulatorState> acc;
  EventFileHeader header =
      stream_rows(in, [&acc](const EventFileHeader& hdr, const EventRecord& rec) {
        if (!acc) {
          acc.emplace(rec.setting_a, rec.setting_b, hdr.model.spin());
        }
        try {
          acc->add(rec);
        } catch (const validation_error& e) {
          throw data_error(std::string("mixed setting pairs in one file: ") + e.what());
        }
      });
  if (!acc) throw insufficient_data_error("event file has no records to accumulate");
  return FileAccumulation{header, std::move(*acc)};
}

FileAccumulation accumulate_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open '" + path.string() + "' for reading");
  return accumulate_file(in);
}

}  // namespace spincorr
