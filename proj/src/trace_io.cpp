#include "delicoco/trace_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "delicoco/errors.hpp"

namespace delicoco {

namespace {

constexpr const char* kHeader = "iter,suboptimality,consensus_error,feedback_gap,cumulative_bits";

}  // namespace

std::string trace_to_csv(const RunTrace& trace) {
  std::string out;
  for (const auto& [key, value] : trace.metadata) {
    out += "# ";
    out += key;
    out += "=";
    out += value;
    out += "\n";
  }
  out += kHeader;
  out += "\n";
  char buf[160];
  for (const TraceRow& row : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%" PRId64 "\n", row.iter,
                  row.suboptimality, row.consensus_error, row.feedback_gap, row.cumulative_bits);
    out += buf;
  }
  return out;
}

RunTrace trace_from_csv_text(const std::string& text, const std::string& origin) {
  RunTrace trace;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      const auto eq = body.find('=');
      if (eq == std::string::npos)
        throw IoError(origin + ":" + std::to_string(lineno) + ": metadata line without '='");
      trace.metadata[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (!header_seen) {
      if (line != kHeader)
        throw IoError(origin + ":" + std::to_string(lineno) + ": unexpected header \"" + line + "\"");
      header_seen = true;
      continue;
    }
    TraceRow row;
    char* end = nullptr;
    const char* p = line.c_str();
    row.iter = static_cast<int>(std::strtol(p, &end, 10));
    for (double* field : {&row.suboptimality, &row.consensus_error, &row.feedback_gap}) {
      if (*end != ',') throw IoError(origin + ":" + std::to_string(lineno) + ": malformed row");
      p = end + 1;
      *field = std::strtod(p, &end);
    }
    if (*end != ',') throw IoError(origin + ":" + std::to_string(lineno) + ": malformed row");
    p = end + 1;
    row.cumulative_bits = std::strtoll(p, &end, 10);
    if (*end != '\0' && *end != '\r')
      throw IoError(origin + ":" + std::to_string(lineno) + ": trailing characters in row");
    trace.rows.push_back(row);
  }
  if (!header_seen) throw IoError(origin + ": no trace header found");
  return trace;
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot rename " + tmp + " to " + path);
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  write_text_file_atomic(path, trace_to_csv(trace));
}

RunTrace read_trace_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return trace_from_csv_text(ss.str(), path);
}

}  // namespace delicoco
