#pragma once

#include <string>

#include "delicoco/optim.hpp"

namespace delicoco {

// Trace CSV layout: a leading block of `# key=value` metadata lines (sorted
// by key), then the header
//   iter,suboptimality,consensus_error,feedback_gap,cumulative_bits
// and one row per iteration. Doubles are printed with "%.17g" so traces
// round-trip exactly and identical runs produce byte-identical files.
std::string trace_to_csv(const RunTrace& trace);
RunTrace trace_from_csv_text(const std::string& text, const std::string& origin);

// write_trace_csv is atomic: it writes a temp file in the target directory
// and renames it into place.
void write_trace_csv(const RunTrace& trace, const std::string& path);
RunTrace read_trace_csv(const std::string& path);

void write_text_file_atomic(const std::string& path, const std::string& content);

}  // namespace delicoco
