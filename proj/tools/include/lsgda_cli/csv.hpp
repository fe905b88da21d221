#pragma once

#include <string>
#include <vector>

#include "lsgda/trace.hpp"

namespace lsgda::cli {

// Column layout for a trace CSV. The four base columns are always present;
// optional metric columns appear in this fixed order when enabled.
struct TraceColumns {
  bool objective = false;
  bool dist_to_saddle = false;
  bool robust_loss = false;
  bool envelope_grad_norm = false;
};

std::string format_double(double v);

// Renders the whole file as a string so callers can diff bytes or write to
// disk. First line carries the schema version; floats use 17 significant
// digits so a rerun reproduces the file exactly.
std::string render_trace_csv(const std::vector<TraceRecord>& trace,
                             const TraceColumns& cols);

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace,
                     const TraceColumns& cols);

} // namespace lsgda::cli
