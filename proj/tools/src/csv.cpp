#include "lsgda_cli/csv.hpp"

#include <cstdio>
#include <fstream>

#include "lsgda/errors.hpp"
#include "lsgda/version.hpp"

namespace lsgda::cli {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_trace_csv(const std::vector<TraceRecord>& trace,
                             const TraceColumns& cols) {
  std::string out;
  out.reserve(trace.size() * 96 + 128);
  out += "# trace-schema ";
  out += std::to_string(kTraceSchemaVersion);
  out += '\n';
  out += "iter,comm_round,deviation_x,deviation_y";
  if (cols.objective) out += ",objective";
  if (cols.dist_to_saddle) out += ",dist_to_saddle";
  if (cols.robust_loss) out += ",robust_loss";
  if (cols.envelope_grad_norm) out += ",envelope_grad_norm";
  out += '\n';

  auto cell = [&out](const std::optional<double>& v, const char* name,
                     int64_t iter) {
    out += ',';
    if (!v.has_value()) {
      throw IoError(std::string("trace row at iter ") + std::to_string(iter) +
                    " is missing enabled metric " + name);
    }
    out += format_double(*v);
  };

  for (const TraceRecord& r : trace) {
    out += std::to_string(r.iter);
    out += ',';
    out += std::to_string(r.comm_round);
    out += ',';
    out += format_double(r.deviation_x);
    out += ',';
    out += format_double(r.deviation_y);
    if (cols.objective) cell(r.objective, "objective", r.iter);
    if (cols.dist_to_saddle) cell(r.dist_to_saddle, "dist_to_saddle", r.iter);
    if (cols.robust_loss) cell(r.robust_loss, "robust_loss", r.iter);
    if (cols.envelope_grad_norm) {
      cell(r.envelope_grad_norm, "envelope_grad_norm", r.iter);
    }
    out += '\n';
  }
  return out;
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace,
                     const TraceColumns& cols) {
  const std::string body = render_trace_csv(trace, cols);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!os) throw IoError("short write to " + path);
}

} // namespace lsgda::cli
