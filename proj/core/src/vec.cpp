#include "lsgda/vec.hpp"

#include <cmath>
#include <string>

#include "lsgda/errors.hpp"

namespace lsgda {

bool all_finite(const Vec64& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_finite(const Vec64& v, const char* what) {
  if (!all_finite(v)) {
    throw DimensionError(std::string(what) + " contains a non-finite entry");
  }
}

double dot(const Vec64& a, const Vec64& b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot: size mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(const Vec64& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double norm(const Vec64& v) { return std::sqrt(squared_norm(v)); }

void axpy(double a, const Vec64& x, Vec64& y) {
  if (x.size() != y.size()) {
    throw DimensionError("axpy: size mismatch (" + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()) + ")");
  }
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vec64 average_vectors(const std::vector<const Vec64*>& vs) {
  if (vs.empty()) throw DimensionError("average_vectors: no inputs");
  const size_t dim = vs[0]->size();
  Vec64 out(dim, 0.0);
  for (size_t i = 0; i < vs.size(); ++i) {
    const Vec64& v = *vs[i];
    if (v.size() != dim) {
      throw DimensionError("average_vectors: input " + std::to_string(i) +
                           " has size " + std::to_string(v.size()) +
                           ", expected " + std::to_string(dim));
    }
    for (size_t k = 0; k < dim; ++k) out[k] += v[k];
  }
  const double n = static_cast<double>(vs.size());
  for (size_t k = 0; k < dim; ++k) out[k] /= n;
  return out;
}

Vec64 average_vectors(const std::vector<Vec64>& vs) {
  std::vector<const Vec64*> ptrs;
  ptrs.reserve(vs.size());
  for (const Vec64& v : vs) ptrs.push_back(&v);
  return average_vectors(ptrs);
}

}  // namespace lsgda
