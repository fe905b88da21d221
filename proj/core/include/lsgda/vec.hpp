#pragma once

#include <cstdint>
#include <vector>

namespace lsgda {

// Contiguous sequence of IEEE-754 doubles. All API boundaries expect every
// entry to be finite.
using Vec64 = std::vector<double>;

bool all_finite(const Vec64& v);

// Throws DimensionError if `v` contains a non-finite entry; `what` names the
// offending argument in the message.
void check_finite(const Vec64& v, const char* what);

double dot(const Vec64& a, const Vec64& b);
double squared_norm(const Vec64& v);
double norm(const Vec64& v);

// y += a * x
void axpy(double a, const Vec64& x, Vec64& y);

// Mean of the inputs. The sum is accumulated in ascending input order and
// divided exactly once, so the result is bit-reproducible for a given input
// order. Inputs must be non-empty and share one dimension.
Vec64 average_vectors(const std::vector<const Vec64*>& vs);
Vec64 average_vectors(const std::vector<Vec64>& vs);

}  // namespace lsgda
