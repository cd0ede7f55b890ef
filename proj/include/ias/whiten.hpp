#pragma once

#include <utility>

#include "ias/linear_map.hpp"
#include "ias/types.hpp"

namespace ias {

// Transforms (A, b, Sigma) to the white-noise form (S A, S b) with
// Sigma^{-1} = S^T S, S the inverse lower Cholesky factor of Sigma.
// Throws NotSpd when the factorization fails.
std::pair<MapPtr, Vector> whiten(MapPtr A, const Vector& b, const Matrix& Sigma);

// Fast path for Sigma = sigma^2 I.
std::pair<MapPtr, Vector> whiten(MapPtr A, const Vector& b, double sigma);

}  // namespace ias
