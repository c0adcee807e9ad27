#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "easirp/linalg.hpp"

namespace easirp {

struct CovarianceDiagnostic {
  Matrix covariance;  // mean removed, 1/N normalization
  double whiteness_error = 0.0;  // max |cov - I|
};

// Requires at least two samples (rows).
CovarianceDiagnostic covariance_diagnostic(const RowMatrix& z);

// Amari index of P = B A, scaled to [0, 1]. With q_ij = |p_ij| / max_k |p_ik|
// (each row of P rescaled to unit peak):
//
//   1 / (2 n (n - 1)) * [ sum_i (sum_j q_ij - 1)
//                       + sum_j (sum_i q_ij / max_k q_kj - 1) ]
//
// Zero exactly when P is a scaled permutation; unchanged when a row of B is rescaled. Throws DiagnosticError when P is
// not square or is numerically singular.
double amari_index(const Matrix& separation, const Matrix& mixing);

// One row of the metrics TSV.
struct MetricsRow {
  std::string mode;
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double whiteness_error = 0.0;
  std::optional<double> amari;
};

void write_metrics_tsv(std::ostream& out, const std::vector<MetricsRow>& rows);

}  // namespace easirp
