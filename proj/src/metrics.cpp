#include "easirp/metrics.hpp"

#include <cmath>
#include <iomanip>

#include "easirp/errors.hpp"

namespace easirp {

CovarianceDiagnostic covariance_diagnostic(const RowMatrix& z) {
  if (z.rows() < 2) throw ArgumentError("covariance diagnostic needs at least two samples");
  const Eigen::RowVectorXd mean = z.colwise().mean();
  const Matrix centered = z.rowwise() - mean;
  CovarianceDiagnostic d;
  d.covariance = (centered.transpose() * centered) / static_cast<double>(z.rows());
  d.whiteness_error = (d.covariance - Matrix::Identity(z.cols(), z.cols())).cwiseAbs().maxCoeff();
  return d;
}

double amari_index(const Matrix& separation, const Matrix& mixing) {
  if (separation.cols() != mixing.rows()) throw ArgumentError("B columns must match A rows");
  const Matrix p = separation * mixing;
  if (p.rows() != p.cols()) throw DiagnosticError("B A must be square");
  const Eigen::Index n = p.rows();
  if (n < 2) return 0.0;
  const Eigen::JacobiSVD<Matrix> svd(p);
  const auto& sv = svd.singularValues();
  if (!p.allFinite() || !(sv[n - 1] > 1e-12 * sv[0])) throw DiagnosticError("B A is singular");

  // Rows are rescaled to unit peak first, so the value ignores the scale of each output.
  Matrix a = p.cwiseAbs();
  for (Eigen::Index i = 0; i < n; ++i) a.row(i) /= a.row(i).maxCoeff();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += a.row(i).sum() / a.row(i).maxCoeff() - 1.0;
  for (Eigen::Index j = 0; j < n; ++j) total += a.col(j).sum() / a.col(j).maxCoeff() - 1.0;
  return total / (2.0 * static_cast<double>(n) * static_cast<double>(n - 1));
}

void write_metrics_tsv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "mode\tm\tp\tn\tseed\taccuracy\twhitenessError\tamariIndex\n";
  out << std::setprecision(6);
  for (const auto& r : rows) {
    out << r.mode << '\t' << r.m << '\t' << r.p << '\t' << r.n << '\t' << r.seed << '\t' << r.accuracy << '\t'
        << r.whiteness_error << '\t';
    if (r.amari) {
      out << *r.amari;
    } else {
      out << "NA";
    }
    out << '\n';
  }
}

}  // namespace easirp
