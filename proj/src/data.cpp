#include "easirp/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "easirp/errors.hpp"
#include "easirp/random.hpp"

namespace easirp {

Dataset::Dataset(RowMatrix samples, std::optional<std::vector<int>> labels)
    : samples_(std::move(samples)), labels_(std::move(labels)) {
  if (samples_.rows() == 0 || samples_.cols() == 0) {
    throw ArgumentError("dataset must have at least one sample and one feature");
  }
  if (!samples_.allFinite()) {
    throw ArgumentError("dataset contains non-finite entries");
  }
  if (labels_) {
    if (labels_->size() != sample_count()) {
      throw ArgumentError("label count " + std::to_string(labels_->size()) + " does not match sample count " +
                          std::to_string(sample_count()));
    }
    for (int label : *labels_) {
      if (label < 0) throw ArgumentError("labels must be non-negative");
      class_count_ = std::max(class_count_, label + 1);
    }
  }
}

const std::vector<int>& Dataset::labels() const {
  if (!labels_) throw ArgumentError("dataset has no labels");
  return *labels_;
}

// ---------------------------------------------------------------------------
// Waveform

double waveform_base(int wave, int position) {
  static constexpr std::array<int, 3> kPeaks = {7, 11, 15};
  return std::max(6.0 - std::abs(position - kPeaks.at(static_cast<std::size_t>(wave))), 0.0);
}

std::pair<int, int> waveform_class_waves(int label) {
  switch (label) {
    case 0: return {0, 1};
    case 1: return {0, 2};
    case 2: return {1, 2};
    default: throw ArgumentError("waveform label must be 0, 1 or 2");
  }
}

Dataset generate_waveform(std::size_t sample_count, std::uint64_t seed, std::size_t drop_last) {
  if (sample_count == 0) throw ArgumentError("waveform sample count must be positive");
  if (drop_last >= kWaveformFeatures) {
    throw ArgumentError("cannot drop " + std::to_string(drop_last) + " of " + std::to_string(kWaveformFeatures) +
                        " waveform features");
  }
  const std::size_t kept = kWaveformFeatures - drop_last;

  Rng rng(seed);
  RowMatrix x(sample_count, kept);
  std::vector<int> labels(sample_count);
  std::array<double, kWaveformFeatures> row{};
  for (std::size_t s = 0; s < sample_count; ++s) {
    const int label = static_cast<int>(rng.below(3));
    const auto [a, b] = waveform_class_waves(label);
    const double u = rng.uniform01();
    for (std::size_t i = 0; i < kWaveformSignalFeatures; ++i) {
      const int pos = static_cast<int>(i) + 1;
      row[i] = u * waveform_base(a, pos) + (1.0 - u) * waveform_base(b, pos) + rng.normal();
    }
    for (std::size_t i = kWaveformSignalFeatures; i < kWaveformFeatures; ++i) row[i] = rng.normal();
    for (std::size_t i = 0; i < kept; ++i) x(s, i) = row[i];
    labels[s] = label;
  }
  return Dataset(std::move(x), std::move(labels));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_real(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, std::optional<std::size_t> label_column) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);

  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool seen_first = false;
  std::size_t blank_run_start = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      if (blank_run_start == 0) blank_run_start = line_no;
      continue;
    }
    if (blank_run_start != 0 && seen_first) throw ParseError("blank line inside data", blank_run_start);
    blank_run_start = 0;

    const auto cells = split_cells(line);
    std::vector<double> values;
    values.reserve(cells.size());
    bool numeric = true;
    for (auto cell : cells) {
      auto v = parse_real(cell);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (!seen_first) {
      seen_first = true;
      width = cells.size();
      if (!numeric) continue;  // header row
    }
    if (cells.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " columns, found " + std::to_string(cells.size()),
                       line_no);
    }
    if (!numeric) throw ParseError("non-numeric cell", line_no);
    rows.push_back(std::move(values));
    row_lines.push_back(line_no);
  }

  if (rows.empty()) throw ParseError("no data rows in " + path.string(), line_no);
  if (label_column && *label_column >= width) {
    throw ParseError("label column " + std::to_string(*label_column) + " out of range for width " +
                         std::to_string(width),
                     row_lines.front());
  }
  const std::size_t features = width - (label_column ? 1 : 0);
  if (features == 0) throw ParseError("no feature columns", row_lines.front());

  RowMatrix x(rows.size(), features);
  std::optional<std::vector<int>> labels;
  if (label_column) labels.emplace(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t out = 0;
    for (std::size_t c = 0; c < width; ++c) {
      const double v = rows[r][c];
      if (!std::isfinite(v)) throw ParseError("non-finite value", row_lines[r]);
      if (label_column && c == *label_column) {
        if (v != std::floor(v) || v < 0.0 || v > 1e9) throw ParseError("label is not a non-negative integer", row_lines[r]);
        (*labels)[r] = static_cast<int>(v);
      } else {
        x(r, out++) = v;
      }
    }
  }
  return Dataset(std::move(x), std::move(labels));
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path.string());
  std::array<char, 32> buf{};
  for (std::size_t r = 0; r < data.sample_count(); ++r) {
    for (std::size_t c = 0; c < data.feature_count(); ++c) {
      if (c > 0) out << ',';
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), data.samples()(r, c));
      out.write(buf.data(), res.ptr - buf.data());
    }
    if (data.has_labels()) out << ',' << data.labels()[r];
    out << '\n';
  }
  if (!out) throw ArgumentError("failed writing " + path.string());
}

std::pair<Dataset, Dataset> split(const Dataset& data, std::size_t train_count) {
  const std::size_t n = data.sample_count();
  if (train_count == 0 || train_count >= n) {
    throw ArgumentError("train count must lie in (0, " + std::to_string(n) + "), got " + std::to_string(train_count));
  }
  const auto rows = static_cast<Eigen::Index>(train_count);
  const auto rest = static_cast<Eigen::Index>(n - train_count);
  RowMatrix head = data.samples().topRows(rows);
  RowMatrix tail = data.samples().bottomRows(rest);
  std::optional<std::vector<int>> head_labels, tail_labels;
  if (data.has_labels()) {
    const auto& l = data.labels();
    head_labels.emplace(l.begin(), l.begin() + rows);
    tail_labels.emplace(l.begin() + rows, l.end());
  }
  return {Dataset(std::move(head), std::move(head_labels)), Dataset(std::move(tail), std::move(tail_labels))};
}

// ---------------------------------------------------------------------------
// Synthetic ICA mixtures

IcaMixture generate_ica_mixture(const SyntheticIcaSpec& spec, std::size_t sample_count, std::uint64_t seed) {
  const Matrix& a = spec.mixing;
  if (sample_count == 0) throw ArgumentError("sample count must be positive");
  if (a.rows() == 0 || a.cols() == 0 || a.cols() > a.rows()) {
    throw ArgumentError("mixing matrix must be m x n with m >= n >= 1");
  }
  if (!a.allFinite()) throw ArgumentError("mixing matrix contains non-finite entries");
  const Eigen::JacobiSVD<Matrix> svd(a);
  if (svd.singularValues().minCoeff() <= 1e-9) throw ArgumentError("mixing matrix is not full column rank");

  const auto n = a.cols();
  Rng rng(seed);
  RowMatrix s(sample_count, n);
  const double half_width = std::sqrt(3.0);
  const double laplace_scale = 1.0 / std::sqrt(2.0);
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      switch (spec.distribution) {
        case SourceDistribution::Uniform: s(r, c) = rng.uniform(-half_width, half_width); break;
        case SourceDistribution::Laplace: s(r, c) = rng.laplace(laplace_scale); break;
        case SourceDistribution::Sign: s(r, c) = rng.below(2) == 0 ? -1.0 : 1.0; break;
      }
    }
  }
  RowMatrix x = s * a.transpose();
  return {Dataset(std::move(x)), std::move(s)};
}

}  // namespace easirp
