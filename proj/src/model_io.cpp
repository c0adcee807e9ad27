#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "easirp/errors.hpp"
#include "easirp/pipeline.hpp"

namespace easirp {

namespace {

constexpr int kSchemaVersion = 1;

std::string format_real(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string format_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_real(v[i]);
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  std::array<char, 17> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, 16);
  std::string s(buf.data(), res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

[[noreturn]] void fail(const std::string& what) { throw ModelFormatError("model file: " + what); }

template <class T>
T parse_integer(std::string_view key, std::string_view text, int base = 10) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
  if (ec != std::errc() || ptr != text.data() + text.size()) fail("bad integer for " + std::string(key));
  return v;
}

double parse_real(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    fail("bad real '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

std::vector<double> parse_reals(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t sp = text.find(' ', start);
    const std::string_view tok = text.substr(start, sp == std::string_view::npos ? std::string_view::npos : sp - start);
    out.push_back(parse_real(key, tok));
    if (sp == std::string_view::npos) break;
    start = sp + 1;
  }
  return out;
}

}  // namespace

std::string to_model_text(const FittedPipeline& fp) {
  const PipelineConfig& cfg = fp.config();
  std::ostringstream out;
  out << "schema=" << kSchemaVersion << '\n';
  out << "mode=" << mode_name(cfg.mode) << '\n';
  out << "m=" << cfg.m << '\n';
  out << "p=" << cfg.p << '\n';
  out << "n=" << cfg.n << '\n';
  out << "rp_seed=" << cfg.rp_seed << '\n';
  if (fp.projection()) {
    out << "rp_scale=" << format_real(cfg.rp_scale) << '\n';
    out << "rp_digest=" << hex64(fp.projection()->digest()) << '\n';
  }
  out << "standardize=" << (fp.scaling() ? 1 : 0) << '\n';
  if (fp.scaling()) {
    out << "mean=" << format_vector(fp.scaling()->mean) << '\n';
    out << "std=" << format_vector(fp.scaling()->stddev) << '\n';
  }
  if (fp.separation()) {
    const Matrix& b = fp.separation()->values();
    out << "B=\n";
    for (Eigen::Index r = 0; r < b.rows(); ++r) out << format_vector(b.row(r).transpose()) << '\n';
  }
  return out.str();
}

FittedPipeline from_model_text(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < text.size();) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  std::map<std::string, std::string, std::less<>> fields;
  std::size_t i = 0;
  bool has_b = false;
  for (; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0) fail("expected key=value at line " + std::to_string(i + 1));
    const std::string key(line.substr(0, eq));
    if (key == "B") {
      if (eq + 1 != line.size()) fail("B= must be alone on its line");
      has_b = true;
      ++i;
      break;
    }
    static const std::array<std::string_view, 11> kKnown = {"schema", "mode", "m",           "p",    "n",  "rp_seed",
                                                            "rp_scale", "rp_digest", "standardize", "mean", "std"};
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) fail("unknown key '" + key + "'");
    if (!fields.emplace(key, std::string(line.substr(eq + 1))).second) fail("duplicate key '" + key + "'");
  }

  const auto require = [&](std::string_view key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) fail("missing key '" + std::string(key) + "'");
    return it->second;
  };

  if (parse_integer<int>("schema", require("schema")) != kSchemaVersion) fail("unsupported schema version");
  PipelineConfig cfg;
  try {
    cfg.mode = parse_mode(require("mode"));
  } catch (const ConfigError& e) {
    fail(e.what());
  }
  cfg.m = parse_integer<std::size_t>("m", require("m"));
  cfg.p = parse_integer<std::size_t>("p", require("p"));
  cfg.n = parse_integer<std::size_t>("n", require("n"));
  cfg.rp_seed = parse_integer<std::uint64_t>("rp_seed", require("rp_seed"));
  cfg.easi.terms = forced_terms(cfg.mode);

  const std::string& standardize = require("standardize");
  if (standardize != "0" && standardize != "1") fail("standardize must be 0 or 1");
  cfg.standardize_input = standardize == "1";
  std::optional<FeatureScaling> scaling;
  if (cfg.standardize_input) {
    const auto mean = parse_reals("mean", require("mean"));
    const auto stddev = parse_reals("std", require("std"));
    if (mean.size() != cfg.m || stddev.size() != cfg.m) fail("mean/std must have m entries");
    scaling.emplace();
    scaling->mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    scaling->stddev = Eigen::Map<const Vector>(stddev.data(), static_cast<Eigen::Index>(stddev.size()));
  } else if (fields.contains("mean") || fields.contains("std")) {
    fail("mean/std present but standardize=0");
  }

  std::optional<TernaryMatrix> projection;
  if (uses_projection(cfg.mode)) {
    if (cfg.p == 0 || cfg.p > cfg.m) fail("projection dimensions out of range");
    cfg.rp_scale = fields.contains("rp_scale") ? parse_real("rp_scale", require("rp_scale")) : 1.0;
    projection = TernaryMatrix::sample(cfg.p, cfg.m, cfg.rp_seed);
    const auto digest = parse_integer<std::uint64_t>("rp_digest", require("rp_digest"), 16);
    if (digest != projection->digest()) fail("projection matrix regenerated from (p, m, rp_seed) does not match rp_digest");
  } else if (fields.contains("rp_scale") || fields.contains("rp_digest")) {
    fail("projection fields present in a mode without projection");
  }

  std::optional<SeparationMatrix> separation;
  if (uses_separation(cfg.mode)) {
    if (!has_b) fail(std::string(mode_name(cfg.mode)) + " mode requires a B= block");
    const std::size_t cols = cfg.separation_input_dim();
    if (lines.size() - i != cfg.n) {
      fail("B= block has " + std::to_string(lines.size() - i) + " rows, expected n=" + std::to_string(cfg.n));
    }
    Matrix b(cfg.n, cols);
    for (std::size_t r = 0; r < cfg.n; ++r) {
      const auto row = parse_reals("B", lines[i + r]);
      if (row.size() != cols) {
        fail("B row " + std::to_string(r) + " has " + std::to_string(row.size()) + " entries, expected " +
             std::to_string(cols));
      }
      for (std::size_t c = 0; c < cols; ++c) b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    try {
      separation.emplace(std::move(b));
    } catch (const ArgumentError& e) {
      fail(e.what());
    }
  } else if (has_b) {
    fail("rp mode must not carry a B= block");
  }

  try {
    return FittedPipeline(cfg, std::move(projection), std::move(separation), std::nullopt, std::move(scaling));
  } catch (const ConfigError& e) {
    fail(e.what());
  }
}

void save(const FittedPipeline& fp, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write model file " + path.string());
  out << to_model_text(fp);
  if (!out) throw ArgumentError("failed writing model file " + path.string());
}

FittedPipeline load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_model_text(buf.str());
}

}  // namespace easirp
