#include "easirp/costmodel.hpp"

#include <iomanip>
#include <string>

#include "easirp/errors.hpp"

namespace easirp {

std::vector<StageCost> easi_stage_costs(std::size_t d, std::size_t n, TermFlags terms) {
  const auto ud = static_cast<std::uint64_t>(d);
  const auto un = static_cast<std::uint64_t>(n);
  const std::uint64_t pairs = un * (un - 1) / 2;

  StageCost grad{"relative-gradient", 0, 0};
  if (terms.second_order) {
    grad.multipliers += un * (un + 1) / 2;
    grad.adders += un;
  }
  if (terms.higher_order) {
    grad.multipliers += 2 * pairs;
    grad.adders += pairs;
  }
  if (terms.second_order && terms.higher_order) grad.adders += 2 * pairs;

  return {
      {"forward", ud * un, un * (ud - 1)},
      {"cubic", terms.higher_order ? 2 * un : 0, 0},
      grad,
      {"gradient-product", un * un * ud, ud * un * (un - 1)},
      {"update", ud * un, ud * un},
  };
}

ResourceEstimate estimate_resources(Mode mode, std::size_t m, std::size_t p, std::size_t n) {
  ResourceEstimate est;
  est.mode = mode;
  est.m = m;
  est.p = uses_projection(mode) ? p : 0;
  est.n = mode == Mode::RandomProjection ? p : n;

  const auto bad = [&] {
    return ArgumentError("invalid dimensions for " + std::string(mode_name(mode)) + ": m=" + std::to_string(m) +
                         " p=" + std::to_string(p) + " n=" + std::to_string(n));
  };
  if (m == 0) throw bad();
  switch (mode) {
    case Mode::RandomProjection:
      if (p == 0 || p > m) throw bad();
      break;
    case Mode::RpThenIca:
      if (p == 0 || p > m || n == 0 || n > p) throw bad();
      break;
    case Mode::PcaWhiten:
    case Mode::Ica:
      if (n == 0 || n > m) throw bad();
      break;
  }

  std::uint64_t words = 0;
  if (uses_projection(mode)) {
    const auto up = static_cast<std::uint64_t>(p);
    est.stages.push_back({"projection", 0, static_cast<std::uint64_t>(m)});
    words += (2 * up * static_cast<std::uint64_t>(m) + kWordBits - 1) / kWordBits;  // packed R
    words += up;                                                                   // projection output latch
  }
  if (uses_separation(mode)) {
    const std::size_t d = mode == Mode::RpThenIca ? p : m;
    const TermFlags terms = forced_terms(mode);
    for (auto& s : easi_stage_costs(d, n, terms)) est.stages.push_back(std::move(s));
    const auto ud = static_cast<std::uint64_t>(d);
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t gy = terms.higher_order ? un : 0;
    words += un * ud + un * un + un + gy;       // B, H, y, g(y)
    words += un + gy + un * un + un * ud;       // stage-boundary latches
  }
  for (const auto& s : est.stages) {
    est.multipliers += s.multipliers;
    est.adders += s.adders;
  }
  est.register_words = words;
  est.register_bits = words * kWordBits;
  return est;
}

double savings_ratio(std::size_t m, std::size_t p) {
  if (p == 0 || p > m) throw ArgumentError("savings ratio needs m >= p >= 1");
  return static_cast<double>(m) / static_cast<double>(p);
}

void print_resource_table(std::ostream& out, const ResourceEstimate& est) {
  out << "mode " << mode_name(est.mode) << "  m=" << est.m;
  if (uses_projection(est.mode)) out << "  p=" << est.p;
  out << "  n=" << est.n << '\n';
  out << std::left << std::setw(20) << "stage" << std::right << std::setw(14) << "multipliers" << std::setw(14)
      << "adders" << '\n';
  for (const auto& s : est.stages) {
    out << std::left << std::setw(20) << s.name << std::right << std::setw(14) << s.multipliers << std::setw(14)
        << s.adders << '\n';
  }
  out << std::left << std::setw(20) << "total" << std::right << std::setw(14) << est.multipliers << std::setw(14)
      << est.adders << '\n';
  out << "registers: " << est.register_words << " words (" << est.register_bits << " bits)\n";
}

void write_resource_tsv(std::ostream& out, const std::vector<ResourceEstimate>& rows) {
  out << "mode\tm\tp\tn\tmultipliers\tadders\tregister_words\tregister_bits\n";
  for (const auto& r : rows) {
    out << mode_name(r.mode) << '\t' << r.m << '\t' << r.p << '\t' << r.n << '\t' << r.multipliers << '\t'
        << r.adders << '\t' << r.register_words << '\t' << r.register_bits << '\n';
  }
}

}  // namespace easirp
