#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "easirp/easi.hpp"
#include "easirp/pipeline.hpp"

namespace easirp {

// Word-level operation counts of one hardware stage, per processed sample.
struct StageCost {
  std::string name;
  std::uint64_t multipliers = 0;
  std::uint64_t adders = 0;  // adders and subtractors
};

// Per-sample operation counts of the training datapath, one physical unit per
// operation. For d = EASI input width (m, or p after projection):
//
//   projection          0 mult,  m add       (expected nonzeros of R: p * m * 1/p)
//   1 forward           d n mult,  n (d - 1) add
//   2 cubic             2n mult                              (higher order only)
//   3 relative-gradient second order: n (n + 1) / 2 mult, n add
//                       higher order:  n (n - 1) mult, n (n - 1) / 2 add
//                       both terms:    + n (n - 1) add to combine
//   4 gradient-product  n^2 d mult,  d n (n - 1) add
//   5 update            d n mult,  d n add
//
// Registers hold B, H, y, g(y), one latch per scalar crossing each stage
// boundary, and the projection matrix packed at 2 bits per entry, 32 bits a word.
struct ResourceEstimate {
  Mode mode = Mode::Ica;
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t n = 0;
  std::vector<StageCost> stages;
  std::uint64_t multipliers = 0;
  std::uint64_t adders = 0;
  std::uint64_t register_words = 0;
  std::uint64_t register_bits = 0;
};

inline constexpr std::uint64_t kWordBits = 32;

// Throws ArgumentError when the dimensions violate the mode's constraints.
// For PCA/ICA p is ignored; for RP mode the output width is p and n is ignored.
ResourceEstimate estimate_resources(Mode mode, std::size_t m, std::size_t p, std::size_t n);

// EASI stages alone for input width d and the given term flags.
std::vector<StageCost> easi_stage_costs(std::size_t d, std::size_t n, TermFlags terms);

// m / p: predicted resource savings of projecting to p before EASI.
double savings_ratio(std::size_t m, std::size_t p);

void print_resource_table(std::ostream& out, const ResourceEstimate& est);
void write_resource_tsv(std::ostream& out, const std::vector<ResourceEstimate>& rows);

}  // namespace easirp
