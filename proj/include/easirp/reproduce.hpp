#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "easirp/costmodel.hpp"
#include "easirp/easi.hpp"
#include "easirp/mlp.hpp"
#include "easirp/pipeline.hpp"

namespace easirp {

// Waveform protocol: 5000 samples, last 8 features dropped (m = 32), first 4000
// for training, remaining 1000 for testing.
struct WaveformProtocol {
  std::size_t samples = 5000;
  std::size_t drop_last = 8;
  std::size_t train_count = 4000;
};

// EASI settings used for the classification runs.
EasiConfig table1_easi_defaults();

struct Table1Options {
  WaveformProtocol protocol;
  EasiConfig easi = table1_easi_defaults();
  bool standardize_input = true;
  MlpConfig mlp;
};

struct Table1Row {
  Mode mode;
  std::size_t m;
  std::size_t p;  // 0 when no projection
  std::size_t n;
  double reported_accuracy;  // percent
  double accuracy;           // fraction in [0, 1]
  double whiteness_error;    // of the reduced test features
  std::size_t easi_epochs;
  bool easi_converged;
};

// The four reduction configurations, in table order.
struct Table1Config {
  Mode mode;
  std::size_t m, p, n;
  double reported_accuracy;
};
const std::vector<Table1Config>& table1_configs();

std::vector<Table1Row> reproduce_table1(std::uint64_t seed, const Table1Options& options = {});
void write_table1_tsv(std::ostream& out, std::uint64_t seed, const std::vector<Table1Row>& rows);

struct Table2Row {
  ResourceEstimate estimate;
  // Hardware figures reported for the same configuration.
  std::uint64_t reported_dsps;
  std::uint64_t reported_alms;
  std::uint64_t reported_register_bits;
};

std::vector<Table2Row> reproduce_table2();
// Writes both rows followed by the baseline / projected ratios.
void write_table2_tsv(std::ostream& out, const std::vector<Table2Row>& rows);

}  // namespace easirp
