#include <gtest/gtest.h>

#include <cstring>
#include <regex>

#include "easirp/errors.hpp"
#include "easirp/pipeline.hpp"
#include "test_util.hpp"

using namespace easirp;
using easirp::testing::TempDir;
using easirp::testing::gaussian_vector;

namespace {

Dataset noisy(std::size_t count, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix x(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.laplace(0.7) + 0.1 * static_cast<double>(i % 3);
  return Dataset(x);
}

FittedPipeline fitted(Mode mode, bool standardize) {
  EasiConfig easi;
  easi.max_epochs = 2;
  PipelineConfig cfg = PipelineConfig::make(mode, 10, 6, 3, easi, 77);
  cfg.standardize_input = standardize;
  return fit(cfg, noisy(100, 10, 5));
}

std::string replace_line(const std::string& text, const std::string& key, const std::string& value) {
  return std::regex_replace(text, std::regex("(^|\n)" + key + "=[^\n]*"), "$1" + key + "=" + value);
}

}  // namespace

TEST(ModelIo, RoundTripIsBitExact) {
  TempDir dir;
  Rng rng(1);
  for (Mode mode : {Mode::RandomProjection, Mode::PcaWhiten, Mode::Ica, Mode::RpThenIca}) {
    for (bool standardize : {false, true}) {
      const FittedPipeline fp = fitted(mode, standardize);
      const auto path = dir.file("model.txt");
      save(fp, path);
      const FittedPipeline back = load(path);
      EXPECT_EQ(back.config().mode, mode);
      EXPECT_EQ(back.config().m, 10u);
      EXPECT_EQ(back.projection(), fp.projection());
      if (fp.separation()) {
        const Matrix& a = fp.separation()->values();
        const Matrix& b = back.separation()->values();
        ASSERT_EQ(a.size(), b.size());
        EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())), 0);
      }
      for (int probe = 0; probe < 100; ++probe) {
        const Vector x = gaussian_vector(10, rng) * 5.0;
        const std::span<const double> xs(x.data(), 10);
        const Vector za = transform(fp, xs);
        const Vector zb = transform(back, xs);
        ASSERT_EQ(std::memcmp(za.data(), zb.data(), sizeof(double) * static_cast<std::size_t>(za.size())), 0);
      }
      EXPECT_EQ(to_model_text(back), to_model_text(fp));
    }
  }
}

TEST(ModelIo, HeaderLayout) {
  const std::string text = to_model_text(fitted(Mode::RpThenIca, false));
  EXPECT_EQ(text.rfind("schema=1\nmode=rp+ica\nm=10\np=6\nn=3\nrp_seed=77\n", 0), 0u);
  EXPECT_NE(text.find("\nstandardize=0\n"), std::string::npos);
  EXPECT_NE(text.find("\nB=\n"), std::string::npos);
}

TEST(ModelIo, MissingSeparationMatrix) {
  const std::string text = to_model_text(fitted(Mode::Ica, false));
  const std::string cut = text.substr(0, text.find("B=\n"));
  EXPECT_THROW(from_model_text(cut), ModelFormatError);
}

TEST(ModelIo, TamperedDimensions) {
  const std::string ica = to_model_text(fitted(Mode::Ica, false));
  EXPECT_THROW(from_model_text(replace_line(ica, "m", "11")), ModelFormatError);
  const std::string rp = to_model_text(fitted(Mode::RpThenIca, false));
  EXPECT_THROW(from_model_text(replace_line(rp, "m", "12")), ModelFormatError);
  EXPECT_THROW(from_model_text(replace_line(rp, "rp_seed", "78")), ModelFormatError);
  EXPECT_THROW(from_model_text(replace_line(rp, "n", "2")), ModelFormatError);
}

TEST(ModelIo, SchemaViolations) {
  const std::string text = to_model_text(fitted(Mode::Ica, true));
  EXPECT_THROW(from_model_text(replace_line(text, "schema", "2")), ModelFormatError);
  EXPECT_THROW(from_model_text(replace_line(text, "mode", "pca2")), ModelFormatError);
  EXPECT_THROW(from_model_text("colour=red\n" + text), ModelFormatError);
  EXPECT_THROW(from_model_text(text + "1 2 3\n"), ModelFormatError);
  EXPECT_THROW(from_model_text(replace_line(text, "mean", "1 2")), ModelFormatError);
  EXPECT_THROW(from_model_text(""), ModelFormatError);
  TempDir dir;
  EXPECT_THROW(load(dir.file("absent.txt")), ModelFormatError);
}
