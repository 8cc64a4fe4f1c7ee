#include <gtest/gtest.h>

#include <random>

#include "oracles/oracles.hpp"
#include "tfr/error.hpp"
#include "tfr/mel.hpp"

namespace {

tfr::AudioClip tone(double f, double amp = 0.5) {
  tfr::AudioClip c;
  c.samples.resize(tfr::kCanonicalLength);
  for (std::size_t i = 0; i < c.size(); ++i)
    c.samples[i] = amp * std::sin(2.0 * oracle::kPi * f * i / c.sample_rate);
  return c;
}

tfr::MelFilterbank narrow_fb() { return tfr::build_mel_filterbank(128, 257, 22050, 0.0, 11025.0); }

}  // namespace

TEST(MelScale, ClosedForm) {
  EXPECT_EQ(tfr::hz_to_mel(0.0), 0.0);
  EXPECT_NEAR(tfr::hz_to_mel(700.0), 781.17, 0.01);
  EXPECT_NEAR(tfr::hz_to_mel(700.0), 2595.0 * std::log10(2.0), 1e-12);
  double prev = -1.0;
  for (double f = 0.0; f <= 11025.0; f += 7.3) {
    const double m = tfr::hz_to_mel(f);
    ASSERT_GT(m, prev);
    prev = m;
    ASSERT_NEAR(tfr::mel_to_hz(m), f, 1e-9 * (1.0 + f));
  }
}

TEST(MelFilterbank, NarrowbandHasNoEmptyRows) {
  const auto fb = narrow_fb();
  ASSERT_EQ(fb.weights.rows(), 128);
  ASSERT_EQ(fb.weights.cols(), 257);
  EXPECT_GE(fb.weights.minCoeff(), 0.0);
  for (Eigen::Index m = 0; m < 128; ++m) EXPECT_GT(fb.weights.row(m).maxCoeff(), 0.0) << m;
}

TEST(MelFilterbank, WidebandHasNoEmptyRows) {
  const auto fb = tfr::build_mel_filterbank(512, 1025, 22050, 0.0, 11025.0);
  for (Eigen::Index m = 0; m < 512; ++m) EXPECT_GT(fb.weights.row(m).maxCoeff(), 0.0) << m;
}

TEST(MelFilterbank, CentersAreMelEquidistant) {
  const auto fb = narrow_fb();
  const double step = tfr::hz_to_mel(fb.center_frequencies[1]) - tfr::hz_to_mel(fb.center_frequencies[0]);
  for (std::size_t i = 1; i < fb.center_frequencies.size(); ++i) {
    const double d = tfr::hz_to_mel(fb.center_frequencies[i]) - tfr::hz_to_mel(fb.center_frequencies[i - 1]);
    EXPECT_NEAR(d, step, 1e-9);
  }
}

TEST(MelFilterbank, RowsAreUnimodalTriangles) {
  const auto fb = narrow_fb();
  for (Eigen::Index m = 0; m < fb.weights.rows(); ++m) {
    const auto row = fb.weights.row(m);
    Eigen::Index peak;
    row.maxCoeff(&peak);
    for (Eigen::Index k = 1; k <= peak; ++k) ASSERT_GE(row(k), row(k - 1));
    for (Eigen::Index k = peak + 1; k < row.size(); ++k) ASSERT_LE(row(k), row(k - 1));
    ASSERT_LE(row.maxCoeff(), 1.0);
  }
}

TEST(MelFilterbank, TilesInteriorBins) {
  // Bins strictly between f_min and f_max; the outer triangle feet are zero
  // by definition.
  const auto fb = narrow_fb();
  const Eigen::VectorXd total = fb.weights.colwise().sum();
  for (Eigen::Index k = 0; k < 256; ++k) EXPECT_GT(total(k), 0.0) << k;
}

TEST(MelFilterbank, RejectsTooManyBands) {
  EXPECT_THROW(tfr::build_mel_filterbank(512, 257, 22050, 0.0, 11025.0), tfr::Error);
  EXPECT_THROW(tfr::build_mel_filterbank(10, 257, 22050, 500.0, 400.0), tfr::Error);
  EXPECT_THROW(tfr::build_mel_filterbank(10, 257, 22050, 0.0, 12000.0), tfr::Error);
  EXPECT_THROW(tfr::build_mel_filterbank(0, 257, 22050, 0.0, 11025.0), tfr::Error);
}

TEST(MelSpectrogram, ZeroLinearAndNonnegative) {
  const auto fb = narrow_fb();
  tfr::TFRepresentation lin;
  lin.kind = tfr::TfKind::LinearStft;
  lin.values = Eigen::MatrixXd::Zero(257, 5);
  lin.bin_frequencies.assign(257, 0.0);
  EXPECT_EQ(tfr::mel_spectrogram(lin, fb).values.cwiseAbs().maxCoeff(), 0.0);
  lin.values = Eigen::MatrixXd::Random(257, 5).cwiseAbs();
  const auto mel = tfr::mel_spectrogram(lin, fb);
  EXPECT_GE(mel.values.minCoeff(), 0.0);
  EXPECT_EQ(mel.kind, tfr::TfKind::Mel);
  // Linear in the input.
  tfr::TFRepresentation lin2 = lin;
  lin2.values *= 3.0;
  EXPECT_LT((tfr::mel_spectrogram(lin2, fb).values - 3.0 * mel.values).norm(), 1e-12 * mel.values.norm());
  lin.values.resize(256, 5);
  EXPECT_THROW(tfr::mel_spectrogram(lin, fb), std::invalid_argument);
}

TEST(MelSpectrogram, KiloHertzTone) {
  const auto mel = tfr::mel_spectrogram(tone(1000.0), tfr::MelSpec::narrowband());
  std::size_t nearest = 0;
  for (std::size_t m = 0; m < mel.bin_frequencies.size(); ++m)
    if (std::abs(mel.bin_frequencies[m] - 1000.0) < std::abs(mel.bin_frequencies[nearest] - 1000.0))
      nearest = m;
  for (Eigen::Index t = 2; t < mel.values.cols() - 2; ++t) {
    Eigen::Index arg;
    mel.values.col(t).maxCoeff(&arg);
    ASSERT_LE(std::abs(static_cast<long>(arg) - static_cast<long>(nearest)), 1);
  }
}

TEST(Dct, Orthonormal) {
  for (int n : {1, 8, 128}) {
    const auto d = tfr::dct2_matrix(n);
    EXPECT_LT((d * d.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::VectorXd v = Eigen::VectorXd::Random(n);
    EXPECT_LT((d.transpose() * (d * v) - v).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Mfcc, ConstantLogMel) {
  const double c = 1.7;
  tfr::TFRepresentation mel;
  mel.kind = tfr::TfKind::Mel;
  mel.values = Eigen::MatrixXd::Constant(128, 3, std::exp(c) - 1e-10);
  mel.bin_frequencies.assign(128, 0.0);
  const auto m = tfr::mfcc_from_mel(mel, 40, 1e-10);
  ASSERT_EQ(m.values.rows(), 40);
  for (Eigen::Index t = 0; t < 3; ++t) {
    EXPECT_NEAR(m.values(0, t), c * std::sqrt(128.0), 1e-9);
    for (Eigen::Index j = 1; j < 40; ++j) EXPECT_NEAR(m.values(j, t), 0.0, 1e-9);
  }
}

TEST(Mfcc, EqualsIndependentComposition) {
  auto clip = tone(440.0);
  std::mt19937 gen(5);
  std::normal_distribution<double> n(0.0, 0.05);
  for (auto& v : clip.samples) v += n(gen);
  const auto got = tfr::mfcc(clip, tfr::MfccSpec{});
  const auto mel = tfr::mel_spectrogram(clip, tfr::MelSpec::narrowband()).values;
  ASSERT_EQ(got.values.rows(), 40);
  ASSERT_EQ(got.values.cols(), mel.cols());
  const int M = 128;
  for (Eigen::Index t = 0; t < mel.cols(); t += 17) {
    for (int j = 0; j < 40; ++j) {
      double acc = 0.0;
      for (int i = 0; i < M; ++i)
        acc += std::log(mel(i, t) + 1e-10) * std::cos(oracle::kPi * j * (i + 0.5) / M);
      acc *= std::sqrt((j == 0 ? 1.0 : 2.0) / M);
      ASSERT_NEAR(got.values(j, t), acc, 1e-9 * (1.0 + std::abs(acc)));
    }
  }
}

TEST(Mfcc, SilenceGivesIdenticalColumns) {
  tfr::AudioClip silence;
  silence.samples.assign(tfr::kCanonicalLength, 0.0);
  const auto m = tfr::mfcc(silence, tfr::MfccSpec{});
  for (Eigen::Index t = 1; t < m.values.cols(); ++t) ASSERT_EQ(m.values.col(t), m.values.col(0));
}

TEST(Mfcc, RejectsTooManyCoefficients) {
  tfr::MfccSpec spec;
  spec.n_coeffs = 129;
  EXPECT_THROW(tfr::mfcc(tone(100.0), spec), std::invalid_argument);
}
