#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "soilmine/dataset.hpp"
#include "soilmine/format.hpp"
#include "soilmine/rng.hpp"
#include "soilmine/synth.hpp"

using namespace soilmine;

namespace {

const std::string kHeader = "Ph,EC,OC,P,K,Fe,Zn,Mn,Cu";

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Empty;
}

template <typename F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(ErrorCode::Empty, "");
}

Dataset parse(const std::string& text, bool labels = false,
              ImputeStrategy s = ImputeStrategy::Reject) {
  return impute_missing(parse_csv(text, labels), s);
}

}  // namespace

// SplitMix64 reference outputs for seed 0 (Steele, Lea and Flood's published
// test vector, reproduced by every standard implementation).
TEST(Rng, SplitMix64MatchesReferenceStream) {
  SplitMix64 r(0);
  EXPECT_EQ(r.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(r.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(r.next(), 0x06c45d188009454fULL);
}

TEST(Rng, UniformAndBelowStayInRange) {
  SplitMix64 r(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.below(6), 6u);
  }
}

TEST(Rng, GaussianMomentsAreStandard) {
  SplitMix64 r(11);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double g = r.gaussian();
    sum += g;
    sq += g * g;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Rng, ShuffleIsAPermutationAndSeeded) {
  std::vector<int> a(50), b(50);
  for (int i = 0; i < 50; ++i) a[i] = b[i] = i;
  SplitMix64 r1(3), r2(3);
  r1.shuffle(std::span<int>(a));
  r2.shuffle(std::span<int>(b));
  EXPECT_EQ(a, b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Format, FixedStripsNegativeZero) {
  EXPECT_EQ(format_fixed(-0.0001, 3), "0.000");
  EXPECT_EQ(format_fixed(-1.0225, 2), "-1.02");
  EXPECT_EQ(format_shortest(0.1), "0.1");
}

TEST(Format, ParseDoubleRejectsJunk) {
  EXPECT_EQ(parse_double(" 4.5 "), 4.5);
  EXPECT_EQ(parse_double("+2"), 2.0);
  EXPECT_FALSE(parse_double("4.5x"));
  EXPECT_FALSE(parse_double("nan"));
  EXPECT_FALSE(parse_double(""));
}

TEST(Attributes, NamesParseCaseInsensitively) {
  EXPECT_EQ(parse_attribute("ph"), Attribute::Ph);
  EXPECT_EQ(parse_attribute("CU"), Attribute::Cu);
  EXPECT_FALSE(parse_attribute("N"));
  EXPECT_EQ(parse_class("Moderately High"), FertilityClass::ModeratelyHigh);
  EXPECT_FALSE(parse_class("moderately high"));
}

TEST(LoadCsv, MinimalFileGivesOneUnlabeledRow) {
  const Dataset d = parse(kHeader + "\n7.1,0.3,0.6,10,200,5,1,4,1.2\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_FALSE(d.labeled());
  EXPECT_DOUBLE_EQ(d.rows[0].ph(), 7.1);
  EXPECT_DOUBLE_EQ(d.rows[0].k(), 200.0);
  EXPECT_DOUBLE_EQ(d.rows[0].cu(), 1.2);
}

TEST(LoadCsv, PhAboveFourteenIsBadValueAtRowOne) {
  const Error e = error_of([] { parse(kHeader + "\n15.2,0.3,0.6,10,200,5,1,4,1.2\n"); });
  EXPECT_EQ(e.code(), ErrorCode::BadValue);
  EXPECT_EQ(e.row(), 1u);
  EXPECT_EQ(e.column(), "Ph");
}

TEST(LoadCsv, LabelsKeptInFileOrder) {
  const std::string text = kHeader + ",Fertility\n"
                           "7,0.3,0.6,10,200,5,1,4,1,High\n"
                           "6,0.2,0.4,8,100,5,1,4,1,Low\n"
                           "6.5,0.2,0.5,9,150,5,1,4,1,Moderate\n";
  const Dataset d = parse(text, true);
  ASSERT_TRUE(d.labeled());
  EXPECT_EQ(*d.labels, (std::vector<FertilityClass>{FertilityClass::High, FertilityClass::Low,
                                                    FertilityClass::Moderate}));
}

TEST(LoadCsv, HeaderCaseAndOrderAndExtraColumns) {
  const Dataset d = parse("cu,mn,zn,fe,k,p,oc,ec,ph,site\n1,2,3,4,5,6,0.7,0.8,6.9,Khed\n");
  EXPECT_DOUBLE_EQ(d.rows[0].ph(), 6.9);
  EXPECT_DOUBLE_EQ(d.rows[0].cu(), 1.0);
  EXPECT_DOUBLE_EQ(d.rows[0].p(), 6.0);
}

TEST(LoadCsv, StructuralErrors) {
  EXPECT_EQ(code_of([] { parse("Ph,EC,OC,P,K,Fe,Zn,Mn\n1,1,1,1,1,1,1,1\n"); }), ErrorCode::MissingColumn);
  EXPECT_EQ(code_of([] { parse(kHeader + ",ph\n1,1,1,1,1,1,1,1,1,1\n"); }), ErrorCode::DuplicateColumn);
  EXPECT_EQ(code_of([] { parse(kHeader + "\n7,1,1,1,1,1,1,1,1\n", true); }), ErrorCode::MissingLabel);
  EXPECT_EQ(code_of([] { parse(kHeader + ",Fertility\n7,1,1,1,1,1,1,1,1,Great\n", true); }),
            ErrorCode::BadValue);
  EXPECT_EQ(code_of([] { parse(kHeader + "\n7,1,1,1,1,1,1,1\n"); }), ErrorCode::BadValue);
  EXPECT_EQ(code_of([] { parse(kHeader + "\n7,1,abc,1,1,1,1,1,1\n"); }), ErrorCode::BadValue);
  EXPECT_EQ(code_of([] { parse(kHeader + "\n7,-1,1,1,1,1,1,1,1\n"); }), ErrorCode::BadValue);
}

TEST(LoadCsv, MissingFileIsIoError) {
  EXPECT_EQ(code_of([] { load_csv("/nonexistent/soil.csv", false); }), ErrorCode::Io);
}

TEST(Impute, NoGapsIsIdentityUnderBothStrategies) {
  const std::string text = kHeader + "\n7,1,1,1,100,1,1,1,1\n6,1,1,1,300,1,1,1,1\n";
  EXPECT_EQ(parse(text, false, ImputeStrategy::Reject), parse(text, false, ImputeStrategy::ColumnMean));
}

TEST(Impute, ColumnMeanFillsGap) {
  const Dataset d = parse(kHeader + "\n7,1,1,1,100,1,1,1,1\n7,1,1,1,?,1,1,1,1\n7,1,1,1,300,1,1,1,1\n",
                          false, ImputeStrategy::ColumnMean);
  EXPECT_DOUBLE_EQ(d.rows[1].k(), 200.0);
}

TEST(Impute, RejectReportsLocation) {
  const Error e = error_of([] { parse(kHeader + "\n7,1,1,1,100,1,1,1,1\n7,1,1,1,,1,1,1,1\n"); });
  EXPECT_EQ(e.code(), ErrorCode::MissingValue);
  EXPECT_EQ(e.row(), 2u);
  EXPECT_EQ(e.column(), "K");
}

TEST(Impute, AllMissingColumnIsEmptyColumn) {
  const std::string text = kHeader + "\n7,1,1,1,?,1,1,1,1\n7,1,1,1,?,1,1,1,1\n7,1,1,1,?,1,1,1,1\n";
  const Error e = error_of([&] { parse(text, false, ImputeStrategy::ColumnMean); });
  EXPECT_EQ(e.code(), ErrorCode::EmptyColumn);
  EXPECT_EQ(e.column(), "K");
}

TEST(Impute, ColumnMeanKeepsCompleteColumnMeans) {
  const Dataset d = parse(kHeader + "\n7,1,1,2,100,1,1,1,1\n6,?,1,4,?,1,1,1,1\n5,3,1,9,300,1,1,1,1\n",
                          false, ImputeStrategy::ColumnMean);
  const auto s = dataset_summary(d);
  EXPECT_DOUBLE_EQ(s.attributes[index_of(Attribute::P)].mean, 5.0);
  EXPECT_DOUBLE_EQ(s.attributes[index_of(Attribute::EC)].mean, 2.0);
}

TEST(WriteCsv, RoundTripIsExact) {
  auto cfg = default_synth_config();
  cfg.n = 200;
  Dataset d = generate_synthetic(cfg);
  d.labels.emplace();
  for (std::size_t i = 0; i < d.size(); ++i) d.labels->push_back(class_at(i % kNumClasses));
  const Dataset back = parse(to_csv(d), true);
  EXPECT_EQ(back.rows, d.rows);
  EXPECT_EQ(back.labels, d.labels);
}

TEST(WriteCsv, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "soilmine_core_data_rt.csv";
  auto cfg = default_synth_config();
  cfg.n = 5;
  const Dataset d = generate_synthetic(cfg);
  write_csv_file(d, path.string());
  EXPECT_EQ(load_csv(path.string(), false).rows, d.rows);
  std::filesystem::remove(path);
}

TEST(Summary, SingleRowHasZeroStddev) {
  const auto s = dataset_summary(parse(kHeader + "\n7,1,1,1,100,1,1,1,1\n"));
  const auto& k = s.attributes[index_of(Attribute::K)];
  EXPECT_EQ(k.min, 100.0);
  EXPECT_EQ(k.max, 100.0);
  EXPECT_EQ(k.mean, 100.0);
  EXPECT_EQ(k.stddev, 0.0);
}

TEST(Summary, TextbookK) {
  const auto s = dataset_summary(parse(kHeader + "\n7,1,1,1,100,1,1,1,1\n7,1,1,1,200,1,1,1,1\n7,1,1,1,300,1,1,1,1\n"));
  EXPECT_DOUBLE_EQ(s.attributes[index_of(Attribute::K)].mean, 200.0);
  EXPECT_DOUBLE_EQ(s.attributes[index_of(Attribute::K)].stddev, 100.0);
}

TEST(Summary, TenRowFixtureMatchesHandValues) {
  std::string text = kHeader + ",Fertility\n";
  const double ph[10] = {4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0, 8.5, 9.0};
  for (int i = 0; i < 10; ++i) {
    text += format_shortest(ph[i]) + ",1,1,1,1,1,1,1,1," + std::string(kClassNames[i % 3]) + "\n";
  }
  const auto s = dataset_summary(parse(text, true));
  const auto& a = s.attributes[index_of(Attribute::Ph)];
  EXPECT_DOUBLE_EQ(a.mean, 6.75);
  // sum of squared deviations = 0.25 * (4.5^2+3.5^2+2.5^2+1.5^2+0.5^2)*2 = 20.625
  EXPECT_NEAR(a.stddev, std::sqrt(20.625 / 9.0), 1e-12);
  ASSERT_TRUE(s.class_histogram);
  EXPECT_EQ((*s.class_histogram)[0], 4u);
  EXPECT_EQ((*s.class_histogram)[1], 3u);
  EXPECT_EQ((*s.class_histogram)[2], 3u);
}

TEST(Summary, EmptyDatasetRejected) {
  EXPECT_EQ(code_of([] { dataset_summary(Dataset{}); }), ErrorCode::EmptyDataset);
}

TEST(Synth, NoiseFreeConstantRow) {
  SynthConfig cfg = default_synth_config();
  cfg.n = 1;
  cfg.p_noise_sd = 0.0;
  cfg.p_coefficients.fill(0.0);
  cfg.p_intercept = 7.0;
  const Dataset d = generate_synthetic(cfg);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.rows[0].p(), 7.0);
}

TEST(Synth, DeterministicAndSeedSensitive) {
  auto cfg = default_synth_config();
  cfg.n = 300;
  EXPECT_EQ(generate_synthetic(cfg), generate_synthetic(cfg));
  auto other = cfg;
  other.seed = 43;
  EXPECT_NE(generate_synthetic(cfg).rows, generate_synthetic(other).rows);
}

TEST(Synth, NoiseFreePCorrelatesPerfectlyWithFormula) {
  auto cfg = default_synth_config();
  cfg.n = 1000;
  cfg.p_noise_sd = 0.0;
  const Dataset d = generate_synthetic(cfg);
  const auto others = predictors_of(Attribute::P);
  // one-pass Welford co-moment, independent of the library's correlation
  double mx = 0, my = 0, cxx = 0, cyy = 0, cxy = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double x = 0.0;
    for (std::size_t j = 0; j < others.size(); ++j) x += cfg.p_coefficients[j] * d.rows[i][others[j]];
    const double y = d.rows[i].p();
    const double n = static_cast<double>(i + 1);
    const double dx = x - mx, dy = y - my;
    mx += dx / n;
    my += dy / n;
    cxx += dx * (x - mx);
    cyy += dy * (y - my);
    cxy += dx * (y - my);
  }
  EXPECT_NEAR(cxy / std::sqrt(cxx * cyy), 1.0, 1e-9);
}

TEST(Synth, ValuesRespectRangesAndInvariants) {
  const auto cfg = default_synth_config();
  const Dataset d = generate_synthetic(cfg);
  EXPECT_EQ(d.size(), 1988u);
  for (const auto& r : d.rows) {
    ASSERT_TRUE(valid_sample(r));
    for (Attribute a : predictors_of(Attribute::P)) {
      ASSERT_GE(r[a], cfg.ranges[index_of(a)].min);
      ASSERT_LE(r[a], cfg.ranges[index_of(a)].max);
    }
  }
}

TEST(Synth, InvalidConfigNamesField) {
  auto cfg = default_synth_config();
  cfg.n = 0;
  EXPECT_EQ(error_of([&] { generate_synthetic(cfg); }).column(), "n");
  cfg = default_synth_config();
  cfg.p_noise_sd = -1;
  EXPECT_EQ(error_of([&] { generate_synthetic(cfg); }).column(), "p_noise_sd");
  cfg = default_synth_config();
  cfg.ranges[index_of(Attribute::Ph)] = {5.0, 15.0};
  EXPECT_EQ(error_of([&] { generate_synthetic(cfg); }).column(), "ranges.Ph");
  cfg = default_synth_config();
  cfg.label_noise = 1.0;
  EXPECT_EQ(error_of([&] { generate_synthetic(cfg); }).code(), ErrorCode::InvalidConfig);
}

TEST(LabelNoise, FlipsExactlyTheRoundedCount) {
  auto cfg = default_synth_config();
  cfg.n = 1000;
  Dataset d = generate_synthetic(cfg);
  d.labels.emplace(d.size(), FertilityClass::Moderate);
  const Dataset noisy = inject_label_noise(d, 0.05, 9);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < d.size(); ++i) changed += (*noisy.labels)[i] != (*d.labels)[i];
  EXPECT_EQ(changed, 50u);
  EXPECT_EQ(noisy.rows, d.rows);
  EXPECT_EQ(inject_label_noise(d, 0.05, 9), noisy);
}

TEST(Dataset, SubsetKeepsRowsAndLabelsAligned) {
  Dataset d = parse(kHeader + ",Fertility\n7,1,1,1,1,1,1,1,1,Low\n6,1,1,1,1,1,1,1,1,High\n5,1,1,1,1,1,1,1,1,Moderate\n",
                    true);
  const std::vector<std::size_t> idx{2, 0};
  const Dataset s = subset(d, idx);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.rows[0].ph(), 5.0);
  EXPECT_EQ((*s.labels)[0], FertilityClass::Moderate);
  EXPECT_EQ((*s.labels)[1], FertilityClass::Low);
}
