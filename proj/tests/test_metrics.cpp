#include <doctest.h>

#include <algorithm>

#include "lesionbench/error.hpp"
#include "lesionbench/metrics.hpp"
#include "lesionbench/rng.hpp"
#include "test_helpers.hpp"

using namespace lesionbench;
using testutil::random_mask;

namespace {

MaskPair make_pair_with_jaccard(double target, int size, std::string id) {
  // Ground truth: full row of `size` pixels; prediction: the first
  // round(target*size) of them. Jaccard = overlap / size.
  BinaryMask gt(size, 1), pred(size, 1);
  for (int x = 0; x < size; ++x) gt.set(x, 0, true);
  int overlap = static_cast<int>(std::lround(target * size));
  for (int x = 0; x < overlap; ++x) pred.set(x, 0, true);
  if (overlap == 0) {
    // fully disjoint prediction to avoid the empty-mask special case
    pred = BinaryMask(size, 1);
  }
  return {std::move(gt), std::move(pred), std::move(id)};
}

}  // namespace

TEST_CASE("label and attribute enumerations are fixed") {
  CHECK(label_name(DiagnosisLabel::kMel) == "MEL");
  CHECK(label_name(DiagnosisLabel::kVasc) == "VASC");
  CHECK(label_from_name("AKIEC") == DiagnosisLabel::kAkiec);
  CHECK_FALSE(label_from_name("XYZ").has_value());
  CHECK(all_labels().size() == 7);

  CHECK(attribute_name(AttributeClass::kPigmentNetwork) == "pigment_network");
  CHECK(attribute_from_name("streaks") == AttributeClass::kStreaks);
  CHECK(all_attribute_classes().size() == 5);
}

TEST_CASE("boundary score is the mean of per-pair jaccards") {
  std::vector<MaskPair> pairs;
  pairs.push_back(make_pair_with_jaccard(1.0, 10, "a"));
  pairs.push_back(make_pair_with_jaccard(0.0, 10, "b"));
  CHECK(boundary_score(pairs) == doctest::Approx(0.5).epsilon(1e-12));

  std::vector<MaskPair> perfect;
  SplitMix64 rng(11);
  for (int i = 0; i < 5; ++i) {
    BinaryMask m = random_mask(rng, 12, 9, 0.4);
    perfect.push_back({m, m, "img" + std::to_string(i)});
  }
  CHECK(boundary_score(perfect) == 1.0);

  CHECK_THROWS_AS(boundary_score({}), UndefinedScoreError);
}

TEST_CASE("boundary score stays within the per-pair range") {
  SplitMix64 rng(123);
  std::vector<MaskPair> pairs;
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 20; ++i) {
    BinaryMask gt = random_mask(rng, 16, 16, 0.5);
    BinaryMask pred = random_mask(rng, 16, 16, 0.5);
    double j = jaccard(gt, pred);
    lo = std::min(lo, j);
    hi = std::max(hi, j);
    pairs.push_back({std::move(gt), std::move(pred), std::to_string(i)});
  }
  double s1 = boundary_score(pairs);
  CHECK(s1 >= lo);
  CHECK(s1 <= hi);
}

TEST_CASE("attribute class score applies the empty-ground-truth exclusion") {
  // One pair with Jaccard 0.4 and one empty-ground-truth pair -> 0.4.
  std::vector<MaskPair> pairs;
  pairs.push_back(make_pair_with_jaccard(0.4, 10, "scored"));
  BinaryMask empty_gt(10, 1);
  BinaryMask some_pred(10, 1);
  some_pred.set(0, 0, true);
  pairs.push_back({empty_gt, some_pred, "excluded"});

  auto score = attribute_class_score(pairs, AttributeClass::kGlobules);
  REQUIRE(score.has_value());
  CHECK(*score == doctest::Approx(0.4).epsilon(1e-12));

  // All ground truths empty -> undefined.
  std::vector<MaskPair> all_empty;
  all_empty.push_back({BinaryMask(4, 4), BinaryMask(4, 4), "x"});
  CHECK_FALSE(
      attribute_class_score(all_empty, AttributeClass::kStreaks).has_value());

  // Perfect predictions on non-empty ground truths -> 1.0.
  std::vector<MaskPair> perfect;
  SplitMix64 rng(3);
  for (int i = 0; i < 4; ++i) {
    BinaryMask m = random_mask(rng, 8, 8, 0.5);
    m.set(0, 0, true);
    perfect.push_back({m, m, std::to_string(i)});
  }
  CHECK(attribute_class_score(perfect, AttributeClass::kGlobules) == 1.0);
}

TEST_CASE("exclusion rule: padding with empty-ground-truth pairs is a no-op") {
  SplitMix64 rng(77);
  for (int scenario = 0; scenario < 30; ++scenario) {
    std::vector<MaskPair> pairs;
    int n = 1 + static_cast<int>(rng.next_below(6));
    for (int i = 0; i < n; ++i) {
      BinaryMask gt = random_mask(rng, 10, 10, 0.5);
      gt.set(0, 0, true);
      pairs.push_back({std::move(gt), random_mask(rng, 10, 10, 0.5), "p"});
    }
    auto base = attribute_class_score(pairs, AttributeClass::kGlobules);
    int extra = 1 + static_cast<int>(rng.next_below(5));
    for (int i = 0; i < extra; ++i) {
      pairs.push_back(
          {BinaryMask(10, 10), random_mask(rng, 10, 10, 0.5), "pad"});
    }
    auto padded = attribute_class_score(pairs, AttributeClass::kGlobules);
    REQUIRE(base.has_value());
    REQUIRE(padded.has_value());
    CHECK(*base == *padded);
  }
}

TEST_CASE("overall attribute score averages the reference values to 0.2800") {
  std::array<std::optional<double>, kAttributeClassCount> per_class = {
      0.2610, 0.2120, 0.3082, 0.3725, 0.2462};
  double s2 = attribute_overall_score(per_class);
  CHECK(s2 == doctest::Approx(0.27998).epsilon(1e-12));
  CHECK(round_half_up(s2, 4) == doctest::Approx(0.2800));
}

TEST_CASE("overall attribute score edge cases") {
  std::array<std::optional<double>, kAttributeClassCount> ones = {
      1.0, 1.0, 1.0, 1.0, 1.0};
  CHECK(attribute_overall_score(ones) == 1.0);

  std::array<std::optional<double>, kAttributeClassCount> skewed = {
      0.0, 0.0, 0.0, 0.0, 1.0};
  CHECK(attribute_overall_score(skewed) == doctest::Approx(0.2));

  std::array<std::optional<double>, kAttributeClassCount> undefined = {
      0.5, std::nullopt, 0.5, 0.5, 0.5};
  CHECK_THROWS_WITH_AS(attribute_overall_score(undefined),
                       doctest::Contains("milia_like_cyst"),
                       UndefinedScoreError);
}

TEST_CASE("overall attribute score is permutation invariant") {
  std::array<std::optional<double>, kAttributeClassCount> values = {
      0.1, 0.2, 0.3, 0.4, 0.5};
  double base = attribute_overall_score(values);
  std::array<double, kAttributeClassCount> plain = {0.1, 0.2, 0.3, 0.4, 0.5};
  std::sort(plain.begin(), plain.end(), std::greater<>());
  std::array<std::optional<double>, kAttributeClassCount> permuted;
  for (int i = 0; i < kAttributeClassCount; ++i) permuted[i] = plain[i];
  CHECK(attribute_overall_score(permuted) == doctest::Approx(base));
}

TEST_CASE("diagnosis accuracy") {
  using L = DiagnosisLabel;
  std::vector<L> truths = {L::kMel, L::kNv, L::kBcc, L::kDf};
  std::vector<L> correct = truths;
  CHECK(diagnosis_accuracy(correct, truths) == 1.0);

  std::vector<L> three_of_four = {L::kMel, L::kNv, L::kBcc, L::kVasc};
  CHECK(diagnosis_accuracy(three_of_four, truths) == doctest::Approx(0.75));

  CHECK_THROWS_AS(diagnosis_accuracy(std::vector<L>{L::kMel}, truths),
                  DimensionError);
  CHECK_THROWS_AS(diagnosis_accuracy(std::vector<L>{}, std::vector<L>{}),
                  UndefinedScoreError);
}

TEST_CASE("confusion matrix counts and row normalization") {
  using L = DiagnosisLabel;
  std::vector<L> truths, preds;
  for (auto label : all_labels()) {
    truths.push_back(label);
    preds.push_back(label);
  }
  ConfusionMatrix cm = confusion(preds, truths);
  auto norm = cm.row_normalized();
  for (int i = 0; i < kDiagnosisClassCount; ++i) {
    for (int j = 0; j < kDiagnosisClassCount; ++j) {
      CHECK(norm[i][j] == (i == j ? 1.0 : 0.0));
    }
  }
  CHECK(balanced_accuracy(cm) == 1.0);

  ConfusionMatrix single = confusion(std::vector<L>{L::kNv},
                                     std::vector<L>{L::kMel});
  CHECK(single.count(L::kMel, L::kNv) == 1);
  auto snorm = single.row_normalized();
  CHECK(snorm[0][1] == 1.0);
  for (int j = 0; j < kDiagnosisClassCount; ++j) {
    if (j != 1) CHECK(snorm[0][j] == 0.0);
  }
}

TEST_CASE("row-normalized rows sum to one when populated") {
  SplitMix64 rng(42);
  ConfusionMatrix cm;
  for (int i = 0; i < 500; ++i) {
    auto actual = static_cast<DiagnosisLabel>(rng.next_below(7));
    auto predicted = static_cast<DiagnosisLabel>(rng.next_below(7));
    cm.add(actual, predicted);
  }
  auto norm = cm.row_normalized();
  for (auto label : all_labels()) {
    if (cm.row_total(label) == 0) continue;
    double sum = 0.0;
    for (int j = 0; j < kDiagnosisClassCount; ++j) {
      sum += norm[static_cast<int>(label)][j];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

// Reference row-normalized confusion matrix, MEL..VASC by MEL..VASC.
static const double kReferenceConfusion[7][7] = {
    {0.7544, 0.1754, 0.0132, 0.0132, 0.0395, 0.0, 0.0044},
    {0.0524, 0.9248, 0.0068, 0.0015, 0.0106, 0.0023, 0.0015},
    {0.0693, 0.0396, 0.7228, 0.0594, 0.0594, 0.0297, 0.0198},
    {0.2308, 0.0154, 0.0769, 0.4615, 0.1538, 0.0615, 0.0},
    {0.1595, 0.125, 0.0302, 0.0086, 0.6509, 0.0259, 0.0},
    {0.0714, 0.25, 0.0357, 0.0714, 0.0, 0.5714, 0.0},
    {0.0, 0.0667, 0.0, 0.0, 0.0, 0.0333, 0.9},
};

TEST_CASE("balanced accuracy of the reference confusion matrix is 0.7123") {
  // Counts drawn to match the reference row fractions at 10000 per row.
  ConfusionMatrix cm;
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      auto count =
          static_cast<std::uint64_t>(std::lround(kReferenceConfusion[i][j] * 1e4));
      if (count > 0) {
        cm.add(static_cast<DiagnosisLabel>(i), static_cast<DiagnosisLabel>(j),
               count);
      }
    }
  }
  // Round trip: normalization reproduces the reference entries.
  auto norm = cm.row_normalized();
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      CHECK(norm[i][j] == doctest::Approx(kReferenceConfusion[i][j]).epsilon(5e-4));
    }
  }
  CHECK(norm[1][1] == doctest::Approx(0.9248).epsilon(5e-4));  // NV->NV
  CHECK(norm[3][0] == doctest::Approx(0.2308).epsilon(5e-4));  // AKIEC->MEL

  // Mean of the reference diagonal:
  // (0.7544+0.9248+0.7228+0.4615+0.6509+0.5714+0.9)/7 = 0.712257...
  CHECK(balanced_accuracy(cm) == doctest::Approx(0.71226).epsilon(1e-3));
}

TEST_CASE("balanced accuracy excludes empty rows with a warning") {
  ConfusionMatrix cm;
  cm.add(DiagnosisLabel::kMel, DiagnosisLabel::kMel, 8);
  cm.add(DiagnosisLabel::kMel, DiagnosisLabel::kNv, 2);
  cm.add(DiagnosisLabel::kNv, DiagnosisLabel::kNv, 5);
  std::vector<std::string> warnings;
  double bacc = balanced_accuracy(cm, &warnings);
  CHECK(bacc == doctest::Approx((0.8 + 1.0) / 2));
  CHECK(warnings.size() == 5);  // BCC..VASC are empty

  ConfusionMatrix empty;
  CHECK_THROWS_AS(balanced_accuracy(empty), UndefinedScoreError);
}

TEST_CASE("uniform random predictions score about 1/7 balanced accuracy") {
  // Monte-Carlo oracle: balanced classes, uniform predictions.
  SplitMix64 rng(20240501);
  std::vector<DiagnosisLabel> truths, preds;
  for (int i = 0; i < 10000; ++i) {
    truths.push_back(static_cast<DiagnosisLabel>(i % 7));
    preds.push_back(static_cast<DiagnosisLabel>(rng.next_below(7)));
  }
  double bacc = balanced_accuracy(confusion(preds, truths));
  CHECK(bacc == doctest::Approx(1.0 / 7.0).epsilon(0.15));
  CHECK(std::abs(bacc - 1.0 / 7.0) < 0.02);
}

TEST_CASE("balanced accuracy ignores class duplication, plain accuracy not") {
  using L = DiagnosisLabel;
  // MEL recall 1/2, NV recall 1. Duplicating every MEL sample leaves both
  // recalls alone but shifts the plain accuracy.
  std::vector<L> truths = {L::kMel, L::kMel, L::kNv};
  std::vector<L> preds = {L::kMel, L::kNv, L::kNv};
  double bacc_before = balanced_accuracy(confusion(preds, truths));
  double acc_before = diagnosis_accuracy(preds, truths);

  std::vector<L> truths2 = {L::kMel, L::kMel, L::kMel, L::kMel, L::kNv};
  std::vector<L> preds2 = {L::kMel, L::kNv, L::kMel, L::kNv, L::kNv};
  double bacc_after = balanced_accuracy(confusion(preds2, truths2));
  double acc_after = diagnosis_accuracy(preds2, truths2);

  CHECK(bacc_before == doctest::Approx(bacc_after).epsilon(1e-12));
  CHECK(acc_before != doctest::Approx(acc_after).epsilon(1e-6));
}

TEST_CASE("diagnosis accuracy equals the diagonal mass of the confusion") {
  SplitMix64 rng(8);
  std::vector<DiagnosisLabel> truths, preds;
  for (int i = 0; i < 300; ++i) {
    truths.push_back(static_cast<DiagnosisLabel>(rng.next_below(7)));
    preds.push_back(static_cast<DiagnosisLabel>(rng.next_below(7)));
  }
  ConfusionMatrix cm = confusion(preds, truths);
  std::uint64_t diagonal = 0;
  for (auto label : all_labels()) diagonal += cm.count(label, label);
  CHECK(diagnosis_accuracy(preds, truths) ==
        doctest::Approx(static_cast<double>(diagonal) / cm.total())
            .epsilon(1e-12));
}

TEST_CASE("half-up rounding and fixed formatting") {
  CHECK(round_half_up(0.27998, 4) == doctest::Approx(0.2800));
  CHECK(round_half_up(0.00005, 4) == doctest::Approx(0.0001));
  CHECK(round_half_up(0.12344, 4) == doctest::Approx(0.1234));
  CHECK(format_fixed(1.0 / 7.0, 4) == "0.1429");
  CHECK(format_fixed(1.0, 4) == "1.0000");
  CHECK(format_fixed(0.0, 4) == "0.0000");
}
