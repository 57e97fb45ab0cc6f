#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "metrics/metrics.hpp"

using namespace mipred;
using metrics::LabelMatrix;

namespace {

const std::vector<std::string> kNames = {"m1", "m2", "m3", "m4", "m5", "m6", "infeasible"};

LabelMatrix random_labels(std::mt19937_64& rng, int n, int width, double p_one) {
    std::bernoulli_distribution coin(p_one);
    LabelMatrix m(n, std::vector<int>(width, 0));
    for (auto& row : m) {
        for (auto& v : row) v = coin(rng) ? 1 : 0;
    }
    return m;
}

double row_sum(const std::vector<double>& row) {
    double s = 0.0;
    for (double v : row) s += v;
    return s;
}

}  // namespace

TEST_CASE("perfect prediction maxes every metric") {
    std::mt19937_64 rng(7);
    LabelMatrix truth = random_labels(rng, 12, 7, 0.4);
    truth[0] = {0, 0, 0, 0, 0, 0, 0};  // include an all-empty row
    metrics::MetricsReport rep = metrics::evaluate(truth, truth, kNames);
    CHECK(rep.hamming_loss == doctest::Approx(0.0));
    CHECK(rep.jaccard_index == doctest::Approx(1.0));
    CHECK(rep.sample_accuracy == doctest::Approx(1.0));
    CHECK(rep.micro_precision == doctest::Approx(1.0));
    CHECK(rep.micro_recall == doctest::Approx(1.0));
    CHECK(rep.micro_f1 == doctest::Approx(1.0));

    metrics::MlcmMatrix m = metrics::mlcm_confusion(truth, truth, kNames);
    for (size_t r = 0; r < m.counts.size(); ++r) {
        for (size_t c = 0; c < m.counts[r].size(); ++c) {
            if (r != c) CHECK(m.counts[r][c] == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("single flipped label across two samples gives hamming 1/14") {
    LabelMatrix truth = {{1, 0, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0, 0}};
    LabelMatrix pred = truth;
    pred[1][2] = 1;
    CHECK(metrics::hamming_loss(truth, pred) == doctest::Approx(1.0 / 14.0));
    CHECK(metrics::sample_accuracy(truth, pred) == doctest::Approx(0.5));
}

TEST_CASE("jaccard of true {m2} vs predicted {m2,m3} is one half") {
    LabelMatrix truth = {{0, 1, 0, 0, 0, 0, 0}};
    LabelMatrix pred = {{0, 1, 1, 0, 0, 0, 0}};
    CHECK(metrics::jaccard_index(truth, pred) == doctest::Approx(0.5));
}

TEST_CASE("hand tally on a four-sample fixture") {
    // One false positive on m3 (sample 2) and one false negative on m1 (sample 3).
    LabelMatrix truth = {
        {1, 0, 0, 0, 0, 0, 0},
        {0, 1, 0, 0, 0, 0, 0},
        {1, 1, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 1},
    };
    LabelMatrix pred = {
        {1, 0, 0, 0, 0, 0, 0},
        {0, 1, 1, 0, 0, 0, 0},
        {0, 1, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 1},
    };
    metrics::MetricsReport rep = metrics::evaluate(truth, pred, kNames);
    // m1: tp 1, fp 0, fn 1 -> precision 1, recall 0.5.
    CHECK(rep.per_label[0].precision == doctest::Approx(1.0));
    CHECK(rep.per_label[0].recall == doctest::Approx(0.5));
    CHECK(rep.per_label[0].support == 2);
    // m3: tp 0, fp 1, fn 0 -> precision 0, recall 0 with support 0.
    CHECK(rep.per_label[2].precision == doctest::Approx(0.0));
    CHECK(rep.per_label[2].recall == doctest::Approx(0.0));
    CHECK(rep.per_label[2].support == 0);
    // Pooled: tp 4, predicted 5, true 5.
    CHECK(rep.micro_precision == doctest::Approx(4.0 / 5.0));
    CHECK(rep.micro_recall == doctest::Approx(4.0 / 5.0));
    // Samples: accuracy 2/4; hamming (0+1+1+0)/(4*7).
    CHECK(rep.sample_accuracy == doctest::Approx(0.5));
    CHECK(rep.hamming_loss == doctest::Approx(2.0 / 28.0));
    // Sample precision: 1 + 1/2 + 1 + 1 over 4; recall: 1 + 1 + 1/2 + 1 over 4.
    CHECK(rep.sample_precision == doctest::Approx(3.5 / 4.0));
    CHECK(rep.sample_recall == doctest::Approx(3.5 / 4.0));
}

TEST_CASE("macro and micro deliberately differ on an imbalanced fixture") {
    // m1 is common and predicted well; m2 is rare and predicted badly.
    LabelMatrix truth = {
        {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {0, 1}, {0, 1}};
    LabelMatrix pred = {
        {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {0, 0}};
    metrics::MetricsReport rep = metrics::evaluate(truth, pred, {"m1", "m2"});
    // m1: tp 8, fp 1 -> p 8/9, r 1. m2: tp 0 -> p 0, r 0.
    CHECK(rep.macro_precision == doctest::Approx(0.5 * (8.0 / 9.0)));
    CHECK(rep.macro_recall == doctest::Approx(0.5));
    CHECK(rep.micro_precision == doctest::Approx(8.0 / 9.0));
    CHECK(rep.micro_recall == doctest::Approx(8.0 / 10.0));
    CHECK(rep.macro_precision != doctest::Approx(rep.micro_precision));
    // Weighted recall always equals micro recall (support-weighted identity).
    CHECK(rep.weighted_recall == doctest::Approx(rep.micro_recall));
}

TEST_CASE("metric extremes coincide over random matrices") {
    std::mt19937_64 rng(20260815);
    for (int trial = 0; trial < 200; ++trial) {
        LabelMatrix truth = random_labels(rng, 8, 7, 0.3);
        LabelMatrix pred = trial % 4 == 0 ? truth : random_labels(rng, 8, 7, 0.3);
        const double h = metrics::hamming_loss(truth, pred);
        const double a = metrics::sample_accuracy(truth, pred);
        const double j = metrics::jaccard_index(truth, pred);
        CAPTURE(trial);
        CHECK((h == 0.0) == (a == 1.0));
        CHECK((h == 0.0) == (j == 1.0));
    }
}

TEST_CASE("metrics ignore sample order") {
    std::mt19937_64 rng(99);
    LabelMatrix truth = random_labels(rng, 20, 7, 0.35);
    LabelMatrix pred = random_labels(rng, 20, 7, 0.35);
    metrics::MetricsReport before = metrics::evaluate(truth, pred, kNames);

    std::vector<size_t> order(truth.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    LabelMatrix truth2, pred2;
    for (size_t i : order) {
        truth2.push_back(truth[i]);
        pred2.push_back(pred[i]);
    }
    metrics::MetricsReport after = metrics::evaluate(truth2, pred2, kNames);
    CHECK(before.hamming_loss == doctest::Approx(after.hamming_loss));
    CHECK(before.jaccard_index == doctest::Approx(after.jaccard_index));
    CHECK(before.sample_accuracy == doctest::Approx(after.sample_accuracy));
    CHECK(before.micro_f1 == doctest::Approx(after.micro_f1));
    CHECK(before.macro_f1 == doctest::Approx(after.macro_f1));
    CHECK(before.weighted_f1 == doctest::Approx(after.weighted_f1));
}

TEST_CASE("confusion attribution follows the documented rules") {
    SUBCASE("missed label with no spurious prediction lands in NPL") {
        LabelMatrix truth = {{1, 0, 0, 0, 0, 0, 0}};
        LabelMatrix pred = {{0, 0, 0, 0, 0, 0, 0}};
        metrics::MlcmMatrix m = metrics::mlcm_confusion(truth, pred, kNames);
        CHECK(m.counts[0][7] == doctest::Approx(1.0));
        CHECK(row_sum(m.counts[0]) == doctest::Approx(1.0));
    }
    SUBCASE("single-candidate attribution goes to the confused label") {
        LabelMatrix truth = {{1, 0, 0, 0, 0, 0, 0}};
        LabelMatrix pred = {{0, 0, 1, 0, 0, 0, 0}};
        metrics::MlcmMatrix m = metrics::mlcm_confusion(truth, pred, kNames);
        CHECK(m.counts[0][2] == doctest::Approx(1.0));
    }
    SUBCASE("spurious prediction on an empty-truth sample hits the NTL row") {
        LabelMatrix truth = {{0, 0, 0, 0, 0, 0, 0}};
        LabelMatrix pred = {{0, 1, 0, 0, 0, 0, 0}};
        metrics::MlcmMatrix m = metrics::mlcm_confusion(truth, pred, kNames);
        CHECK(m.counts[7][1] == doctest::Approx(1.0));
    }
    SUBCASE("multiple candidates split a missed label uniformly") {
        LabelMatrix truth = {{1, 1, 0, 0, 0, 0, 0}};
        LabelMatrix pred = {{0, 1, 1, 1, 0, 0, 0}};
        metrics::MlcmMatrix m = metrics::mlcm_confusion(truth, pred, kNames);
        CHECK(m.counts[0][2] == doctest::Approx(0.5));
        CHECK(m.counts[0][3] == doctest::Approx(0.5));
        CHECK(m.counts[1][1] == doctest::Approx(1.0));
        CHECK(row_sum(m.counts[0]) == doctest::Approx(1.0));
    }
}

TEST_CASE("confusion row totals equal label supports") {
    std::mt19937_64 rng(4242);
    LabelMatrix truth = random_labels(rng, 40, 7, 0.3);
    LabelMatrix pred = random_labels(rng, 40, 7, 0.3);
    metrics::MlcmMatrix m = metrics::mlcm_confusion(truth, pred, kNames);
    for (size_t j = 0; j < 7; ++j) {
        long support = 0;
        for (const auto& row : truth) support += row[j];
        CHECK(row_sum(m.counts[j]) == doctest::Approx(static_cast<double>(support)));
    }
    auto norm = m.normalized();
    for (const auto& row : norm) {
        const double s = row_sum(row);
        CHECK((s == doctest::Approx(1.0) || s == doctest::Approx(0.0)));
    }
}

TEST_CASE("report tables carry the fixed column layout") {
    LabelMatrix truth = {{1, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 1}};
    metrics::MetricsReport rep = metrics::evaluate(truth, truth, kNames);
    const std::string table = rep.to_table();
    CHECK(table.find("Class\tPrecision\tRecall\tF1-score\tweight") == 0);
    CHECK(table.find("micro avg") != std::string::npos);
    CHECK(table.find("macro avg") != std::string::npos);
    CHECK(table.find("weighted avg") != std::string::npos);
    const std::string text = rep.to_text();
    CHECK(text.find("sample_accuracy\t1.000000") != std::string::npos);
}
