#pragma once

#include <string>
#include <vector>

namespace mipred::metrics {

// N samples × L binary labels, one row per sample.
using LabelMatrix = std::vector<std::vector<int>>;

struct LabelScore {
    std::string name;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long support = 0;  // true positives + false negatives
};

struct MetricsReport {
    int samples = 0;
    int labels = 0;
    double hamming_loss = 0.0;
    double jaccard_index = 0.0;
    double sample_accuracy = 0.0;   // exact match ratio
    double sample_precision = 0.0;  // averaged per sample
    double sample_recall = 0.0;
    double sample_f1 = 0.0;
    double macro_precision = 0.0;   // unweighted mean over labels
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double micro_precision = 0.0;   // pooled counts over all labels
    double micro_recall = 0.0;
    double micro_f1 = 0.0;
    double weighted_precision = 0.0;  // support-weighted mean over labels
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    std::vector<LabelScore> per_label;

    std::string to_text() const;
    // Delimited table: Class, Precision, Recall, F1-score, weight, with
    // micro/macro/weighted average rows appended.
    std::string to_table() const;
};

// Multi-label confusion matrix with a No-True-Labels row and a
// No-Predicted-Labels column. Counts are fractional because a missed true
// label is split uniformly across the sample's spurious predictions.
struct MlcmMatrix {
    std::vector<std::string> row_names;  // labels + "NTL"
    std::vector<std::string> col_names;  // labels + "NPL"
    std::vector<std::vector<double>> counts;

    // Rows scaled to sum to 1; all-zero rows stay zero.
    std::vector<std::vector<double>> normalized() const;
    std::string to_text(bool normalized_view) const;
};

// Mean over samples of the per-sample misclassified-label fraction.
double hamming_loss(const LabelMatrix& truth, const LabelMatrix& predicted);

// Mean over samples of |truth ∧ predicted| / |truth ∨ predicted|; a sample
// with both sets empty counts as 1.
double jaccard_index(const LabelMatrix& truth, const LabelMatrix& predicted);

// Fraction of samples whose whole label vector matches.
double sample_accuracy(const LabelMatrix& truth, const LabelMatrix& predicted);

// Full report; label_names must have one entry per column.
MetricsReport evaluate(const LabelMatrix& truth, const LabelMatrix& predicted,
                       const std::vector<std::string>& label_names);

// Attribution per sample: correct true labels on the diagonal; each missed
// true label spread uniformly over predicted-but-not-true labels, or NPL when
// there are none; spurious predictions on samples without any true label
// accrue to the NTL row.
MlcmMatrix mlcm_confusion(const LabelMatrix& truth, const LabelMatrix& predicted,
                          const std::vector<std::string>& label_names);

}  // namespace mipred::metrics
