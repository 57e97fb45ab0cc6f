#include "metrics/metrics.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mipred::metrics {

namespace {

void check_shapes(const LabelMatrix& truth, const LabelMatrix& predicted) {
    if (truth.empty() || truth.size() != predicted.size())
        throw std::runtime_error("metrics: label matrices must be nonempty and equal-sized");
    const size_t width = truth.front().size();
    if (width == 0) throw std::runtime_error("metrics: zero-width label matrix");
    for (size_t i = 0; i < truth.size(); ++i) {
        if (truth[i].size() != width || predicted[i].size() != width)
            throw std::runtime_error("metrics: ragged label matrix at row " + std::to_string(i));
        for (size_t j = 0; j < width; ++j) {
            if ((truth[i][j] != 0 && truth[i][j] != 1) ||
                (predicted[i][j] != 0 && predicted[i][j] != 1))
                throw std::runtime_error("metrics: labels must be 0 or 1");
        }
    }
}

double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1_of(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

double hamming_loss(const LabelMatrix& truth, const LabelMatrix& predicted) {
    check_shapes(truth, predicted);
    const double width = static_cast<double>(truth.front().size());
    double total = 0.0;
    for (size_t i = 0; i < truth.size(); ++i) {
        int flips = 0;
        for (size_t j = 0; j < truth[i].size(); ++j) flips += truth[i][j] ^ predicted[i][j];
        total += flips / width;
    }
    return total / static_cast<double>(truth.size());
}

double jaccard_index(const LabelMatrix& truth, const LabelMatrix& predicted) {
    check_shapes(truth, predicted);
    double total = 0.0;
    for (size_t i = 0; i < truth.size(); ++i) {
        int inter = 0, uni = 0;
        for (size_t j = 0; j < truth[i].size(); ++j) {
            inter += truth[i][j] & predicted[i][j];
            uni += truth[i][j] | predicted[i][j];
        }
        total += uni > 0 ? static_cast<double>(inter) / uni : 1.0;
    }
    return total / static_cast<double>(truth.size());
}

double sample_accuracy(const LabelMatrix& truth, const LabelMatrix& predicted) {
    check_shapes(truth, predicted);
    int exact = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == predicted[i]) ++exact;
    }
    return static_cast<double>(exact) / static_cast<double>(truth.size());
}

MetricsReport evaluate(const LabelMatrix& truth, const LabelMatrix& predicted,
                       const std::vector<std::string>& label_names) {
    check_shapes(truth, predicted);
    const size_t width = truth.front().size();
    if (label_names.size() != width)
        throw std::runtime_error("metrics: need one name per label column");

    MetricsReport rep;
    rep.samples = static_cast<int>(truth.size());
    rep.labels = static_cast<int>(width);
    rep.hamming_loss = hamming_loss(truth, predicted);
    rep.jaccard_index = jaccard_index(truth, predicted);
    rep.sample_accuracy = sample_accuracy(truth, predicted);

    for (size_t i = 0; i < truth.size(); ++i) {
        int inter = 0, true_count = 0, pred_count = 0;
        for (size_t j = 0; j < width; ++j) {
            inter += truth[i][j] & predicted[i][j];
            true_count += truth[i][j];
            pred_count += predicted[i][j];
        }
        rep.sample_precision += ratio_or_zero(inter, pred_count);
        rep.sample_recall += ratio_or_zero(inter, true_count);
    }
    rep.sample_precision /= rep.samples;
    rep.sample_recall /= rep.samples;
    rep.sample_f1 = f1_of(rep.sample_precision, rep.sample_recall);

    long pooled_tp = 0, pooled_pred = 0, pooled_true = 0, total_support = 0;
    for (size_t j = 0; j < width; ++j) {
        long tp = 0, pred_count = 0, true_count = 0;
        for (size_t i = 0; i < truth.size(); ++i) {
            tp += truth[i][j] & predicted[i][j];
            pred_count += predicted[i][j];
            true_count += truth[i][j];
        }
        LabelScore score;
        score.name = label_names[j];
        score.support = true_count;
        score.precision = ratio_or_zero(static_cast<double>(tp), static_cast<double>(pred_count));
        score.recall = ratio_or_zero(static_cast<double>(tp), static_cast<double>(true_count));
        score.f1 = f1_of(score.precision, score.recall);
        rep.per_label.push_back(score);

        rep.macro_precision += score.precision;
        rep.macro_recall += score.recall;
        rep.weighted_precision += score.precision * true_count;
        rep.weighted_recall += score.recall * true_count;
        rep.weighted_f1 += score.f1 * true_count;
        pooled_tp += tp;
        pooled_pred += pred_count;
        pooled_true += true_count;
        total_support += true_count;
    }
    rep.macro_precision /= static_cast<double>(width);
    rep.macro_recall /= static_cast<double>(width);
    rep.macro_f1 = f1_of(rep.macro_precision, rep.macro_recall);
    rep.micro_precision = ratio_or_zero(static_cast<double>(pooled_tp),
                                        static_cast<double>(pooled_pred));
    rep.micro_recall = ratio_or_zero(static_cast<double>(pooled_tp),
                                     static_cast<double>(pooled_true));
    rep.micro_f1 = f1_of(rep.micro_precision, rep.micro_recall);
    if (total_support > 0) {
        rep.weighted_precision /= static_cast<double>(total_support);
        rep.weighted_recall /= static_cast<double>(total_support);
        rep.weighted_f1 /= static_cast<double>(total_support);
    }
    return rep;
}

MlcmMatrix mlcm_confusion(const LabelMatrix& truth, const LabelMatrix& predicted,
                          const std::vector<std::string>& label_names) {
    check_shapes(truth, predicted);
    const size_t width = truth.front().size();
    if (label_names.size() != width)
        throw std::runtime_error("metrics: need one name per label column");

    MlcmMatrix m;
    m.row_names = label_names;
    m.row_names.push_back("NTL");
    m.col_names = label_names;
    m.col_names.push_back("NPL");
    m.counts.assign(width + 1, std::vector<double>(width + 1, 0.0));
    const size_t ntl = width, npl = width;

    for (size_t i = 0; i < truth.size(); ++i) {
        std::vector<size_t> spurious;
        bool any_true = false;
        for (size_t j = 0; j < width; ++j) {
            if (truth[i][j]) any_true = true;
            if (predicted[i][j] && !truth[i][j]) spurious.push_back(j);
        }
        for (size_t j = 0; j < width; ++j) {
            if (truth[i][j] && predicted[i][j]) m.counts[j][j] += 1.0;
            if (truth[i][j] && !predicted[i][j]) {
                if (spurious.empty()) {
                    m.counts[j][npl] += 1.0;
                } else {
                    const double share = 1.0 / static_cast<double>(spurious.size());
                    for (size_t s : spurious) m.counts[j][s] += share;
                }
            }
        }
        if (!any_true) {
            for (size_t s : spurious) m.counts[ntl][s] += 1.0;
        }
    }
    return m;
}

std::vector<std::vector<double>> MlcmMatrix::normalized() const {
    std::vector<std::vector<double>> out = counts;
    for (auto& row : out) {
        double sum = 0.0;
        for (double v : row) sum += v;
        if (sum > 0.0) {
            for (double& v : row) v /= sum;
        }
    }
    return out;
}

std::string MlcmMatrix::to_text(bool normalized_view) const {
    const auto grid = normalized_view ? normalized() : counts;
    std::ostringstream out;
    out << "true\\pred";
    for (const auto& c : col_names) out << '\t' << c;
    out << '\n';
    for (size_t r = 0; r < grid.size(); ++r) {
        out << row_names[r];
        for (double v : grid[r]) out << '\t' << fixed6(v);
        out << '\n';
    }
    return out.str();
}

std::string MetricsReport::to_text() const {
    std::ostringstream out;
    out << "samples\t" << samples << '\n'
        << "labels\t" << labels << '\n'
        << "hamming_loss\t" << fixed6(hamming_loss) << '\n'
        << "jaccard_index\t" << fixed6(jaccard_index) << '\n'
        << "sample_accuracy\t" << fixed6(sample_accuracy) << '\n'
        << "sample_precision\t" << fixed6(sample_precision) << '\n'
        << "sample_recall\t" << fixed6(sample_recall) << '\n'
        << "sample_f1\t" << fixed6(sample_f1) << '\n'
        << "macro_precision\t" << fixed6(macro_precision) << '\n'
        << "macro_recall\t" << fixed6(macro_recall) << '\n'
        << "macro_f1\t" << fixed6(macro_f1) << '\n'
        << "micro_precision\t" << fixed6(micro_precision) << '\n'
        << "micro_recall\t" << fixed6(micro_recall) << '\n'
        << "micro_f1\t" << fixed6(micro_f1) << '\n'
        << "weighted_precision\t" << fixed6(weighted_precision) << '\n'
        << "weighted_recall\t" << fixed6(weighted_recall) << '\n'
        << "weighted_f1\t" << fixed6(weighted_f1) << '\n';
    return out.str();
}

std::string MetricsReport::to_table() const {
    std::ostringstream out;
    out << "Class\tPrecision\tRecall\tF1-score\tweight\n";
    long total_support = 0;
    for (const auto& s : per_label) {
        out << s.name << '\t' << fixed6(s.precision) << '\t' << fixed6(s.recall) << '\t'
            << fixed6(s.f1) << '\t' << s.support << '\n';
        total_support += s.support;
    }
    out << "micro avg\t" << fixed6(micro_precision) << '\t' << fixed6(micro_recall) << '\t'
        << fixed6(micro_f1) << '\t' << total_support << '\n';
    out << "macro avg\t" << fixed6(macro_precision) << '\t' << fixed6(macro_recall) << '\t'
        << fixed6(macro_f1) << '\t' << total_support << '\n';
    out << "weighted avg\t" << fixed6(weighted_precision) << '\t' << fixed6(weighted_recall)
        << '\t' << fixed6(weighted_f1) << '\t' << total_support << '\n';
    return out.str();
}

}  // namespace mipred::metrics
