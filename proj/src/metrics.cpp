#include "weapo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "weapo/error.hpp"

namespace weapo {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw DataError("metrics: " + std::to_string(scores.size()) + " scores but " +
                        std::to_string(labels.size()) + " labels");
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1) throw DataError("metrics: labels must be +1 or -1");
        if (std::isnan(scores[i])) throw DataError("metrics: NaN score");
    }
}

std::vector<std::size_t> order_descending(std::span<const double> scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return idx;
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw UndefinedMetricError("ROC-AUC undefined: " + std::to_string(n_pos) + " positives, " +
                                   std::to_string(n_neg) + " negatives");
    }

    // Walk ascending tie blocks; each positive in a block beats every
    // negative below it and ties half of those inside it. Counts are kept in
    // half-units so the numerator is an exact integer.
    std::vector<std::size_t> idx = order_descending(scores);
    std::reverse(idx.begin(), idx.end());
    unsigned long long twice_wins = 0;
    std::size_t neg_below = 0;
    for (std::size_t a = 0; a < idx.size();) {
        std::size_t b = a;
        std::size_t pos_block = 0, neg_block = 0;
        while (b < idx.size() && scores[idx[b]] == scores[idx[a]]) {
            (labels[idx[b]] == 1 ? pos_block : neg_block)++;
            ++b;
        }
        twice_wins += 2ull * pos_block * neg_below + 1ull * pos_block * neg_block;
        neg_below += neg_block;
        a = b;
    }
    return (static_cast<double>(twice_wins) / 2.0) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double pr_auc(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (n_pos == 0) throw UndefinedMetricError("PR-AUC undefined: no positive labels");

    const std::vector<std::size_t> idx = order_descending(scores);
    double sum = 0.0;
    std::size_t tp = 0, seen = 0;
    for (std::size_t a = 0; a < idx.size();) {
        std::size_t b = a;
        std::size_t pos_block = 0;
        while (b < idx.size() && scores[idx[b]] == scores[idx[a]]) {
            pos_block += labels[idx[b]] == 1;
            ++b;
        }
        tp += pos_block;
        seen += b - a;
        if (pos_block > 0) {
            sum += static_cast<double>(pos_block) * (static_cast<double>(tp) / static_cast<double>(seen));
        }
        a = b;
    }
    return sum / static_cast<double>(n_pos);
}

EvalResult evaluate_label_model(std::span<const double> scores, std::span<const std::uint8_t> mask,
                                std::span<const int> gold) {
    if (scores.size() != mask.size() || scores.size() != gold.size()) {
        throw DataError("evaluate_label_model: scores, mask, and gold must be aligned");
    }
    std::vector<double> s;
    std::vector<int> y;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!mask[i]) continue;
        s.push_back(scores[i]);
        y.push_back(gold[i]);
    }
    if (s.empty()) throw UndefinedMetricError("no covered records to evaluate");
    const auto n_pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    const std::size_t n_neg = y.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw UndefinedMetricError("metrics undefined on the covered subset: " + std::to_string(n_pos) +
                                   " positives, " + std::to_string(n_neg) + " negatives");
    }
    EvalResult r;
    r.roc_auc = roc_auc(s, y);
    r.pr_auc = pr_auc(s, y);
    r.n_pos = n_pos;
    r.n_neg = n_neg;
    r.n_evaluated = y.size();
    return r;
}

EvalResult evaluate_all(std::span<const double> scores, std::span<const int> gold) {
    check_inputs(scores, gold);
    EvalResult r;
    r.n_pos = static_cast<std::size_t>(std::count(gold.begin(), gold.end(), 1));
    r.n_neg = gold.size() - r.n_pos;
    r.n_evaluated = gold.size();
    r.roc_auc = roc_auc(scores, gold);
    r.pr_auc = pr_auc(scores, gold);
    return r;
}

}  // namespace weapo
