#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace weapo {

struct EvalResult {
    double roc_auc = 0.0;
    double pr_auc = 0.0;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    std::size_t n_evaluated = 0;
};

/// Mann-Whitney estimate P(s_pos > s_neg) + 0.5 P(s_pos == s_neg), via
/// mid-ranks. Labels are +1/-1. Throws UndefinedMetricError unless both
/// classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Average precision: (1/P) sum over descending score blocks of
/// (positives in block) * (precision after the block). Tied scores form
/// one block. Throws UndefinedMetricError if there are no positives.
double pr_auc(std::span<const double> scores, std::span<const int> labels);

/// Both metrics over the records with mask[i] != 0.
EvalResult evaluate_label_model(std::span<const double> scores, std::span<const std::uint8_t> mask,
                                std::span<const int> gold);

/// Both metrics over every record.
EvalResult evaluate_all(std::span<const double> scores, std::span<const int> gold);

}  // namespace weapo
