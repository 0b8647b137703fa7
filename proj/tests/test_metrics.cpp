#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "weapo/error.hpp"
#include "weapo/metrics.hpp"

using namespace weapo;

namespace {

double pair_count_auc(const std::vector<double>& s, const std::vector<int>& y) {
    unsigned long long twice = 0, pos = 0, neg = 0;
    for (int l : y) (l == 1 ? pos : neg)++;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] != -1) continue;
            if (s[i] > s[j]) twice += 2;
            else if (s[i] == s[j]) twice += 1;
        }
    }
    return (static_cast<double>(twice) / 2.0) / (static_cast<double>(pos) * static_cast<double>(neg));
}

// Tie-free average precision: mean over positives of precision at their rank.
double rank_walk_ap(const std::vector<double>& s, const std::vector<int>& y) {
    std::vector<std::size_t> idx(s.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s[a] > s[b]; });
    double sum = 0.0;
    std::size_t tp = 0, pos = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (y[idx[k]] == 1) {
            ++tp;
            sum += 1.0 * (static_cast<double>(tp) / static_cast<double>(k + 1));
        }
    }
    for (int l : y) pos += l == 1;
    return sum / static_cast<double>(pos);
}

struct Instance {
    std::vector<double> s;
    std::vector<int> y;
};

Instance random_instance(std::mt19937_64& rng, bool ties) {
    Instance in;
    const std::size_t n = 2 + rng() % 499;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        in.s.push_back(ties ? std::floor(u(rng) * 10.0) / 10.0 : u(rng));
        in.y.push_back(u(rng) < 0.3 ? 1 : -1);
    }
    in.y[0] = 1;
    in.y[1] = -1;
    return in;
}

}  // namespace

TEST_CASE("roc_auc examples") {
    CHECK(roc_auc(std::vector<double>{0.9, 0.8, 0.3, 0.2}, std::vector<int>{1, 1, -1, -1}) == 1.0);
    CHECK(roc_auc(std::vector<double>{0.9, 0.2, 0.8, 0.4}, std::vector<int>{1, 1, -1, -1}) == 0.5);
    CHECK(roc_auc(std::vector<double>{0.5, 0.5}, std::vector<int>{1, -1}) == 0.5);
    CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), UndefinedMetricError);
}

TEST_CASE("pr_auc examples") {
    CHECK(pr_auc(std::vector<double>{0.9, 0.8, 0.3, 0.2}, std::vector<int>{1, 1, -1, -1}) == 1.0);
    // precision 1 at rank 1 and 2/3 at rank 3
    CHECK(pr_auc(std::vector<double>{0.9, 0.8, 0.3, 0.2}, std::vector<int>{1, -1, 1, -1}) == (1.0 + 2.0 / 3.0) / 2.0);
    CHECK(pr_auc(std::vector<double>{0.9, 0.8, 0.3, 0.2}, std::vector<int>{1, -1, 1, -1}) ==
          doctest::Approx(0.8333).epsilon(1e-4));
    // precision 1 at rank 1 and 2/4 at rank 4
    CHECK(pr_auc(std::vector<double>{0.9, 0.2, 0.8, 0.4}, std::vector<int>{1, 1, -1, -1}) == 0.75);
    // A fully tied block counts as one step.
    CHECK(pr_auc(std::vector<double>{0.5, 0.5, 0.5}, std::vector<int>{1, -1, -1}) == 1.0 / 3.0);
    CHECK_THROWS_AS(pr_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{-1, -1}), UndefinedMetricError);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1}, std::vector<int>{1, -1}), DataError);
    CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 0}), DataError);
    CHECK_THROWS_AS(pr_auc(std::vector<double>{NAN, 0.2}, std::vector<int>{1, -1}), DataError);
}

TEST_CASE("roc_auc equals pair counting on random instances with ties") {
    std::mt19937_64 rng(100);
    for (int t = 0; t < 300; ++t) {
        const Instance in = random_instance(rng, t % 2 == 0);
        CHECK(roc_auc(in.s, in.y) == pair_count_auc(in.s, in.y));
    }
}

TEST_CASE("pr_auc equals the rank walk on tie-free instances") {
    std::mt19937_64 rng(101);
    for (int t = 0; t < 300; ++t) {
        const Instance in = random_instance(rng, false);
        CHECK(pr_auc(in.s, in.y) == rank_walk_ap(in.s, in.y));
    }
}

TEST_CASE("roc_auc invariances") {
    std::mt19937_64 rng(102);
    for (int t = 0; t < 200; ++t) {
        Instance in = random_instance(rng, t % 2 == 0);
        const double a = roc_auc(in.s, in.y);
        std::vector<double> mapped(in.s.size()), negated(in.s.size());
        for (std::size_t i = 0; i < in.s.size(); ++i) {
            mapped[i] = std::exp(3.0 * in.s[i]) + 1.0;
            negated[i] = -in.s[i];
        }
        CHECK(roc_auc(mapped, in.y) == a);
        CHECK(roc_auc(negated, in.y) == doctest::Approx(1.0 - a).epsilon(1e-12));
        CHECK(pr_auc(mapped, in.y) == pr_auc(in.s, in.y));
    }
}

TEST_CASE("evaluate_label_model restricts to covered records") {
    const std::vector<double> s{0.9, 0.0, 0.2, 0.0};
    const std::vector<std::uint8_t> mask{1, 0, 1, 0};
    const std::vector<int> gold{1, 1, -1, -1};
    const EvalResult r = evaluate_label_model(s, mask, gold);
    CHECK(r.roc_auc == 1.0);
    CHECK(r.pr_auc == 1.0);
    CHECK(r.n_pos == 1);
    CHECK(r.n_neg == 1);
    CHECK(r.n_evaluated == 2);

    // Over every record the uncovered positive ranks below the covered negative.
    const EvalResult all = evaluate_all(s, gold);
    CHECK(all.n_evaluated == 4);
    CHECK(all.roc_auc == 0.625);

    const std::vector<std::uint8_t> none{0, 0, 0, 0};
    try {
        evaluate_label_model(s, none, gold);
        FAIL("expected UndefinedMetricError");
    } catch (const UndefinedMetricError& e) {
        CHECK(std::string(e.what()).find("no covered records") != std::string::npos);
    }
    const std::vector<std::uint8_t> only_pos{1, 1, 0, 0};
    try {
        evaluate_label_model(s, only_pos, gold);
        FAIL("expected UndefinedMetricError");
    } catch (const UndefinedMetricError& e) {
        CHECK(std::string(e.what()).find("2 positives, 0 negatives") != std::string::npos);
    }
}
