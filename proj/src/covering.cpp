#include "weapo/covering.hpp"

#include <algorithm>
#include <cstdint>

#include "weapo/error.hpp"

namespace weapo {

bool covers(const VoteVector& high, const VoteVector& low) {
    if (high.size() != low.size()) {
        throw DataError("covers: vote vectors of length " + std::to_string(high.size()) + " and " +
                        std::to_string(low.size()));
    }
    bool strict = false;
    for (std::size_t j = 0; j < high.size(); ++j) {
        if (high[j] < low[j]) return false;
        if (high[j] > low[j]) strict = true;
    }
    return strict;
}

namespace {

// Fixed-width bitset over K elements, sized at runtime.
class Bits {
public:
    explicit Bits(std::size_t n) : words_((n + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
    bool intersects(const Bits& other) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            if (words_[w] & other.words_[w]) return true;
        }
        return false;
    }

private:
    std::vector<std::uint64_t> words_;
};

}  // namespace

std::vector<HasseEdge> hasse_edges(std::vector<VoteVector> vectors) {
    std::sort(vectors.begin(), vectors.end());
    vectors.erase(std::unique(vectors.begin(), vectors.end()), vectors.end());
    const std::size_t k = vectors.size();

    // above[a]: vectors strictly covering a; below[b]: vectors strictly covered by b.
    std::vector<Bits> above(k, Bits(k)), below(k, Bits(k));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            if (a != b && covers(vectors[b], vectors[a])) {
                above[a].set(b);
                below[b].set(a);
            }
        }
    }

    // a -> b is a Hasse edge iff no c sits strictly between them.
    std::vector<HasseEdge> edges;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            if (above[a].test(b) && !above[a].intersects(below[b])) {
                edges.push_back({vectors[a], vectors[b]});
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

ConstraintMatrix::ConstraintMatrix(std::size_t num_records, std::vector<std::vector<Entry>> rows,
                                   std::vector<HasseEdge> edges)
    : num_records_(num_records), rows_(std::move(rows)), edges_(std::move(edges)) {
    if (rows_.size() != edges_.size()) throw DataError("constraint matrix: rows/edges size mismatch");
}

double ConstraintMatrix::row_dot(std::size_t r, std::span<const double> scores) const {
    if (scores.size() != num_records_) {
        throw DataError("constraint matrix: score vector has " + std::to_string(scores.size()) +
                        " entries, expected " + std::to_string(num_records_));
    }
    // Evaluated as mean(low) - mean(high) so that constant vectors give exactly 0.
    double low = 0.0, high = 0.0;
    std::size_t n_low = 0, n_high = 0;
    for (const Entry& e : rows_[r]) {
        if (e.value > 0) {
            low += scores[e.index];
            ++n_low;
        } else {
            high += scores[e.index];
            ++n_high;
        }
    }
    return low / static_cast<double>(n_low) - high / static_cast<double>(n_high);
}

double ConstraintMatrix::row_sum(std::size_t r) const {
    const std::vector<double> ones(num_records_, 1.0);
    return row_dot(r, ones);
}

ConstraintMatrix constraint_matrix(const SliceTable& slices, const std::vector<HasseEdge>& edges,
                                   std::size_t num_records) {
    std::vector<std::vector<ConstraintMatrix::Entry>> rows;
    rows.reserve(edges.size());
    for (const HasseEdge& e : edges) {
        auto lo = slices.slices.find(e.low);
        auto hi = slices.slices.find(e.high);
        if (lo == slices.slices.end() || hi == slices.slices.end()) {
            throw DataError("constraint matrix: edge endpoint is not an observed slice");
        }
        std::vector<ConstraintMatrix::Entry> row;
        row.reserve(lo->second.size() + hi->second.size());
        const double wl = 1.0 / static_cast<double>(lo->second.size());
        const double wh = -1.0 / static_cast<double>(hi->second.size());
        for (std::size_t i : lo->second) row.push_back({i, wl});
        for (std::size_t i : hi->second) row.push_back({i, wh});
        for (const auto& ent : row) {
            if (ent.index >= num_records) throw DataError("constraint matrix: record index out of range");
        }
        rows.push_back(std::move(row));
    }
    return ConstraintMatrix(num_records, std::move(rows), edges);
}

}  // namespace weapo
