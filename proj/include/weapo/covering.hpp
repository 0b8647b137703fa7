#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "weapo/dataset.hpp"

namespace weapo {

/// `high` covers `low`: high >= low elementwise with at least one strict
/// coordinate. Irreflexive. Throws DataError on length mismatch.
bool covers(const VoteVector& high, const VoteVector& low);

struct HasseEdge {
    VoteVector low;
    VoteVector high;

    friend bool operator==(const HasseEdge&, const HasseEdge&) = default;
    friend auto operator<=>(const HasseEdge&, const HasseEdge&) = default;
};

/// Transitive reduction of the covering order restricted to `vectors`.
/// Duplicates are ignored. Edges are sorted by (low, high).
std::vector<HasseEdge> hasse_edges(std::vector<VoteVector> vectors);

/// Sparse d x N matrix with one row per Hasse edge. Row r holds
/// +1/|D_low| on the members of D_low and -1/|D_high| on those of D_high,
/// so that (A s)_r = mean(s | low) - mean(s | high) and A s <= 0 encodes
/// "the covering slice scores at least as high on average".
class ConstraintMatrix {
public:
    struct Entry {
        std::size_t index;
        double value;
    };

    ConstraintMatrix(std::size_t num_records, std::vector<std::vector<Entry>> rows,
                     std::vector<HasseEdge> edges);

    std::size_t num_rows() const { return rows_.size(); }
    std::size_t num_records() const { return num_records_; }
    const std::vector<Entry>& row(std::size_t r) const { return rows_[r]; }
    const HasseEdge& edge(std::size_t r) const { return edges_[r]; }
    const std::vector<HasseEdge>& edges() const { return edges_; }

    /// A_r . scores
    double row_dot(std::size_t r, std::span<const double> scores) const;
    /// A_r . 1 (exactly zero for every well-formed row).
    double row_sum(std::size_t r) const;

private:
    std::size_t num_records_;
    std::vector<std::vector<Entry>> rows_;
    std::vector<HasseEdge> edges_;
};

/// Throws DataError if an edge endpoint is not a slice key.
ConstraintMatrix constraint_matrix(const SliceTable& slices, const std::vector<HasseEdge>& edges,
                                   std::size_t num_records);

}  // namespace weapo
