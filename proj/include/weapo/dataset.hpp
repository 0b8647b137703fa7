#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace weapo {

/// One record's labeling-function outputs. Bit j is 1 iff LF j voted
/// positive, 0 iff it abstained. Ordering is lexicographic in LF index order.
struct VoteVector {
    std::vector<std::uint8_t> bits;

    VoteVector() = default;
    explicit VoteVector(std::vector<std::uint8_t> b) : bits(std::move(b)) {}
    VoteVector(std::initializer_list<std::uint8_t> b) : bits(b) {}

    std::size_t size() const { return bits.size(); }
    std::uint8_t operator[](std::size_t j) const { return bits[j]; }
    bool any() const;
    std::size_t count() const;

    friend bool operator==(const VoteVector&, const VoteVector&) = default;
    friend auto operator<=>(const VoteVector&, const VoteVector&) = default;
};

struct VoteVectorHash {
    std::size_t operator()(const VoteVector& v) const noexcept;
};

struct Record {
    std::string id;
    VoteVector votes;
    std::optional<std::vector<double>> features;
    std::optional<int> gold;  // -1 or +1

    friend bool operator==(const Record&, const Record&) = default;
};

/// An immutable, validated collection of records sharing one LF count.
///
/// Construction enforces: N >= 1, M >= 1, every vote vector has M entries
/// in {0,1}, ids are unique, gold labels are in {-1,+1}, and all feature
/// vectors present share one width. Violations throw DataError.
class Dataset {
public:
    Dataset(std::vector<Record> records, std::size_t num_lfs,
            std::vector<std::string> lf_names = {});

    const std::vector<Record>& records() const { return records_; }
    const Record& operator[](std::size_t i) const { return records_[i]; }
    std::size_t size() const { return records_.size(); }
    std::size_t num_lfs() const { return num_lfs_; }
    const std::vector<std::string>& lf_names() const { return lf_names_; }

    /// Feature width F, or nullopt if no record carries features.
    std::optional<std::size_t> feature_dim() const { return feature_dim_; }
    bool all_have_features() const;
    bool all_have_gold() const;

    /// Derived M x N label matrix view (row = LF).
    std::vector<std::vector<std::uint8_t>> label_matrix() const;

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return a.num_lfs_ == b.num_lfs_ && a.lf_names_ == b.lf_names_ &&
               a.records_ == b.records_;
    }

private:
    std::vector<Record> records_;
    std::size_t num_lfs_;
    std::vector<std::string> lf_names_;
    std::optional<std::size_t> feature_dim_;
};

/// Records grouped by their (non-empty) vote vector. Keys iterate in
/// lexicographic order; member lists follow dataset order.
struct SliceTable {
    std::map<VoteVector, std::vector<std::size_t>> slices;
    std::vector<std::size_t> uncovered;

    std::vector<VoteVector> keys() const;
};

/// Known class prior p(y = +1), strictly inside (0, 1).
class Prior {
public:
    explicit Prior(double p_plus);
    double value() const { return p_plus_; }

private:
    double p_plus_;
};

SliceTable build_slices(const Dataset& dataset);

/// 1 where at least one LF fires, 0 otherwise.
std::vector<std::uint8_t> coverage_mask(const Dataset& dataset);

/// JSON Lines reader. An optional leading {"meta": {...}} line fixes M and
/// LF names; otherwise M comes from the first record. Errors name the line.
Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::istream& in);

/// Writes the meta line followed by one record per line.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
void write_dataset(const Dataset& dataset, std::ostream& out);

}  // namespace weapo
