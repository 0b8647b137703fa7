#include "weapo/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "weapo/error.hpp"

namespace weapo {

bool VoteVector::any() const {
    return std::any_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; });
}

std::size_t VoteVector::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::size_t VoteVectorHash::operator()(const VoteVector& v) const noexcept {
    // FNV-1a over the bits.
    std::size_t h = 1469598103934665603ull;
    for (auto b : v.bits) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

Dataset::Dataset(std::vector<Record> records, std::size_t num_lfs,
                 std::vector<std::string> lf_names)
    : records_(std::move(records)), num_lfs_(num_lfs), lf_names_(std::move(lf_names)) {
    if (num_lfs_ == 0) throw DataError("dataset must have at least one labeling function");
    if (records_.empty()) throw DataError("dataset must have at least one record");
    if (!lf_names_.empty() && lf_names_.size() != num_lfs_) {
        throw DataError("lf_names has " + std::to_string(lf_names_.size()) +
                        " entries but num_lfs is " + std::to_string(num_lfs_));
    }

    std::unordered_set<std::string> ids;
    ids.reserve(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const Record& r = records_[i];
        const std::string where = "record " + std::to_string(i) + " ('" + r.id + "')";
        if (!ids.insert(r.id).second) throw DataError("duplicate record id '" + r.id + "'");
        if (r.votes.size() != num_lfs_) {
            throw DataError(where + ": has " + std::to_string(r.votes.size()) +
                            " votes, expected " + std::to_string(num_lfs_));
        }
        for (auto b : r.votes.bits) {
            if (b > 1) throw DataError(where + ": vote value " + std::to_string(b) + " outside {0,1}");
        }
        if (r.gold && *r.gold != 1 && *r.gold != -1) {
            throw DataError(where + ": gold label " + std::to_string(*r.gold) + " outside {-1,+1}");
        }
        if (r.features) {
            if (!feature_dim_) {
                feature_dim_ = r.features->size();
            } else if (*feature_dim_ != r.features->size()) {
                throw DataError(where + ": has " + std::to_string(r.features->size()) +
                                " features, expected " + std::to_string(*feature_dim_));
            }
            for (double x : *r.features) {
                if (!std::isfinite(x)) throw DataError(where + ": non-finite feature value");
            }
        }
    }
}

bool Dataset::all_have_features() const {
    return std::all_of(records_.begin(), records_.end(),
                       [](const Record& r) { return r.features.has_value(); });
}

bool Dataset::all_have_gold() const {
    return std::all_of(records_.begin(), records_.end(),
                       [](const Record& r) { return r.gold.has_value(); });
}

std::vector<std::vector<std::uint8_t>> Dataset::label_matrix() const {
    std::vector<std::vector<std::uint8_t>> L(num_lfs_, std::vector<std::uint8_t>(records_.size()));
    for (std::size_t i = 0; i < records_.size(); ++i) {
        for (std::size_t j = 0; j < num_lfs_; ++j) L[j][i] = records_[i].votes[j];
    }
    return L;
}

std::vector<VoteVector> SliceTable::keys() const {
    std::vector<VoteVector> out;
    out.reserve(slices.size());
    for (const auto& [v, _] : slices) out.push_back(v);
    return out;
}

Prior::Prior(double p_plus) : p_plus_(p_plus) {
    if (!(p_plus > 0.0 && p_plus < 1.0)) {
        std::ostringstream os;
        os << "class prior must lie strictly in (0,1), got " << p_plus;
        throw DataError(os.str());
    }
}

SliceTable build_slices(const Dataset& dataset) {
    SliceTable table;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const VoteVector& v = dataset[i].votes;
        if (v.any()) {
            table.slices[v].push_back(i);
        } else {
            table.uncovered.push_back(i);
        }
    }
    return table;
}

std::vector<std::uint8_t> coverage_mask(const Dataset& dataset) {
    std::vector<std::uint8_t> mask(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) mask[i] = dataset[i].votes.any() ? 1 : 0;
    return mask;
}

namespace {

using nlohmann::json;

[[noreturn]] void line_error(std::size_t line, const std::string& msg) {
    throw DataError("line " + std::to_string(line) + ": " + msg);
}

Record parse_record(const json& j, std::size_t line) {
    if (!j.is_object()) line_error(line, "expected a JSON object");
    Record r;

    auto id = j.find("id");
    if (id == j.end() || !id->is_string()) line_error(line, "missing string field 'id'");
    r.id = id->get<std::string>();

    auto votes = j.find("votes");
    if (votes == j.end() || !votes->is_array()) line_error(line, "missing array field 'votes'");
    r.votes.bits.reserve(votes->size());
    for (const auto& x : *votes) {
        if (!x.is_number_integer() || (x.get<long long>() != 0 && x.get<long long>() != 1)) {
            line_error(line, "vote value " + x.dump() + " outside {0,1}");
        }
        r.votes.bits.push_back(static_cast<std::uint8_t>(x.get<int>()));
    }

    if (auto f = j.find("features"); f != j.end() && !f->is_null()) {
        if (!f->is_array()) line_error(line, "'features' must be an array of numbers");
        std::vector<double> feats;
        feats.reserve(f->size());
        for (const auto& x : *f) {
            if (!x.is_number()) line_error(line, "feature value " + x.dump() + " is not a number");
            feats.push_back(x.get<double>());
        }
        r.features = std::move(feats);
    }

    if (auto g = j.find("label"); g != j.end() && !g->is_null()) {
        if (!g->is_number_integer() || (g->get<long long>() != 1 && g->get<long long>() != -1)) {
            line_error(line, "label " + g->dump() + " outside {-1,+1}");
        }
        r.gold = g->get<int>();
    }
    return r;
}

}  // namespace

Dataset parse_dataset(std::istream& in) {
    std::vector<Record> records;
    std::optional<std::size_t> num_lfs;
    std::vector<std::string> lf_names;
    std::optional<std::size_t> feature_dim;
    std::unordered_set<std::string> ids;

    std::string text;
    std::size_t line = 0;
    bool first_content = true;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            line_error(line, std::string("malformed JSON: ") + e.what());
        }

        if (first_content && j.is_object() && j.contains("meta")) {
            first_content = false;
            const json& meta = j["meta"];
            if (!meta.is_object()) line_error(line, "'meta' must be an object");
            if (auto m = meta.find("num_lfs"); m != meta.end()) {
                if (!m->is_number_unsigned() || m->get<std::size_t>() == 0) {
                    line_error(line, "'num_lfs' must be a positive integer");
                }
                num_lfs = m->get<std::size_t>();
            }
            if (auto n = meta.find("lf_names"); n != meta.end() && !n->is_null()) {
                if (!n->is_array()) line_error(line, "'lf_names' must be an array of strings");
                for (const auto& s : *n) {
                    if (!s.is_string()) line_error(line, "'lf_names' must be an array of strings");
                    lf_names.push_back(s.get<std::string>());
                }
            }
            continue;
        }
        first_content = false;

        Record r = parse_record(j, line);
        if (!num_lfs) num_lfs = r.votes.size();
        if (r.votes.size() != *num_lfs) {
            line_error(line, "has " + std::to_string(r.votes.size()) + " votes, expected " +
                                 std::to_string(*num_lfs));
        }
        if (r.features) {
            if (!feature_dim) feature_dim = r.features->size();
            if (r.features->size() != *feature_dim) {
                line_error(line, "has " + std::to_string(r.features->size()) +
                                     " features, expected " + std::to_string(*feature_dim));
            }
        }
        if (!ids.insert(r.id).second) line_error(line, "duplicate id '" + r.id + "'");
        records.push_back(std::move(r));
    }
    if (records.empty()) throw DataError("dataset contains no records");
    return Dataset(std::move(records), *num_lfs, std::move(lf_names));
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file '" + path.string() + "'");
    return parse_dataset(in);
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
    using nlohmann::ordered_json;
    ordered_json meta;
    meta["num_lfs"] = dataset.num_lfs();
    if (!dataset.lf_names().empty()) meta["lf_names"] = dataset.lf_names();
    out << ordered_json{{"meta", meta}}.dump() << '\n';

    for (const Record& r : dataset.records()) {
        ordered_json j;
        j["id"] = r.id;
        ordered_json votes = ordered_json::array();
        for (auto b : r.votes.bits) votes.push_back(static_cast<int>(b));
        j["votes"] = std::move(votes);
        if (r.features) j["features"] = *r.features;
        if (r.gold) j["label"] = *r.gold;
        out << j.dump() << '\n';
    }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write dataset file '" + path.string() + "'");
    write_dataset(dataset, out);
    if (!out) throw DataError("error while writing '" + path.string() + "'");
}

}  // namespace weapo
