#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "weapo/baselines.hpp"
#include "weapo/covering.hpp"
#include "weapo/kernel_ridge.hpp"
#include "weapo/metrics.hpp"
#include "weapo/synth.hpp"
#include "weapo/weapo.hpp"

namespace weapo {

using Json = nlohmann::ordered_json;

// JSON mirrors of the domain types. Doubles are written in shortest
// round-trip form, so reading back yields bit-identical values.
Json to_json(const WeapoConfig& c);
Json to_json(const WeapoModel& m);
Json to_json(const DSModel& m);
Json to_json(const FSModel& m);
Json to_json(const KRRModel& m);
Json to_json(const EvalResult& r);
Json to_json(const SyntheticSpec& s);
Json to_json(const OracleTable& t);
Json edges_to_json(const std::vector<HasseEdge>& edges, const SliceTable& slices);

WeapoConfig weapo_config_from_json(const Json& j);
WeapoModel weapo_model_from_json(const Json& j);
DSModel ds_model_from_json(const Json& j);
FSModel fs_model_from_json(const Json& j);
KRRModel krr_model_from_json(const Json& j);
SyntheticSpec synthetic_spec_from_json(const Json& j);

struct MajorityVote {
    std::size_t num_lfs = 0;
};

/// A fitted label model of any supported kind, as stored in a model file.
struct LabelModel {
    std::string name;  // weapo, weapo-noprior, mv, ds, fs
    std::variant<WeapoModel, MajorityVote, DSModel, FSModel> params;
    Json diagnostics = Json::object();

    std::size_t num_lfs() const;
    /// Positive-class score of one vote vector.
    double score(const VoteVector& votes) const;
    /// Scores for every record; throws DataError on an LF-count mismatch.
    std::vector<double> scores(const Dataset& dataset) const;
};

Json to_json(const LabelModel& m);
LabelModel label_model_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& j, const std::filesystem::path& path);

}  // namespace weapo
