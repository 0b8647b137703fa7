#include "weapo/model_file.hpp"

#include <fstream>
#include <sstream>

#include "weapo/error.hpp"
#include "weapo/version.hpp"

namespace weapo {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("field '") + key + "' has the wrong type: " + e.what());
    }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? field<T>(j, key) : fallback;
}

Json votes_json(const VoteVector& v) {
    Json a = Json::array();
    for (auto b : v.bits) a.push_back(static_cast<int>(b));
    return a;
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

Json to_json(const WeapoConfig& c) {
    return Json{{"lambda_reg", c.lambda_reg}, {"use_prior", c.use_prior},
                {"prior_weight", c.prior_weight}, {"max_iters", c.max_iters},
                {"step0", c.step0}, {"tol", c.tol}, {"seed", c.seed}};
}

WeapoConfig weapo_config_from_json(const Json& j) {
    WeapoConfig c;
    c.lambda_reg = field_or(j, "lambda_reg", c.lambda_reg);
    c.use_prior = field_or(j, "use_prior", c.use_prior);
    c.prior_weight = field_or(j, "prior_weight", c.prior_weight);
    c.max_iters = field_or(j, "max_iters", c.max_iters);
    c.step0 = field_or(j, "step0", c.step0);
    c.tol = field_or(j, "tol", c.tol);
    c.seed = field_or(j, "seed", c.seed);
    return c;
}

Json to_json(const WeapoModel& m) {
    const WeapoDiagnostics& d = m.diagnostics;
    Json diag{{"objective", d.terms.total},
              {"terms", {{"reg", d.terms.reg}, {"hinge", d.terms.hinge}, {"prior", d.terms.prior}}},
              {"iterations", d.iterations},
              {"converged", d.converged},
              {"max_hinge", d.max_hinge},
              {"history", d.history}};
    if (d.gradient_mapping_norm) diag["gradient_mapping_norm"] = *d.gradient_mapping_norm;
    return Json{{"theta", m.theta}, {"config", to_json(m.config)}, {"diagnostics", std::move(diag)}};
}

WeapoModel weapo_model_from_json(const Json& j) {
    WeapoModel m;
    m.theta = field<std::vector<double>>(j, "theta");
    if (m.theta.empty()) throw DataError("weapo model: empty theta");
    if (j.contains("config")) m.config = weapo_config_from_json(j["config"]);
    if (j.contains("diagnostics")) {
        const Json& d = j["diagnostics"];
        m.diagnostics.terms.total = field_or(d, "objective", 0.0);
        if (d.contains("terms")) {
            m.diagnostics.terms.reg = field_or(d["terms"], "reg", 0.0);
            m.diagnostics.terms.hinge = field_or(d["terms"], "hinge", 0.0);
            m.diagnostics.terms.prior = field_or(d["terms"], "prior", 0.0);
        }
        m.diagnostics.iterations = field_or(d, "iterations", 0);
        m.diagnostics.converged = field_or(d, "converged", false);
        m.diagnostics.max_hinge = field_or(d, "max_hinge", 0.0);
        m.diagnostics.history = field_or(d, "history", std::vector<double>{});
        if (d.contains("gradient_mapping_norm")) {
            m.diagnostics.gradient_mapping_norm = field<double>(d, "gradient_mapping_norm");
        }
    }
    return m;
}

Json to_json(const DSModel& m) {
    Json conf = Json::array();
    for (const Confusion& c : m.confusion) conf.push_back({{c[0][0], c[0][1]}, {c[1][0], c[1][1]}});
    return Json{{"class_prior", m.class_prior}, {"confusion", std::move(conf)}};
}

DSModel ds_model_from_json(const Json& j) {
    DSModel m;
    m.class_prior = field<double>(j, "class_prior");
    for (const auto& c : field<Json>(j, "confusion")) {
        Confusion conf{};
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t b = 0; b < 2; ++b) conf[a][b] = c.at(a).at(b).get<double>();
        }
        m.confusion.push_back(conf);
    }
    m.validate();
    return m;
}

Json to_json(const FSModel& m) {
    return Json{{"mean_accuracies", m.mean_accuracies}, {"class_prior", m.class_prior}};
}

FSModel fs_model_from_json(const Json& j) {
    FSModel m;
    m.mean_accuracies = field<std::vector<double>>(j, "mean_accuracies");
    m.class_prior = field<double>(j, "class_prior");
    for (double a : m.mean_accuracies) {
        if (!(std::abs(a) < 1.0)) throw DataError("fs model: mean accuracies must lie in (-1,1)");
    }
    Prior check(m.class_prior);
    return m;
}

Json to_json(const KRRModel& m) {
    return Json{{"gamma", m.gamma},
                {"alpha", m.alpha},
                {"support", matrix_json(m.support)},
                {"coefficients", std::vector<double>(m.coefficients.data(),
                                                     m.coefficients.data() + m.coefficients.size())}};
}

KRRModel krr_model_from_json(const Json& j) {
    KRRModel m;
    m.gamma = field<double>(j, "gamma");
    m.alpha = field<double>(j, "alpha");
    const auto rows = field<std::vector<std::vector<double>>>(j, "support");
    const auto coef = field<std::vector<double>>(j, "coefficients");
    if (rows.size() != coef.size()) throw DataError("krr model: support and coefficients disagree");
    const std::size_t f = rows.empty() ? 0 : rows.front().size();
    m.support.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(f));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != f) throw DataError("krr model: ragged support matrix");
        for (std::size_t k = 0; k < f; ++k) m.support(i, k) = rows[i][k];
    }
    m.coefficients = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
    return m;
}

Json to_json(const EvalResult& r) {
    return Json{{"roc_auc", r.roc_auc}, {"pr_auc", r.pr_auc}, {"n_pos", r.n_pos},
                {"n_neg", r.n_neg}, {"n_evaluated", r.n_evaluated}};
}

Json to_json(const SyntheticSpec& s) {
    Json j{{"p_plus", s.p_plus}, {"tpr", s.tpr}, {"fpr", s.fpr}, {"n", s.n}, {"seed", s.seed}};
    if (s.features) {
        j["features"] = Json{{"mean_pos", s.features->mean_pos},
                             {"mean_neg", s.features->mean_neg},
                             {"sigma", s.features->sigma}};
    }
    return j;
}

SyntheticSpec synthetic_spec_from_json(const Json& j) {
    SyntheticSpec s;
    s.p_plus = field<double>(j, "p_plus");
    s.tpr = field<std::vector<double>>(j, "tpr");
    s.fpr = field<std::vector<double>>(j, "fpr");
    s.n = field<std::size_t>(j, "n");
    s.seed = field_or<std::uint64_t>(j, "seed", 0);
    if (j.contains("features") && !j["features"].is_null()) {
        const Json& f = j["features"];
        s.features = FeatureSpec{field<std::vector<double>>(f, "mean_pos"),
                                 field<std::vector<double>>(f, "mean_neg"), field<double>(f, "sigma")};
    }
    return s;
}

Json to_json(const OracleTable& t) {
    Json a = Json::array();
    for (const auto& [v, p] : t.posteriors) a.push_back(Json{{"votes", votes_json(v)}, {"posterior", p}});
    return a;
}

Json edges_to_json(const std::vector<HasseEdge>& edges, const SliceTable& slices) {
    Json a = Json::array();
    for (const HasseEdge& e : edges) {
        auto lo = slices.slices.find(e.low);
        auto hi = slices.slices.find(e.high);
        a.push_back(Json{{"low", votes_json(e.low)},
                         {"high", votes_json(e.high)},
                         {"d_low_size", lo == slices.slices.end() ? 0 : lo->second.size()},
                         {"d_high_size", hi == slices.slices.end() ? 0 : hi->second.size()}});
    }
    return a;
}

// ---------------------------------------------------------------------------

std::size_t LabelModel::num_lfs() const {
    return std::visit(
        [](const auto& p) -> std::size_t {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MajorityVote>) {
                return p.num_lfs;
            } else {
                return p.num_lfs();
            }
        },
        params);
}

double LabelModel::score(const VoteVector& votes) const {
    if (votes.size() != num_lfs()) {
        throw DataError("dimension mismatch: model '" + name + "' has " + std::to_string(num_lfs()) +
                        " LFs but votes have " + std::to_string(votes.size()));
    }
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, WeapoModel>) {
                return weapo::score(p, votes);
            } else if constexpr (std::is_same_v<T, MajorityVote>) {
                return mv_score(votes);
            } else if constexpr (std::is_same_v<T, DSModel>) {
                return ds_posterior(p, convert_abstain(votes));
            } else {
                return fs_posterior(p, convert_abstain(votes));
            }
        },
        params);
}

std::vector<double> LabelModel::scores(const Dataset& dataset) const {
    if (dataset.num_lfs() != num_lfs()) {
        throw DataError("dimension mismatch: model '" + name + "' has " + std::to_string(num_lfs()) +
                        " LFs but the dataset has " + std::to_string(dataset.num_lfs()));
    }
    std::vector<double> out(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) out[i] = score(dataset[i].votes);
    return out;
}

Json to_json(const LabelModel& m) {
    Json j{{"model", m.name}, {"version", kVersion}};
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MajorityVote>) {
                j["num_lfs"] = p.num_lfs;
            } else {
                const Json fields = to_json(p);
                for (auto& [k, v] : fields.items()) j[k] = v;
            }
        },
        m.params);
    if (!m.diagnostics.empty()) {
        if (j.contains("diagnostics")) {
            for (auto& [k, v] : m.diagnostics.items()) j["diagnostics"][k] = v;
        } else {
            j["diagnostics"] = m.diagnostics;
        }
    }
    return j;
}

LabelModel label_model_from_json(const Json& j) {
    try {
        LabelModel m;
        m.name = field<std::string>(j, "model");
        if (m.name == "weapo" || m.name == "weapo-noprior" || m.name == "weapo-supervised") {
            m.params = weapo_model_from_json(j);
        } else if (m.name == "mv") {
            m.params = MajorityVote{field<std::size_t>(j, "num_lfs")};
        } else if (m.name == "ds") {
            m.params = ds_model_from_json(j);
        } else if (m.name == "fs") {
            m.params = fs_model_from_json(j);
        } else {
            throw DataError("unknown model kind '" + m.name + "'");
        }
        if (j.contains("diagnostics")) m.diagnostics = j["diagnostics"];
        if (m.num_lfs() == 0) throw DataError("model has zero LFs");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw DataError("error while writing '" + path.string() + "'");
}

}  // namespace weapo
