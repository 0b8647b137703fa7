#include "weapo/cli.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "weapo/error.hpp"
#include "weapo/kernel_ridge.hpp"
#include "weapo/metrics.hpp"
#include "weapo/synth.hpp"
#include "weapo/version.hpp"

namespace weapo::cli {

std::string canonical_model_name(const std::string& name) {
    if (name == "weapo-prior") return "weapo-noprior";
    static const std::vector<std::string> known{"weapo", "weapo-noprior", "mv", "ds", "fs"};
    if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw UsageError("unknown model '" + name + "' (expected weapo, weapo-noprior, mv, ds, fs)");
    }
    return name;
}

static bool needs_prior(const std::string& name) { return name == "weapo" || name == "fs"; }

LabelModel fit_label_model(const std::string& name, const Dataset& train,
                           const std::optional<double>& prior, const FitOptions& options) {
    const std::string model = canonical_model_name(name);
    if (needs_prior(model) && !prior) throw UsageError("model '" + model + "' requires --prior");

    LabelModel lm;
    lm.name = model;
    if (model == "weapo" || model == "weapo-noprior") {
        WeapoConfig cfg = options.weapo;
        cfg.use_prior = model == "weapo";
        std::optional<Prior> p;
        if (cfg.use_prior) p = Prior(*prior);
        lm.params = fit(train, p, cfg);
    } else if (model == "mv") {
        lm.params = MajorityVote{train.num_lfs()};
    } else if (model == "ds") {
        const std::vector<SignedVotes> votes = convert_abstain(train);
        DSFit f = ds_fit(votes, Prior(prior.value_or(0.5)), options.ds);
        lm.params = f.model;
        lm.diagnostics = Json{{"iterations", f.iterations},
                              {"converged", f.converged},
                              {"log_likelihood", f.log_likelihood},
                              {"penalized_log_likelihood", f.penalized_log_likelihood},
                              {"options",
                               {{"max_iters", options.ds.max_iters},
                                {"tol", options.ds.tol},
                                {"smoothing", options.ds.smoothing}}}};
    } else {
        const std::vector<SignedVotes> votes = convert_abstain(train);
        lm.params = fs_fit(votes, Prior(*prior), options.eps_clip);
        lm.diagnostics = Json{{"eps_clip", options.eps_clip}};
    }
    return lm;
}

namespace {

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    bool quiet = false;
};

void add_common(CLI::App* sub, Common& c, bool out_required, const std::string& out_help) {
    sub->add_option("--seed", c.seed, "Random seed (echoed in outputs)");
    auto* o = sub->add_option("--out", c.out, out_help);
    if (out_required) o->required();
    sub->add_flag("--quiet", c.quiet, "Suppress the human-readable table");
}

Json run_header(const std::string& command, Json config) {
    return Json{{"command", command}, {"version", kVersion}, {"config", std::move(config)}};
}

// JSON goes to --out when given, otherwise to stdout after the table.
void emit(const Json& result, const Common& c, std::ostream& out) {
    if (!c.out.empty()) {
        write_json_file(result, c.out);
    } else {
        out << result.dump(2) << '\n';
    }
}

double parse_prior_flag(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        std::ostringstream os;
        os << "--prior must lie strictly in (0,1), got " << p;
        throw UsageError(os.str());
    }
    return p;
}

std::vector<int> gold_labels(const Dataset& d, bool covered_only, const char* which) {
    std::vector<int> gold(d.size(), 1);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Record& r = d[i];
        if (covered_only && !r.votes.any()) continue;
        if (!r.gold) throw DataError(std::string(which) + " record '" + r.id + "' has no gold label");
        gold[i] = *r.gold;
    }
    return gold;
}

Eigen::MatrixXd feature_matrix(const Dataset& d, const char* which) {
    if (!d.all_have_features()) throw DataError(std::string("missing features in ") + which + " dataset");
    const std::size_t f = *d.feature_dim();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(f));
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t k = 0; k < f; ++k) x(i, k) = (*d[i].features)[k];
    }
    return x;
}

EvalResult evaluate_on_covered(const std::vector<double>& scores, const Dataset& test) {
    const std::vector<std::uint8_t> mask = coverage_mask(test);
    if (std::none_of(mask.begin(), mask.end(), [](auto m) { return m != 0; })) {
        throw DataError("no covered records in the test set");
    }
    return evaluate_label_model(scores, mask, gold_labels(test, true, "test"));
}

struct Row {
    std::string name;
    std::optional<EvalResult> result;
    std::string error;
};

void print_table(std::ostream& out, const std::vector<Row>& rows) {
    out << std::left << std::setw(16) << "model" << std::right << std::setw(10) << "ROC-AUC"
        << std::setw(10) << "PR-AUC" << std::setw(10) << "n_eval" << std::setw(8) << "n_pos"
        << std::setw(8) << "n_neg" << '\n';
    for (const Row& r : rows) {
        out << std::left << std::setw(16) << r.name << std::right;
        if (r.result) {
            out << std::fixed << std::setprecision(4) << std::setw(10) << r.result->roc_auc
                << std::setw(10) << r.result->pr_auc << std::setw(10) << r.result->n_evaluated
                << std::setw(8) << r.result->n_pos << std::setw(8) << r.result->n_neg << '\n';
            out.unsetf(std::ios::floatfield);
        } else {
            out << "  error: " << r.error << '\n';
        }
    }
}

Json row_json(const Row& r) {
    Json j{{"model", r.name}};
    if (r.result) {
        const Json metrics = to_json(*r.result);
        for (auto& [k, v] : metrics.items()) j[k] = v;
    } else {
        j["error"] = r.error;
    }
    return j;
}

// ---------------------------------------------------------------------------

struct FitArgs {
    Common common;
    std::string train, model, edges_out;
    double prior = 0.0;
    CLI::Option* prior_opt = nullptr;
    FitOptions options;
};

void add_model_knobs(CLI::App* sub, FitOptions& o) {
    sub->add_option("--lambda", o.weapo.lambda_reg, "WEAPO regularization weight")->capture_default_str();
    sub->add_option("--prior-weight", o.weapo.prior_weight, "WEAPO prior penalty weight")->capture_default_str();
    sub->add_option("--max-iters", o.weapo.max_iters, "WEAPO iteration cap")->capture_default_str();
    sub->add_option("--step0", o.weapo.step0, "WEAPO initial step size")->capture_default_str();
    sub->add_option("--tol", o.weapo.tol, "WEAPO stopping tolerance")->capture_default_str();
    sub->add_option("--ds-max-iters", o.ds.max_iters, "Dawid-Skene EM iteration cap")->capture_default_str();
    sub->add_option("--ds-tol", o.ds.tol, "Dawid-Skene EM tolerance")->capture_default_str();
    sub->add_option("--smoothing", o.ds.smoothing, "Dawid-Skene add-k smoothing")->capture_default_str();
    sub->add_option("--eps-clip", o.eps_clip, "Triplet-method clip threshold")->capture_default_str();
}

Json knobs_json(const FitOptions& o) {
    return Json{{"weapo", to_json(o.weapo)},
                {"ds", {{"max_iters", o.ds.max_iters}, {"tol", o.ds.tol}, {"smoothing", o.ds.smoothing}}},
                {"eps_clip", o.eps_clip}};
}

int cmd_fit(FitArgs& a, std::ostream& out) {
    const std::string name = canonical_model_name(a.model);
    std::optional<double> prior;
    if (a.prior_opt->count() > 0) prior = parse_prior_flag(a.prior);
    if (needs_prior(name) && !prior) throw UsageError("model '" + name + "' requires --prior");
    a.options.weapo.seed = a.common.seed;

    const Dataset train = load_dataset(a.train);
    const LabelModel lm = fit_label_model(name, train, prior, a.options);

    Json j = to_json(lm);
    Json run{{"command", "fit"}, {"train", a.train}, {"model", name}, {"seed", a.common.seed},
             {"options", knobs_json(a.options)}};
    run["prior"] = prior ? Json(*prior) : Json(nullptr);
    j["run"] = std::move(run);
    write_json_file(j, a.common.out);

    if (!a.edges_out.empty()) {
        const SliceTable slices = build_slices(train);
        write_json_file(edges_to_json(hasse_edges(slices.keys()), slices), a.edges_out);
    }

    if (!a.common.quiet) {
        out << "fitted " << name << " on " << train.size() << " records, " << train.num_lfs() << " LFs\n";
        if (const auto* w = std::get_if<WeapoModel>(&lm.params)) {
            out << "theta:";
            for (double t : w->theta) out << ' ' << std::setprecision(6) << t;
            out << "\nobjective " << w->diagnostics.terms.total << " (reg " << w->diagnostics.terms.reg
                << ", hinge " << w->diagnostics.terms.hinge << ", prior " << w->diagnostics.terms.prior
                << ") after " << w->diagnostics.iterations << " iterations\n";
        }
        out << "model written to " << a.common.out << '\n';
    }
    return kExitOk;
}

struct EvalArgs {
    Common common;
    std::string model, test;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    const LabelModel lm = label_model_from_json(read_json_file(a.model));
    const Dataset test = load_dataset(a.test);
    const std::vector<double> scores = lm.scores(test);
    const EvalResult r = evaluate_on_covered(scores, test);

    Json result = run_header("eval", Json{{"model", a.model}, {"test", a.test}, {"seed", a.common.seed}});
    result["label_model"] = lm.name;
    result["result"] = to_json(r);
    result["result"]["n_uncovered"] = test.size() - r.n_evaluated;
    if (!a.common.quiet) print_table(out, {Row{lm.name, r, {}}});
    emit(result, a.common, out);
    return kExitOk;
}

struct EndArgs {
    Common common;
    std::string model, train, test;
    double gamma = 0.0;
    CLI::Option* gamma_opt = nullptr;
    double alpha = 1.0;
    double uncovered_target = 0.0;
};

int cmd_end(const EndArgs& a, std::ostream& out) {
    const LabelModel lm = label_model_from_json(read_json_file(a.model));
    const Dataset train = load_dataset(a.train);
    const Dataset test = load_dataset(a.test);
    const Eigen::MatrixXd x_train = feature_matrix(train, "train");
    const Eigen::MatrixXd x_test = feature_matrix(test, "test");
    if (x_train.cols() != x_test.cols()) {
        throw DataError("feature width mismatch: train has " + std::to_string(x_train.cols()) +
                        ", test has " + std::to_string(x_test.cols()));
    }
    const std::vector<int> gold = gold_labels(test, false, "test");

    const std::vector<double> label_scores = lm.scores(train);
    const std::vector<std::uint8_t> mask = coverage_mask(train);
    const std::vector<double> targets = make_targets(label_scores, mask, TargetPolicy{a.uncovered_target});
    if (std::adjacent_find(targets.begin(), targets.end(), std::not_equal_to<>()) == targets.end()) {
        throw UndefinedMetricError("all end-model training targets are identical (" +
                                   std::to_string(targets.front()) +
                                   "); the end model is a constant predictor and metrics are undefined");
    }

    if (a.gamma_opt->count() > 0 && !(a.gamma > 0.0)) throw UsageError("--gamma must be > 0");
    if (!(a.alpha >= 0.0)) throw UsageError("--alpha must be >= 0");
    const double gamma = a.gamma_opt->count() > 0 ? a.gamma : default_gamma(x_train);
    const KRRModel krr = fit_krr(x_train, Eigen::Map<const Eigen::VectorXd>(targets.data(), targets.size()),
                                 gamma, a.alpha);
    const Eigen::VectorXd pred = predict_krr(krr, x_test);
    const std::vector<double> scores(pred.data(), pred.data() + pred.size());
    const EvalResult r = evaluate_all(scores, gold);

    Json cfg{{"model", a.model}, {"train", a.train}, {"test", a.test}, {"alpha", a.alpha},
             {"uncovered_target", a.uncovered_target}, {"seed", a.common.seed}};
    cfg["gamma"] = a.gamma_opt->count() > 0 ? Json(a.gamma) : Json(nullptr);
    Json result = run_header("end", std::move(cfg));
    result["label_model"] = lm.name;
    result["result"] = to_json(r);
    const auto covered = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
    result["diagnostics"] = Json{{"gamma", gamma},
                                 {"gamma_source", a.gamma_opt->count() > 0 ? "flag" : "default"},
                                 {"alpha", a.alpha},
                                 {"n_train", train.size()},
                                 {"n_train_covered", covered},
                                 {"n_test", test.size()}};
    if (!a.common.quiet) print_table(out, {Row{"end(" + lm.name + ")", r, {}}});
    emit(result, a.common, out);
    return kExitOk;
}

struct CompareArgs {
    Common common;
    std::string train, test, oracle;
    std::vector<std::string> models;
    double prior = 0.0;
    CLI::Option* prior_opt = nullptr;
    FitOptions options;
};

int cmd_compare(CompareArgs& a, std::ostream& out) {
    std::vector<std::string> names;
    for (const std::string& m : a.models) {
        if (!m.empty()) names.push_back(canonical_model_name(m));
    }
    if (names.empty()) throw UsageError("--models must name at least one model");
    std::optional<double> prior;
    if (a.prior_opt->count() > 0) prior = parse_prior_flag(a.prior);
    a.options.weapo.seed = a.common.seed;

    const Dataset train = load_dataset(a.train);
    const Dataset test = load_dataset(a.test);

    std::vector<Row> rows;
    for (const std::string& name : names) {
        Row row{name, std::nullopt, {}};
        try {
            const LabelModel lm = fit_label_model(name, train, prior, a.options);
            row.result = evaluate_on_covered(lm.scores(test), test);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    if (!a.oracle.empty()) {
        Row row{"oracle", std::nullopt, {}};
        try {
            const Json sidecar = read_json_file(a.oracle);
            if (!sidecar.contains("spec")) throw DataError("oracle file has no 'spec' entry");
            const SyntheticSpec spec = synthetic_spec_from_json(sidecar["spec"]);
            std::vector<double> scores(test.size());
            for (std::size_t i = 0; i < test.size(); ++i) scores[i] = oracle_posterior(spec, test[i].votes);
            row.result = evaluate_on_covered(scores, test);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }

    Json cfg{{"train", a.train}, {"test", a.test}, {"models", names}, {"seed", a.common.seed},
             {"options", knobs_json(a.options)}};
    cfg["prior"] = prior ? Json(*prior) : Json(nullptr);
    cfg["oracle"] = a.oracle.empty() ? Json(nullptr) : Json(a.oracle);
    Json result = run_header("compare", std::move(cfg));
    Json jrows = Json::array();
    for (const Row& r : rows) jrows.push_back(row_json(r));
    result["rows"] = std::move(jrows);
    if (!a.common.quiet) print_table(out, rows);
    emit(result, a.common, out);
    return kExitOk;
}

struct SynthArgs {
    Common common;
    CLI::Option* seed_opt = nullptr;
    std::string spec_path, oracle_out;
    long long n = 0;
    CLI::Option* n_opt = nullptr;
    double p_plus = 0.0;
    CLI::Option* p_opt = nullptr;
    std::vector<double> tpr, fpr;
    CLI::Option* tpr_opt = nullptr;
    CLI::Option* fpr_opt = nullptr;
    std::size_t feature_dim = 0;
    double separation = 4.0;
    double sigma = 1.0;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    SyntheticSpec spec;
    if (!a.spec_path.empty()) {
        try {
            spec = synthetic_spec_from_json(read_json_file(a.spec_path));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("malformed spec file: ") + e.what());
        }
    } else if (!a.n_opt->count() || !a.p_opt->count() || !a.tpr_opt->count() || !a.fpr_opt->count()) {
        throw UsageError("synth needs --spec or all of --n, --p-plus, --tpr, --fpr");
    }
    if (a.n_opt->count()) {
        if (a.n <= 0) throw UsageError("--n must be >= 1");
        spec.n = static_cast<std::size_t>(a.n);
    }
    if (spec.n == 0) throw UsageError("n must be >= 1");
    if (a.p_opt->count()) spec.p_plus = a.p_plus;
    if (a.tpr_opt->count()) spec.tpr = a.tpr;
    if (a.fpr_opt->count()) spec.fpr = a.fpr;
    if (a.seed_opt->count()) spec.seed = a.common.seed;
    if (a.feature_dim > 0) spec.features = FeatureSpec::separated(a.feature_dim, a.separation, a.sigma);
    spec.validate();

    const Dataset data = generate(spec);
    save_dataset(data, a.common.out);

    Json sidecar{{"command", "synth"}, {"version", kVersion}, {"spec", to_json(spec)}, {"dataset", a.common.out}};
    sidecar["oracle"] = spec.num_lfs() <= 20 ? to_json(oracle_posteriors(spec)) : Json(nullptr);
    const std::string oracle_path = a.oracle_out.empty() ? a.common.out + ".oracle.json" : a.oracle_out;
    write_json_file(sidecar, oracle_path);

    if (!a.common.quiet) {
        const auto positives = std::count_if(data.records().begin(), data.records().end(),
                                             [](const Record& r) { return r.gold == 1; });
        const auto mask = coverage_mask(data);
        out << "wrote " << data.size() << " records (" << positives << " positive, "
            << std::count(mask.begin(), mask.end(), 1) << " covered) to " << a.common.out << '\n'
            << "oracle written to " << oracle_path << '\n';
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Label models for binary weak supervision with positive-only labeling functions"};
    app.name("weapo");
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a label model on a dataset");
    fit_cmd->add_option("--train", fa.train, "Training dataset (JSONL)")->required();
    fit_cmd->add_option("--model", fa.model, "weapo | weapo-noprior | mv | ds | fs")->required();
    fa.prior_opt = fit_cmd->add_option("--prior", fa.prior, "Class prior p(y=+1)");
    fit_cmd->add_option("--edges-out", fa.edges_out, "Dump the covering edges as JSON");
    add_model_knobs(fit_cmd, fa.options);
    add_common(fit_cmd, fa.common, true, "Model file to write");

    EvalArgs ea;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a label model on the covered test records");
    eval_cmd->add_option("--model", ea.model, "Model file")->required();
    eval_cmd->add_option("--test", ea.test, "Test dataset (JSONL, with labels)")->required();
    add_common(eval_cmd, ea.common, false, "Result JSON path (default: stdout)");

    EndArgs na;
    auto* end_cmd = app.add_subcommand("end", "Train and evaluate the kernel ridge end model");
    end_cmd->add_option("--model", na.model, "Label model file")->required();
    end_cmd->add_option("--train", na.train, "Training dataset with features")->required();
    end_cmd->add_option("--test", na.test, "Test dataset with features and labels")->required();
    na.gamma_opt = end_cmd->add_option("--gamma", na.gamma, "RBF width (default 1/(F var X))");
    end_cmd->add_option("--alpha", na.alpha, "Ridge strength")->capture_default_str();
    end_cmd->add_option("--uncovered-target", na.uncovered_target, "Target for uncovered records")
        ->capture_default_str();
    add_common(end_cmd, na.common, false, "Result JSON path (default: stdout)");

    CompareArgs ca;
    auto* cmp_cmd = app.add_subcommand("compare", "Fit several label models and compare them");
    cmp_cmd->add_option("--train", ca.train, "Training dataset")->required();
    cmp_cmd->add_option("--test", ca.test, "Test dataset with labels")->required();
    cmp_cmd->add_option("--models", ca.models, "Comma-separated model list")->required()->delimiter(',');
    ca.prior_opt = cmp_cmd->add_option("--prior", ca.prior, "Class prior p(y=+1)");
    cmp_cmd->add_option("--oracle", ca.oracle, "Oracle sidecar from `synth` (adds an oracle row)");
    add_model_knobs(cmp_cmd, ca.options);
    add_common(cmp_cmd, ca.common, false, "Result JSON path (default: stdout)");

    SynthArgs sa;
    auto* syn_cmd = app.add_subcommand("synth", "Generate a synthetic dataset and its oracle");
    syn_cmd->add_option("--spec", sa.spec_path, "Spec JSON (flags below override it)");
    sa.n_opt = syn_cmd->add_option("--n", sa.n, "Number of records");
    sa.p_opt = syn_cmd->add_option("--p-plus", sa.p_plus, "Class prior");
    sa.tpr_opt = syn_cmd->add_option("--tpr", sa.tpr, "Per-LF firing rate on positives")->delimiter(',');
    sa.fpr_opt = syn_cmd->add_option("--fpr", sa.fpr, "Per-LF firing rate on negatives")->delimiter(',');
    syn_cmd->add_option("--feature-dim", sa.feature_dim, "Add Gaussian features of this width");
    syn_cmd->add_option("--separation", sa.separation, "Class mean distance in sigmas")->capture_default_str();
    syn_cmd->add_option("--sigma", sa.sigma, "Feature standard deviation")->capture_default_str();
    syn_cmd->add_option("--oracle-out", sa.oracle_out, "Oracle sidecar path (default <out>.oracle.json)");
    add_common(syn_cmd, sa.common, true, "Dataset file to write");
    sa.seed_opt = syn_cmd->get_option("--seed");

    std::vector<std::string> argv_store{"weapo"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fa, out);
        if (eval_cmd->parsed()) return cmd_eval(ea, out);
        if (end_cmd->parsed()) return cmd_end(na, out);
        if (cmp_cmd->parsed()) return cmd_compare(ca, out);
        if (syn_cmd->parsed()) return cmd_synth(sa, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    return kExitUsage;
}

}  // namespace weapo::cli
