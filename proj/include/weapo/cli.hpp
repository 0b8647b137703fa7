#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "weapo/baselines.hpp"
#include "weapo/model_file.hpp"
#include "weapo/weapo.hpp"

namespace weapo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

struct FitOptions {
    WeapoConfig weapo;
    DSOptions ds;
    double eps_clip = 1e-4;
};

/// Canonical model name, resolving aliases ("weapo-prior" -> "weapo-noprior").
/// Throws UsageError for unknown names.
std::string canonical_model_name(const std::string& name);

/// Fits one label model on `train`. weapo and fs need a prior; ds uses it
/// (or 0.5) as its EM starting point. Baselines are fit on every record
/// after the abstain-to-negative conversion.
LabelModel fit_label_model(const std::string& name, const Dataset& train,
                           const std::optional<double>& prior, const FitOptions& options = {});

/// Entry point. `args` excludes the program name. Returns the exit code:
/// 0 success, 1 data/model error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weapo::cli
