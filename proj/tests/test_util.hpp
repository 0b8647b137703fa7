#pragma once

// Shared helpers for the test binaries.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "weapo/dataset.hpp"

namespace testutil {

inline weapo::Dataset dataset_from_votes(const std::vector<std::vector<std::uint8_t>>& votes,
                                         const std::vector<int>& gold = {}) {
    std::vector<weapo::Record> records;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        weapo::Record r;
        r.id = "r" + std::to_string(i);
        r.votes = weapo::VoteVector(votes[i]);
        if (!gold.empty()) r.gold = gold[i];
        records.push_back(std::move(r));
    }
    return weapo::Dataset(std::move(records), votes.front().size());
}

/// Votes drawn with per-LF firing rates in [0.05, fire_max + 0.05).
inline weapo::Dataset random_dataset(std::mt19937_64& rng, std::size_t m, std::size_t n, double fire_max) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> rate(m);
    for (double& r : rate) r = 0.05 + fire_max * u(rng);
    std::vector<std::vector<std::uint8_t>> votes(n, std::vector<std::uint8_t>(m));
    for (auto& v : votes) {
        for (std::size_t j = 0; j < m; ++j) v[j] = u(rng) < rate[j] ? 1 : 0;
    }
    return dataset_from_votes(votes);
}

inline weapo::VoteVector random_votes(std::mt19937_64& rng, std::size_t m) {
    weapo::VoteVector v;
    v.bits.resize(m);
    for (auto& b : v.bits) b = rng() & 1u;
    return v;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               ("weapo_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

}  // namespace testutil
