#pragma once

#include "treemem/backend/scripted_backend.hpp"
#include "treemem/core/hyperparams.hpp"

#include <cstdint>
#include <nlohmann/json.hpp>
#include <vector>

namespace treemem::bench {

struct OracleFixture {
    backend::RandomScriptOptions options;
    int steps = 3;  ///< T, frames decoded after the prompt
};

/// `count` seeded fixtures with T cycling through 3..8. Regular fixtures
/// quantize IoUs to 2 decimals and key them on the bank, so score ties and
/// uncertain steps are common. Nested fixtures use full-precision IoUs that
/// depend only on (frame, candidate) and occlusion magnitudes above every
/// default threshold, so there are no ties and no uncertain steps.
std::vector<OracleFixture> oracle_fixtures(int count, std::uint64_t seed, bool nested);

struct OracleCase {
    std::uint64_t seed = 0;
    int steps = 0;
    double oracle_score = 0.0;
    double full_beam_score = 0.0;   ///< beam with P = 3^T
    bool full_beam_matches = false; ///< same candidate path and bit-identical score
    std::vector<double> beam_scores; ///< P = 1..4
    bool dominated = false;          ///< every beam score <= oracle score
    bool monotone = false;           ///< beam scores non-decreasing in P
};

OracleCase check_fixture(const OracleFixture& fixture, const Hyperparams& h = {});

struct OracleReport {
    std::vector<OracleCase> cases;
    bool all_match = true;
    bool all_dominated = true;
    bool all_monotone = true;

    nlohmann::json to_json() const;
};

OracleReport oracle_check(int count, std::uint64_t seed, bool nested, const Hyperparams& h = {});

}  // namespace treemem::bench
