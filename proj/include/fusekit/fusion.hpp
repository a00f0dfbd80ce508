#pragma once

#include "fusekit/types.hpp"

namespace fusekit {

struct AlignResult {
    TrialMatrix matrix;
    // Per system, how many of its trials were absent from at least one other
    // system and therefore dropped by the strict intersection.
    std::map<std::string, std::size_t> dropped;
};

// Aligns N >= 2 score sets into trial-wise rows. Keeps only trials present in
// every set. System columns are ordered by sorted system_id so the result does
// not depend on input order.
AlignResult align_trials(const std::vector<ScoreSet>& sets);

ScoreSet fuse_avg(const TrialMatrix& m);
ScoreSet fuse_max(const TrialMatrix& m);
ScoreSet fuse_min(const TrialMatrix& m);

enum class FusionRule { avg, max, min };

FusionRule fusion_rule_from_string(const std::string& s);
const char* to_string(FusionRule r);
ScoreSet fuse(const TrialMatrix& m, FusionRule rule);

}  // namespace fusekit
