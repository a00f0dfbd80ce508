#pragma once

#include <span>

#include "fusekit/types.hpp"

namespace fusekit {

// L2 distance between two embeddings of equal dimension.
double euclidean_distance(const Embedding& a, const Embedding& b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Maps a distance d >= 0 to the a-posteriori match probability 1/(d+1),
// a strictly decreasing bijection from [0, inf) onto ]0, 1].
double distance_to_probability(double d);

// Scores every reference x probe pair. Labels derive from subject identity
// equality. Output is sorted by record key so the result is canonical.
ScoreSet score_trials(const std::vector<Embedding>& references,
                      const std::vector<Embedding>& probes,
                      const std::string& system_id,
                      const std::string& setting_id);

}  // namespace fusekit
