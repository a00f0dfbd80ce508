#pragma once

#include <optional>

#include "fusekit/types.hpp"

namespace fusekit {

struct RocPoint {
    double threshold;
    double fmr;   // false match rate at this threshold
    double fnmr;  // false non-match rate
};

// Threshold-swept error rates, ordered by strictly increasing threshold.
// The first point is a sentinel below every score (fmr=1, fnmr=0) and the
// last a sentinel above every score (fmr=0, fnmr=1).
struct RocCurve {
    std::vector<RocPoint> points;
};

struct OperatingPointResult {
    double value_pct = 100.0;
    bool degenerate = false;  // target rate unreachable at any real threshold
};

// The five Table-style summary metrics of one score set.
struct MetricsReport {
    double auc_pct = 0.0;
    double eer_pct = 0.0;
    double cohens_d = 0.0;
    double fmr_at_fnmr1_pct = 0.0;
    double fnmr_at_fmr1_pct = 0.0;
    std::size_t n_genuine = 0;
    std::size_t n_impostor = 0;
};

struct CorrelationMatrix {
    std::vector<std::string> systems;
    // values[i][j]; NaN marks pairs undefined due to a constant column.
    std::vector<std::vector<double>> values;
};

// Decision rule everywhere: match iff score >= threshold.
std::pair<double, double> confusion_rates(const std::vector<double>& genuine,
                                          const std::vector<double>& impostor,
                                          double threshold);

RocCurve roc_curve(const std::vector<double>& genuine,
                   const std::vector<double>& impostor);

// Trapezoidal area under (fmr, 1-fnmr), in percent. Equals the Mann-Whitney
// statistic P(g > i) + 0.5 P(g = i), times 100.
double auc_pct(const std::vector<double>& genuine,
               const std::vector<double>& impostor);

// Percent error where fmr(t) crosses fnmr(t), linearly interpolated between
// bracketing ROC points; plateau crossings return the common plateau value.
double eer_pct(const std::vector<double>& genuine,
               const std::vector<double>& impostor);

enum class FixedRate { fmr, fnmr };

// Conservative step convention: picks the threshold with the largest fixed
// rate not exceeding target_pct and reports the complementary error rate.
OperatingPointResult error_at_operating_point(const std::vector<double>& genuine,
                                              const std::vector<double>& impostor,
                                              FixedRate fixed, double target_pct);

// (mean_g - mean_i) / pooled sample standard deviation.
double cohens_d(const std::vector<double>& genuine,
                const std::vector<double>& impostor);

double pearson_corr(const std::vector<double>& x, const std::vector<double>& y);

CorrelationMatrix correlation_matrix(const TrialMatrix& m);

MetricsReport compute_report(const ScoreSet& s);
MetricsReport compute_report(const std::vector<double>& genuine,
                             const std::vector<double>& impostor);

}  // namespace fusekit
