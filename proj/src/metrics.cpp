#include "fusekit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fusekit {

namespace {

void require_both_classes(const std::vector<double>& genuine,
                          const std::vector<double>& impostor) {
    if (genuine.empty() || impostor.empty())
        throw std::invalid_argument(
            "score set needs at least one genuine and one impostor trial (got " +
            std::to_string(genuine.size()) + " genuine, " +
            std::to_string(impostor.size()) + " impostor)");
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v, double mu) {
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

std::pair<double, double> confusion_rates(const std::vector<double>& genuine,
                                          const std::vector<double>& impostor,
                                          double threshold) {
    require_both_classes(genuine, impostor);
    // Match iff score >= threshold; ties count as match.
    std::size_t false_matches = 0;
    for (double s : impostor)
        if (s >= threshold) ++false_matches;
    std::size_t false_non_matches = 0;
    for (double s : genuine)
        if (s < threshold) ++false_non_matches;
    return {static_cast<double>(false_matches) / static_cast<double>(impostor.size()),
            static_cast<double>(false_non_matches) / static_cast<double>(genuine.size())};
}

RocCurve roc_curve(const std::vector<double>& genuine,
                   const std::vector<double>& impostor) {
    require_both_classes(genuine, impostor);

    std::vector<double> thresholds;
    thresholds.reserve(genuine.size() + impostor.size());
    thresholds.insert(thresholds.end(), genuine.begin(), genuine.end());
    thresholds.insert(thresholds.end(), impostor.begin(), impostor.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                     thresholds.end());

    // Sorted copies let each point be filled with a counter sweep instead of a
    // full rescan per threshold.
    std::vector<double> g_sorted = genuine;
    std::vector<double> i_sorted = impostor;
    std::sort(g_sorted.begin(), g_sorted.end());
    std::sort(i_sorted.begin(), i_sorted.end());
    const double n_g = static_cast<double>(g_sorted.size());
    const double n_i = static_cast<double>(i_sorted.size());

    RocCurve curve;
    curve.points.reserve(thresholds.size() + 2);
    // Sentinel below every score: everything matches.
    curve.points.push_back({thresholds.front() - 1.0, 1.0, 0.0});

    std::size_t g_below = 0, i_below = 0;
    for (double t : thresholds) {
        while (g_below < g_sorted.size() && g_sorted[g_below] < t) ++g_below;
        while (i_below < i_sorted.size() && i_sorted[i_below] < t) ++i_below;
        const double fmr = (n_i - static_cast<double>(i_below)) / n_i;
        const double fnmr = static_cast<double>(g_below) / n_g;
        curve.points.push_back({t, fmr, fnmr});
    }
    // Sentinel above every score: nothing matches.
    curve.points.push_back({thresholds.back() + 1.0, 0.0, 1.0});
    return curve;
}

double auc_pct(const std::vector<double>& genuine,
               const std::vector<double>& impostor) {
    const RocCurve curve = roc_curve(genuine, impostor);
    // Trapezoids over (fmr, 1 - fnmr); fmr decreases along the curve.
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        const double width = a.fmr - b.fmr;
        const double tpr_a = 1.0 - a.fnmr;
        const double tpr_b = 1.0 - b.fnmr;
        area += width * 0.5 * (tpr_a + tpr_b);
    }
    return 100.0 * area;
}

double eer_pct(const std::vector<double>& genuine,
               const std::vector<double>& impostor) {
    const RocCurve curve = roc_curve(genuine, impostor);
    // fmr - fnmr decreases monotonically in threshold: find the sign change.
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        const double da = a.fmr - a.fnmr;
        const double db = b.fmr - b.fnmr;
        if (da < 0.0) break;  // crossing already passed
        if (db > 0.0) continue;
        if (da == 0.0) return 100.0 * a.fmr;  // plateau: common error value
        if (db == 0.0) return 100.0 * b.fmr;
        const double u = da / (da - db);
        const double eer = a.fmr + u * (b.fmr - a.fmr);
        return 100.0 * eer;
    }
    // Monotone curves always cross between the sentinels.
    throw std::logic_error("ROC crossing not found");
}

OperatingPointResult error_at_operating_point(const std::vector<double>& genuine,
                                              const std::vector<double>& impostor,
                                              FixedRate fixed, double target_pct) {
    if (!(target_pct > 0.0) || !(target_pct < 100.0))
        throw std::invalid_argument("operating-point target must be in (0, 100) percent");
    const RocCurve curve = roc_curve(genuine, impostor);
    const double target = target_pct / 100.0;

    // Conservative step convention: largest fixed-rate value not above target;
    // among equal fixed rates, the smallest complementary error.
    OperatingPointResult best;
    double best_fixed = -1.0;
    bool best_is_sentinel = true;
    const std::size_t last = curve.points.size() - 1;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i];
        const double fixed_rate = fixed == FixedRate::fmr ? p.fmr : p.fnmr;
        const double other = fixed == FixedRate::fmr ? p.fnmr : p.fmr;
        if (fixed_rate > target) continue;
        if (fixed_rate > best_fixed ||
            (fixed_rate == best_fixed && other * 100.0 < best.value_pct)) {
            best_fixed = fixed_rate;
            best.value_pct = other * 100.0;
            best_is_sentinel = (i == 0 || i == last);
        }
    }
    best.degenerate = best_is_sentinel;
    return best;
}

double cohens_d(const std::vector<double>& genuine,
                const std::vector<double>& impostor) {
    if (genuine.size() < 2 || impostor.size() < 2)
        throw std::invalid_argument("Cohen's d needs >= 2 scores per class");
    const double mg = mean(genuine);
    const double mi = mean(impostor);
    const double ng = static_cast<double>(genuine.size());
    const double ni = static_cast<double>(impostor.size());
    const double pooled_var = ((ng - 1.0) * sample_var(genuine, mg) +
                               (ni - 1.0) * sample_var(impostor, mi)) /
                              (ng + ni - 2.0);
    if (pooled_var == 0.0) {
        if (mg == mi) return 0.0;  // identical constant classes: no effect
        throw std::invalid_argument(
            "Cohen's d undefined: pooled variance is zero with unequal means");
    }
    return (mg - mi) / std::sqrt(pooled_var);
}

double pearson_corr(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("pearson_corr: length mismatch " +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()));
    if (x.size() < 2)
        throw std::invalid_argument("pearson_corr needs >= 2 samples");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson_corr undefined for a constant sequence");
    return sxy / std::sqrt(sxx * syy);
}

CorrelationMatrix correlation_matrix(const TrialMatrix& m) {
    const std::size_t n = m.systems.size();
    std::vector<std::vector<double>> columns(n);
    for (const auto& [key, row] : m.rows)
        for (std::size_t i = 0; i < n; ++i) columns[i].push_back(row.scores[i]);

    CorrelationMatrix out;
    out.systems = m.systems;
    out.values.assign(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double v;
            try {
                v = pearson_corr(columns[i], columns[j]);
            } catch (const std::invalid_argument&) {
                // Constant column: this pair is undefined, not the whole matrix.
                v = std::numeric_limits<double>::quiet_NaN();
            }
            out.values[i][j] = v;
            out.values[j][i] = v;
        }
    }
    return out;
}

MetricsReport compute_report(const std::vector<double>& genuine,
                             const std::vector<double>& impostor) {
    MetricsReport r;
    r.auc_pct = auc_pct(genuine, impostor);
    r.eer_pct = eer_pct(genuine, impostor);
    r.cohens_d = cohens_d(genuine, impostor);
    r.fmr_at_fnmr1_pct =
        error_at_operating_point(genuine, impostor, FixedRate::fnmr, 1.0).value_pct;
    r.fnmr_at_fmr1_pct =
        error_at_operating_point(genuine, impostor, FixedRate::fmr, 1.0).value_pct;
    r.n_genuine = genuine.size();
    r.n_impostor = impostor.size();
    return r;
}

MetricsReport compute_report(const ScoreSet& s) {
    return compute_report(s.genuine_scores(), s.impostor_scores());
}

}  // namespace fusekit
