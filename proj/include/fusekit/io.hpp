#pragma once

#include <string>
#include <vector>

#include "fusekit/harness.hpp"
#include "fusekit/metrics.hpp"
#include "fusekit/types.hpp"
#include "fusekit/view.hpp"

namespace fusekit {

// All writers go through a temp file + rename so readers never observe a
// partially written output.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Embedding CSV: header subject_id,sample_id,setting_id,dim,v0,v1,...
std::string write_embeddings_csv(const std::vector<Embedding>& embs);
std::vector<Embedding> parse_embeddings_csv(const std::string& text);

// Binary variant: magic "FEV1", little-endian u32 dim, u32 count, then per
// record three NUL-terminated strings and dim little-endian f64.
std::string write_embeddings_fev1(const std::vector<Embedding>& embs);
std::vector<Embedding> parse_embeddings_fev1(const std::string& bytes);

std::vector<Embedding> load_embeddings(const std::string& path);

// Score CSV: header system_id,setting_id,reference_subject,probe_subject,
// probe_sample,label,score; scores printed with 9 significant digits.
std::string write_scores_csv(const ScoreSet& s);
ScoreSet parse_scores_csv(const std::string& text);
ScoreSet load_scores(const std::string& path);

std::string write_roc_csv(const RocCurve& curve);

// Table 1/2 shaped report: method,auc_pct,eer_pct,cohens_d,fmr_at_fnmr1,fnmr_at_fmr1
std::string write_report_csv(const std::vector<MethodReport>& rows);
std::vector<MethodReport> parse_report_csv(const std::string& text);

std::string write_correlation_csv(const CorrelationMatrix& m);

// Per-setting breakdown: method,train_setting,test_setting,<metrics...>
std::string write_breakdown_csv(const std::vector<SettingResult>& results);

// Standalone SVG plots.
std::string render_roc_svg(const RocCurve& curve, const std::string& title);
// Grouped bar chart, one group per method and one bar per setting.
std::string render_bar_svg(const std::vector<SettingResult>& results,
                           const std::string& metric, const std::string& title);

// 8-bit PNG; channels 1 (gray) or 3 (RGB).
std::string encode_png(const ViewImage& img);
void write_png(const std::string& path, const ViewImage& img);

std::string format_score(double v);  // 9 significant digits

}  // namespace fusekit
