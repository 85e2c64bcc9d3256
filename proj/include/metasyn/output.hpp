#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "metasyn/experiments.hpp"

namespace metasyn {

// CSV: model,seed,pattern_index,learning_acc,mean_acc
void write_traces_csv(std::ostream& os, const SweepResult& result);
// CSV: model,crossing_mean,crossing_std,ratio_vs_binary (empty ratio when undefined)
void write_summary_csv(std::ostream& os, const SweepResult& result);
// CSV: connectivity,activity,mean_acc_at_100,valid_flag
void write_cf_grid_csv(std::ostream& os, const SweepResult& result);
// CSV: size,learning_acc_final,mean_acc_final,valid_flag
void write_size_grid_csv(std::ostream& os, const SweepResult& result);

// Seed-averaged curves, one polyline per label.
std::string line_plot_svg(const SweepResult& result, bool mean_curves, const std::string& title);
// C (rows) by f (columns) heatmap of the final mean accuracy.
std::string heatmap_svg(const SweepResult& result, const std::string& title);

/// Writes the files for a result into dir (created if missing) and returns
/// their paths. Names are fixed per variant:
///   compare:    traces.csv, summary.csv [, mean_accuracy.svg, learning_accuracy.svg]
///   sweep-size: traces.csv, summary.csv, size_grid.csv [, mean_accuracy.svg]
///   sweep-cf:   cf_grid.csv [, cf_grid.svg]
/// Throws IoError when a file cannot be written.
std::vector<std::filesystem::path> write_outputs(const SweepResult& result, const std::filesystem::path& dir,
                                                 bool plots = true);

// Writes text to path, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace metasyn
