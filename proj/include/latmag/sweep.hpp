#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latmag/estimation.hpp"
#include "latmag/lattice_field.hpp"
#include "latmag/spectrum.hpp"

namespace latmag {

inline constexpr const char* kVersion = "0.1.0";

enum class OutputFormat { csv, json };

struct SweepConfig {
  int n_x = 31;
  int n_y = 31;
  double m_x = 0.0;
  double b0_min = 0.05;
  double b0_max = 1.0;
  int b0_steps = 96;
  std::vector<int> grain_sizes = {1, 3, 5, 10};
  int k_eigenvalues = 10;
  double delta0 = 1e-4;
  double qfi_rel_tol = 1e-2;
  double delta_floor = 1e-7;
  double p_floor = 1e-14;
  std::uint64_t seed = 987654321;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  std::string dump_matrix_path;  // empty disables the matrix dump
  int threads = 0;               // 0 = hardware concurrency
};

struct SweepRecord {
  double b0 = 0.0;
  double qfi = 0.0;
  std::vector<double> fi;     // aligned with grain_sizes
  std::vector<double> ratio;  // F_g / H
  std::vector<double> eigenvalues;
  double gap = 0.0;
  double delta_used = 0.0;
  bool converged = false;
  std::string status = "ok";  // ok | invalid_profile | degenerate | solver_error | qfi_not_converged
};

struct SweepResult {
  SweepConfig effective;  // after lower-bound clamping
  double requested_b0_min = 0.0;
  bool clamped = false;
  std::vector<double> grid;
  std::vector<SweepRecord> records;
  std::vector<std::string> notes;
  bool complete = true;

  bool all_ok() const;
};

// One record per grid point; per-point failures land in the record's status
// and the sweep continues. Grid points run on a small worker pool but the
// output order is the grid order.
SweepResult run_sweep(const SweepConfig& config);

struct FamilyResult {
  SweepConfig base;
  std::vector<double> m_x_values;  // members actually run
  std::vector<SweepResult> sweeps;
  std::vector<std::pair<double, std::string>> skipped;  // (m_x, reason)
  // Per-b0 argmax of the QFI over the family, on the shared grid.
  std::vector<double> grid;
  std::vector<double> best_m_x;
  std::vector<double> best_qfi;
};

// Runs one sweep per gradient value on a shared grid covering the window
// valid for every member; members with an empty window are skipped with a
// logged reason.
FamilyResult run_gradient_family(const SweepConfig& base,
                                 const std::vector<double>& m_x_values);

// CSV: header plus one line per record, numbers at 17 significant digits,
// empty fields for unavailable values; run metadata goes to <path>.meta.json.
// JSON: single object with a metadata header and the records array.
void emit(const SweepResult& result, const std::string& path, OutputFormat format);

// Writes each member sweep to <stem>_mx<value>.<ext> plus the argmax summary
// to <stem>_summary.<ext>.
void emit_family(const FamilyResult& family, const std::string& stem,
                 OutputFormat format);

// 17-significant-digit serialization shared by every writer.
std::string format_double(double x);

}  // namespace latmag
