#include "latmag/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "latmag/hamiltonian.hpp"

#ifdef LATMAG_HAVE_OPENBLAS
extern "C" void openblas_set_num_threads(int);
#endif

namespace latmag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void pin_blas_threads() {
#ifdef LATMAG_HAVE_OPENBLAS
  static std::once_flag flag;
  // One BLAS thread per solve; parallelism lives at the grid level.
  std::call_once(flag, [] { openblas_set_num_threads(1); });
#endif
}

double max_center_distance_x(const LatticeSpec& spec) {
  const double x0 = static_cast<double>(spec.center_x());
  return std::max(std::abs(1.0 - x0), std::abs(static_cast<double>(spec.n_x) - x0));
}

void check_config(const SweepConfig& cfg) {
  if (!(cfg.b0_min < cfg.b0_max)) {
    throw std::invalid_argument("sweep window requires b0_min < b0_max");
  }
  if (cfg.b0_steps < 2) throw std::invalid_argument("sweep needs at least 2 grid points");
  if (cfg.grain_sizes.empty()) throw std::invalid_argument("grain size list is empty");
  if (cfg.k_eigenvalues < 1) throw std::invalid_argument("k_eigenvalues must be positive");
  if (!(cfg.delta0 > 0.0)) throw std::invalid_argument("delta0 must be positive");
}

EigenSolution solve_at(const LatticeSpec& spec, double b0, double m_x, int k) {
  const FieldProfile profile = make_profile(spec, b0, m_x);
  const VectorPotentialField potential = sample_vector_potential(spec, profile);
  const HamiltonianMatrix h = build_hamiltonian(spec, potential);
  return solve_lowest(h, k);
}

SweepRecord compute_point(const LatticeSpec& spec, const SweepConfig& cfg,
                          const std::vector<GrainPartition>& partitions, double b0) {
  SweepRecord rec;
  rec.b0 = b0;
  rec.qfi = rec.gap = rec.delta_used = kNaN;
  rec.fi.assign(cfg.grain_sizes.size(), kNaN);
  rec.ratio.assign(cfg.grain_sizes.size(), kNaN);
  rec.eigenvalues.assign(static_cast<std::size_t>(cfg.k_eigenvalues), kNaN);

  const ProfileValidation validation =
      validate_profile(spec, make_profile(spec, b0, cfg.m_x));
  if (!validation.ok) {
    rec.status = "invalid_profile";
    return rec;
  }

  // Ground states solved so far, keyed by field value. The derivative steps
  // repeat exact doubles, so lookups hit.
  std::map<double, Eigen::VectorXcd> cache;
  const auto ground_at = [&](double b) -> Eigen::VectorXcd {
    if (const auto it = cache.find(b); it != cache.end()) return it->second;
    EigenSolution sol = solve_at(spec, b, cfg.m_x, 2);
    if (sol.degenerate) {
      throw DegenerateError("degenerate ground state at b0 = " + std::to_string(b));
    }
    cache.emplace(b, sol.ground_state);
    return sol.ground_state;
  };

  try {
    const EigenSolution center = solve_at(spec, b0, cfg.m_x, cfg.k_eigenvalues);
    rec.eigenvalues = center.eigenvalues;
    rec.eigenvalues.resize(static_cast<std::size_t>(cfg.k_eigenvalues), kNaN);
    rec.gap = center.gap;
    if (center.degenerate) {
      rec.status = "degenerate";
      return rec;
    }
    cache.emplace(b0, center.ground_state);

    const QfiConvergence conv =
        qfi_converged(ground_at, b0, cfg.delta0, cfg.qfi_rel_tol, cfg.delta_floor);
    rec.qfi = conv.qfi;
    rec.delta_used = conv.delta_used;
    rec.converged = conv.converged;

    const Eigen::VectorXcd psi_plus = ground_at(b0 + 0.5 * conv.delta_used);
    const Eigen::VectorXcd psi_minus = ground_at(b0 - 0.5 * conv.delta_used);
    const std::vector<double> p_plus = site_probabilities(psi_plus);
    const std::vector<double> p_minus = site_probabilities(psi_minus);
    for (std::size_t gi = 0; gi < partitions.size(); ++gi) {
      const std::vector<double> grains_lo = grain_probabilities(p_minus, partitions[gi]);
      const std::vector<double> grains_hi = grain_probabilities(p_plus, partitions[gi]);
      const FisherResult fisher =
          fisher_information(grains_lo, grains_hi, conv.delta_used, cfg.p_floor);
      rec.fi[gi] = fisher.value;
      rec.ratio[gi] = rec.qfi > 0.0 ? fisher.value / rec.qfi : kNaN;
    }
    if (!conv.converged) rec.status = "qfi_not_converged";
  } catch (const DegenerateError&) {
    rec.status = "degenerate";
  } catch (const SolverError&) {
    rec.status = "solver_error";
  } catch (const std::exception&) {
    rec.status = "error";
  }
  return rec;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string json_number(double x) {
  if (!std::isfinite(x)) return "null";
  return format_double(x);
}

std::string csv_number(double x) {
  if (!std::isfinite(x)) return "";
  return format_double(x);
}

std::vector<std::string> record_columns(const SweepConfig& cfg) {
  std::vector<std::string> cols;
  cols.push_back("b0");
  cols.push_back("qfi");
  for (int g : cfg.grain_sizes) cols.push_back("fi_g" + std::to_string(g));
  for (int g : cfg.grain_sizes) cols.push_back("r_g" + std::to_string(g));
  for (int e = 0; e < cfg.k_eigenvalues; ++e) cols.push_back("e" + std::to_string(e));
  cols.push_back("gap");
  cols.push_back("delta_used");
  cols.push_back("status");
  return cols;
}

std::vector<double> record_values(const SweepRecord& rec) {
  std::vector<double> vals;
  vals.push_back(rec.b0);
  vals.push_back(rec.qfi);
  vals.insert(vals.end(), rec.fi.begin(), rec.fi.end());
  vals.insert(vals.end(), rec.ratio.begin(), rec.ratio.end());
  vals.insert(vals.end(), rec.eigenvalues.begin(), rec.eigenvalues.end());
  vals.push_back(rec.gap);
  vals.push_back(rec.delta_used);
  return vals;
}

std::string metadata_json(const SweepResult& result) {
  const SweepConfig& cfg = result.effective;
  std::ostringstream os;
  os << "{";
  os << "\"tool\":\"latmag\",";
  os << "\"version\":\"" << kVersion << "\",";
  os << "\"complete\":" << (result.complete ? "true" : "false") << ",";
  os << "\"config\":{";
  os << "\"n_x\":" << cfg.n_x << ",";
  os << "\"n_y\":" << cfg.n_y << ",";
  os << "\"m_x\":" << json_number(cfg.m_x) << ",";
  os << "\"b0_min\":" << json_number(cfg.b0_min) << ",";
  os << "\"b0_max\":" << json_number(cfg.b0_max) << ",";
  os << "\"b0_steps\":" << cfg.b0_steps << ",";
  os << "\"requested_b0_min\":" << json_number(result.requested_b0_min) << ",";
  os << "\"clamped\":" << (result.clamped ? "true" : "false") << ",";
  os << "\"grain_sizes\":[";
  for (std::size_t i = 0; i < cfg.grain_sizes.size(); ++i) {
    if (i) os << ",";
    os << cfg.grain_sizes[i];
  }
  os << "],";
  os << "\"k_eigenvalues\":" << cfg.k_eigenvalues << ",";
  os << "\"delta0\":" << json_number(cfg.delta0) << ",";
  os << "\"qfi_rel_tol\":" << json_number(cfg.qfi_rel_tol) << ",";
  os << "\"delta_floor\":" << json_number(cfg.delta_floor) << ",";
  os << "\"p_floor\":" << json_number(cfg.p_floor) << ",";
  os << "\"residual_tol\":" << json_number(SolverOptions{}.residual_tol) << ",";
  os << "\"degeneracy_rel\":" << json_number(SolverOptions{}.degeneracy_rel) << ",";
  os << "\"seed\":" << cfg.seed << ",";
  os << "\"format\":\"" << (cfg.format == OutputFormat::csv ? "csv" : "json") << "\"";
  os << "},";
  os << "\"notes\":[";
  for (std::size_t i = 0; i < result.notes.size(); ++i) {
    if (i) os << ",";
    os << "\"" << json_escape(result.notes[i]) << "\"";
  }
  os << "]}";
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output path: " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing output: " + path);
}

std::string mx_tag(double m_x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", m_x);
  return buf;
}

}  // namespace

bool SweepResult::all_ok() const {
  return std::all_of(records.begin(), records.end(),
                     [](const SweepRecord& r) { return r.status == "ok"; });
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

SweepResult run_sweep(const SweepConfig& config) {
  check_config(config);
  pin_blas_threads();

  const LatticeSpec spec = make_lattice(config.n_x, config.n_y);
  if (config.k_eigenvalues > spec.sites()) {
    throw std::invalid_argument("k_eigenvalues exceeds the Hilbert space dimension");
  }

  SweepResult result;
  result.requested_b0_min = config.b0_min;
  const double lower = std::max(config.b0_min, config.m_x * max_center_distance_x(spec));
  result.clamped = lower > config.b0_min;
  if (lower >= config.b0_max) {
    throw std::invalid_argument("b0 window is empty after the reversal clamp");
  }
  result.effective = config;
  result.effective.b0_min = lower;
  if (result.clamped) {
    result.notes.push_back("b0_min raised to the reversal bound " + format_double(lower));
  }

  const int steps = config.b0_steps;
  result.grid.resize(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    result.grid[static_cast<std::size_t>(i)] =
        lower + (config.b0_max - lower) * static_cast<double>(i) /
                    static_cast<double>(steps - 1);
  }

  std::vector<GrainPartition> partitions;
  partitions.reserve(config.grain_sizes.size());
  for (int g : config.grain_sizes) partitions.push_back(make_partition(spec, g));

  if (!config.dump_matrix_path.empty()) {
    const FieldProfile profile = make_profile(spec, result.grid.front(), config.m_x);
    const HamiltonianMatrix h =
        build_hamiltonian(spec, sample_vector_potential(spec, profile));
    dump_triplets(h, config.dump_matrix_path);
    result.notes.push_back("matrix dumped at b0 = " + format_double(result.grid.front()));
  }

  result.records.resize(result.grid.size());
  const unsigned hw = std::thread::hardware_concurrency();
  int n_threads = config.threads > 0 ? config.threads : static_cast<int>(hw ? hw : 1);
  n_threads = std::min<int>(n_threads, static_cast<int>(result.grid.size()));
  n_threads = std::max(n_threads, 1);

  std::atomic<std::size_t> cursor{0};
  const auto worker = [&] {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= result.grid.size()) break;
      result.records[i] = compute_point(spec, config, partitions, result.grid[i]);
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  result.complete = true;
  return result;
}

FamilyResult run_gradient_family(const SweepConfig& base,
                                 const std::vector<double>& m_x_values) {
  if (m_x_values.empty()) throw std::invalid_argument("gradient family is empty");
  check_config(base);
  const LatticeSpec spec = make_lattice(base.n_x, base.n_y);
  const double span = max_center_distance_x(spec);

  FamilyResult family;
  family.base = base;
  std::vector<double> kept;
  double common_min = base.b0_min;
  for (double m_x : m_x_values) {
    if (m_x < 0.0) {
      family.skipped.emplace_back(m_x, "negative gradient");
      continue;
    }
    const double lower = std::max(base.b0_min, m_x * span);
    if (lower >= base.b0_max) {
      family.skipped.emplace_back(m_x, "empty b0 window: reversal bound " +
                                           format_double(m_x * span) +
                                           " reaches b0_max");
      continue;
    }
    kept.push_back(m_x);
    common_min = std::max(common_min, lower);
  }
  if (kept.empty()) {
    throw std::invalid_argument("every family member has an empty b0 window");
  }

  // All members share one grid over the window valid for each of them, so the
  // per-b0 argmax below compares like with like.
  for (double m_x : kept) {
    SweepConfig cfg = base;
    cfg.m_x = m_x;
    cfg.b0_min = common_min;
    family.m_x_values.push_back(m_x);
    family.sweeps.push_back(run_sweep(cfg));
  }

  family.grid = family.sweeps.front().grid;
  family.best_m_x.assign(family.grid.size(), kNaN);
  family.best_qfi.assign(family.grid.size(), kNaN);
  for (std::size_t i = 0; i < family.grid.size(); ++i) {
    double best = -1.0;
    for (std::size_t s = 0; s < family.sweeps.size(); ++s) {
      const SweepRecord& rec = family.sweeps[s].records[i];
      if (rec.status != "ok" && rec.status != "qfi_not_converged") continue;
      if (std::isfinite(rec.qfi) && rec.qfi > best) {
        best = rec.qfi;
        family.best_m_x[i] = family.m_x_values[s];
        family.best_qfi[i] = rec.qfi;
      }
    }
  }
  return family;
}

void emit(const SweepResult& result, const std::string& path, OutputFormat format) {
  if (result.records.empty()) throw std::invalid_argument("emit: no records");
  const std::vector<std::string> cols = record_columns(result.effective);

  if (format == OutputFormat::csv) {
    std::ostringstream os;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) os << ",";
      os << cols[i];
    }
    os << "\n";
    for (const SweepRecord& rec : result.records) {
      const std::vector<double> vals = record_values(rec);
      for (const double v : vals) os << csv_number(v) << ",";
      os << rec.status << "\n";
    }
    write_file(path, os.str());
    write_file(path + ".meta.json", metadata_json(result) + "\n");
    return;
  }

  std::ostringstream os;
  os << "{\"metadata\":" << metadata_json(result) << ",\"records\":[";
  for (std::size_t r = 0; r < result.records.size(); ++r) {
    if (r) os << ",";
    const SweepRecord& rec = result.records[r];
    const std::vector<double> vals = record_values(rec);
    os << "{";
    for (std::size_t i = 0; i < vals.size(); ++i) {
      os << "\"" << cols[i] << "\":" << json_number(vals[i]) << ",";
    }
    os << "\"status\":\"" << json_escape(rec.status) << "\"}";
  }
  os << "]}\n";
  write_file(path, os.str());
}

void emit_family(const FamilyResult& family, const std::string& stem,
                 OutputFormat format) {
  const std::string ext = format == OutputFormat::csv ? ".csv" : ".json";
  for (std::size_t s = 0; s < family.sweeps.size(); ++s) {
    emit(family.sweeps[s], stem + "_mx" + mx_tag(family.m_x_values[s]) + ext, format);
  }

  std::ostringstream meta;
  meta << "{\"tool\":\"latmag\",\"version\":\"" << kVersion << "\",";
  meta << "\"members\":[";
  for (std::size_t s = 0; s < family.m_x_values.size(); ++s) {
    if (s) meta << ",";
    meta << json_number(family.m_x_values[s]);
  }
  meta << "],\"skipped\":[";
  for (std::size_t s = 0; s < family.skipped.size(); ++s) {
    if (s) meta << ",";
    meta << "{\"m_x\":" << json_number(family.skipped[s].first) << ",\"reason\":\""
         << json_escape(family.skipped[s].second) << "\"}";
  }
  meta << "]}";

  if (format == OutputFormat::csv) {
    std::ostringstream os;
    os << "b0,best_m_x,best_qfi\n";
    for (std::size_t i = 0; i < family.grid.size(); ++i) {
      os << csv_number(family.grid[i]) << "," << csv_number(family.best_m_x[i]) << ","
         << csv_number(family.best_qfi[i]) << "\n";
    }
    write_file(stem + "_summary.csv", os.str());
    write_file(stem + "_summary.csv.meta.json", meta.str() + "\n");
    return;
  }

  std::ostringstream os;
  os << "{\"metadata\":" << meta.str() << ",\"summary\":[";
  for (std::size_t i = 0; i < family.grid.size(); ++i) {
    if (i) os << ",";
    os << "{\"b0\":" << json_number(family.grid[i])
       << ",\"best_m_x\":" << json_number(family.best_m_x[i])
       << ",\"best_qfi\":" << json_number(family.best_qfi[i]) << "}";
  }
  os << "]}\n";
  write_file(stem + "_summary.json", os.str());
}

}  // namespace latmag
