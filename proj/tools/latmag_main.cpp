#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latmag/sweep.hpp"

namespace {

void print_sweep_summary(const latmag::SweepResult& result, const std::string& path) {
  int bad = 0;
  for (const auto& rec : result.records) {
    if (rec.status != "ok") ++bad;
  }
  std::printf("wrote %zu records to %s (%d not ok)\n", result.records.size(),
              path.c_str(), bad);
  for (const auto& note : result.notes) std::printf("note: %s\n", note.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground-state magnetometry sweeps for a charged particle on a finite 2D lattice"};
  app.set_version_flag("--version", std::string("latmag ") + latmag::kVersion);
  app.set_config("--config", "", "flat key=value file; command line takes precedence");

  latmag::SweepConfig config;
  std::vector<double> mx_values{0.0};
  std::string format = "csv";
  std::string out_path;

  app.add_option("--nx", config.n_x, "lattice sites along x")->capture_default_str();
  app.add_option("--ny", config.n_y, "lattice sites along y")->capture_default_str();
  app.add_option("--mx", mx_values,
                 "field gradient; several comma-separated values run a gradient family")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--b0-min", config.b0_min, "lower end of the field sweep")
      ->capture_default_str();
  app.add_option("--b0-max", config.b0_max, "upper end of the field sweep")
      ->capture_default_str();
  app.add_option("--b0-steps", config.b0_steps, "number of grid points")
      ->capture_default_str();
  app.add_option("--grains", config.grain_sizes, "coarse-graining side lengths")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--k", config.k_eigenvalues, "number of low eigenvalues per point")
      ->capture_default_str();
  app.add_option("--delta0", config.delta0, "initial derivative step for the QFI/FI")
      ->capture_default_str();
  app.add_option("--seed", config.seed, "seed recorded in metadata for downstream sampling")
      ->capture_default_str();
  app.add_option("--out", out_path,
                 "output file (single sweep) or stem (gradient family)")
      ->required();
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--dump-matrix", config.dump_matrix_path,
                 "dump the Hamiltonian at the first grid point as sparse triplets");
  app.add_option("--threads", config.threads, "worker threads (0 = hardware)")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  config.format = format == "csv" ? latmag::OutputFormat::csv : latmag::OutputFormat::json;
  config.output_path = out_path;

  try {
    if (mx_values.size() == 1) {
      config.m_x = mx_values.front();
      const latmag::SweepResult result = latmag::run_sweep(config);
      latmag::emit(result, out_path, config.format);
      print_sweep_summary(result, out_path);
      return result.all_ok() ? 0 : 1;
    }

    const latmag::FamilyResult family = latmag::run_gradient_family(config, mx_values);
    latmag::emit_family(family, out_path, config.format);
    bool ok = true;
    for (std::size_t s = 0; s < family.sweeps.size(); ++s) {
      char tag[64];
      std::snprintf(tag, sizeof(tag), "%s_mx%g", out_path.c_str(),
                    family.m_x_values[s]);
      print_sweep_summary(family.sweeps[s], tag);
      ok = ok && family.sweeps[s].all_ok();
    }
    for (const auto& [m_x, reason] : family.skipped) {
      std::printf("skipped m_x = %g: %s\n", m_x, reason.c_str());
      ok = false;
    }
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
