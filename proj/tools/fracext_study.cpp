// Convergence-study command line driver.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "fracext/study.hpp"

int main(int argc, char** argv) {
  using namespace fracext;
  CLI::App app{"Fractional diffusion on R^2 by extension and FEM-BEM coupling: convergence study"};
  StudyConfig cfg;
  int p_override = 0;
  double Y_override = 0.0;
  std::string samples_file;
  bool quiet = false;

  app.set_config("--config", "", "file of key=value lines using the option names; command-line flags win");
  app.add_option("--beta", cfg.beta, "fractional order in (0,1)")->capture_default_str();
  app.add_option("--s", cfg.s, "reaction coefficient s > 0")->capture_default_str();
  app.add_option("--sigma", cfg.sigma, "geometric grading factor in (0,1)")->capture_default_str();
  app.add_option("--levels", cfg.max_level, "finest refinement level m_max")->capture_default_str();
  app.add_option("--coef", cfg.coefficient, "diffusion coefficient")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, CoefficientChoice>{{"const", CoefficientChoice::identity},
                                                   {"radial", CoefficientChoice::radial}},
          CLI::ignore_case))
      ->default_str("const");
  app.add_option("--source", cfg.source, "right-hand side")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, SourceChoice>{{"bump", SourceChoice::bump}, {"paper", SourceChoice::paper}},
          CLI::ignore_case))
      ->default_str("bump");
  app.add_option("--domain", cfg.domain, "square:SIDE or a vertex file")->capture_default_str();
  app.add_option("--base-n", cfg.base_n, "subdivisions per side at level 0")->capture_default_str();
  app.add_option("--out", cfg.output, "CSV output path");
  app.add_option("--p-override", p_override, "fix p = L at every level");
  app.add_option("--Y-override", Y_override, "fix the cutoff Y at every level");
  app.add_option("--samples", samples_file, "file of sample points for pointwise errors");
  app.add_flag("-q,--quiet", quiet, "no progress output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.count("--p-override") > 0) cfg.p_override = p_override;
    if (app.count("--Y-override") > 0) cfg.Y_override = Y_override;
    if (!samples_file.empty()) cfg.samples = load_points(samples_file);
    StudyProgress progress;
    if (!quiet) {
      progress = [](const ConvergenceRecord& r) {
        std::fprintf(stderr, "level %d  h=%.4e  p=%d  Y=%.4e  modes=%zu  fem=%zu  bem=%zu  energy=%.12e\n", r.level,
                     r.h, r.p, r.Y, r.n_modes, r.ndof_fem, r.ndof_bem, r.energy);
      };
    }
    const StudyResult res = run_convergence_study(cfg, progress);
    if (cfg.output.empty()) std::cout << format_csv(res.records);
    if (cfg.output.empty() && !res.samples.empty()) std::cout << "\n" << format_samples_csv(res.samples);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
