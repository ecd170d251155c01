#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "psido/config.hpp"
#include "psido/errors.hpp"
#include "psido/factorize.hpp"

namespace psido {

// Process exit codes: 1 config / input, 2 invariant, 3 numeric.
int exit_code(ErrorKind k);

struct ResidualFitRow {
  int j = 0;
  bool identically_zero = false;
  double slope = 0, bound = 0;
  bool pass = false;
};

// Order fits of gamma_j along rays inside the inner cone; bound is j - N + 0.3.
std::vector<ResidualFitRow> residual_fits(const FactorizationResult& r, const WaveModel& m);

// Stages write into cfg.output and record themselves in run_manifest.json.
// Each returns the process exit code; errors are thrown, not mapped.
int run_regularize(const RunConfig& cfg, std::ostream& log);
int run_factorize(const RunConfig& cfg, std::ostream& log);
int run_build_oneway(const RunConfig& cfg, std::ostream& log);
int run_solve(const RunConfig& cfg, std::ostream& log);
int run_diagnose(const RunConfig& cfg, std::ostream& log);
// Plain-text series from a run directory; exit 1 when the directory is incomplete.
int emit_plotdata(const std::string& run_dir, std::ostream& log);

}  // namespace psido
