#pragma once
#include <optional>
#include <string>
#include <vector>

#include "cqnls/model.hpp"

namespace cqnls {

enum class Solver { strang, ifrk4, both };
enum class ZeroModePolicy { track, project };

struct SimConfig {
  int d = 3;
  int m = 64;
  double L = 64.0;
  double beta = 2.0;
  double eps = 0.05;
  double sigma = 4.0;  // default L/16
  double dt = 1e-3;
  double t_end = 4.0;
  Solver solver = Solver::both;
  bool dealias_rhs = true;
  ZeroModePolicy zero_mode = ZeroModePolicy::track;
  bool nonlinear = true;
  double blowup_threshold = 1e3;  // sup |psi| guard
  int diag_every = 100;           // steps between diagnostics rows
  std::vector<double> snapshot_times;  // exact multiples of dt expected
  unsigned long seed = 12345;
};

Field default_initial_u(const Grid& g, double eps, double sigma);

// one Strang step on psi: exp(i dt/2 Lap), exact phase flow of the
// modulus-preserving nonlinear factor, exp(i dt/2 Lap)
void step_strang_psi(Field& psi, double dt, double beta, bool nonlinear = true);

struct StateV {
  CoeffField vhat;
  double u2_mean = 0;
};

// one classical integrating-factor RK4 step for (i d/dt - H) v = N_v(u),
// advancing the companion mean of Im u with the same stages
void step_ifrk4_v(StateV& st, double dt, double beta, bool dealias_rhs,
                  bool nonlinear = true);

struct DiagRow {
  double t = 0;
  double energy = 0;
  double l2_u = 0;
  double l6_v = 0;
  double l6_uinv_v = 0;
  double u2_mean = 0;
  double zero_amp = 0;       // |hat v(0)|
  double boundary_frac = 0;  // wrap-around contamination monitor
  double cross_diff = 0;     // rel. L2 gap between the two solvers' psi
};

struct Snapshot {
  double t = 0;
  Field v;
  double u2_mean = 0;
};

struct Trajectory {
  std::vector<DiagRow> diagnostics;
  std::vector<Snapshot> snapshots;
  std::optional<Field> psi_final;    // from the Strang solver
  std::optional<StateV> v_final;     // from the IF-RK4 solver
  double max_cross_diff = 0;
};

Trajectory run(const SimConfig& cfg, const Field* u0_override = nullptr);

}  // namespace cqnls
