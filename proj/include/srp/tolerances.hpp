#pragma once

namespace srp {

/// Numerical thresholds shared by every stage of the pipeline.
struct Tolerances {
  double pivot = 1e-10;        // relative to the largest sensor norm
  double ortho = 1e-9;         // |<e_i, e_j> - delta_ij|
  double recon = 1e-9;         // sensor reconstruction from frame rows
  double solve = 1e-11;        // triangular solve residual, scaled by 1 + |rhs|_inf
  double resid = 1e-9;         // per-sensor equation residual
  double disc_rel = 1e-9;      // discriminant clamp window, scaled by beta^2 + |4 alpha gamma| + 1
  double z_conv = 1e-3;        // vertex-iterate convergence, divergent-series case
  double approx_resid = 1e-2;  // acceptance window for limit-type (approximate) solutions
  double unit = 1e-9;          // | |x| - 1 | for points on the sphere
  double sph3b = 1e-9;         // |alpha - 1|, |beta - 1|, |gamma| for the continuum case
  double t_conv = 1e-2;        // interval width for the nested sublevel intersection
  double div_margin = 0.05;    // series classifier: growth between N/2 and N
  double conv_margin = 0.01;   // series classifier: last-quarter share of the total
  double antipode = 1e-9;      // relative match for -r^(1)
};

}  // namespace srp
