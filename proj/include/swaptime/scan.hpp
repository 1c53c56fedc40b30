#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "swaptime/costate.hpp"
#include "swaptime/propagate.hpp"

namespace swaptime {

// Grid scan over closed-loop adjoint shooting: each grid point seeds the
// adjoint state, the induced feedback control drives both systems, and the
// swap-overlap functionals are tracked along the way.
struct ScanConfig {
  SystemParams p;
  double horizon = 0.0;
  int theta_points = 61;
  int bx0_points = 61;
  // Integration step; nonpositive means the default 0.005 / omega.
  double step = 0.0;
};

// Result for one grid point.  first_hit is the earliest step end at which
// either overlap functional exceeded 1 - 1e-6, when that ever happens.
struct ScanRecord {
  double theta = 0.0;
  double bx0 = 0.0;
  double l_value = 0.0;
  double max_f_plus = 0.0;
  double max_f_minus = 0.0;
  std::optional<double> first_hit;
};

struct ScanField {
  int theta_points = 0;
  int bx0_points = 0;
  // theta-major: records[it * bx0_points + ib].
  std::vector<ScanRecord> records;
};

// Overlap level that counts as reaching a swap-equivalent pair.
inline constexpr double hit_threshold = 1e-6;

// Adjoint seed on the unit shell: b = (bx0, 0, 0),
// c = sqrt(1 - bx0^2) (sin theta, -cos theta, 0).  theta in [0, pi],
// bx0 in [0, 1]; theta = 0 or pi and bx0 = 0 or 1 form the L = 0 boundary.
CostateState initial_costate(double theta, double bx0, const SystemParams& p);

// F+ = |x1_01 - x2_01|^2 / 4 and F- = |x1_01 + x2_01|^2 / 4 from the (0,1)
// entries of the two propagators.  F+ = 1 exactly when the pair realizes
// opposite-sign swap-equivalent targets, F- = 1 for the equal-sign pair.
std::pair<double, double> f_plus_minus(const UnitaryPair& pair);

// Integrates adjoint + both systems from one seed and reports the overlap
// maxima and first threshold crossing.  While |b| < mu_min the control holds
// its previous value (initially zero).
ScanRecord scan_trajectory(double theta, double bx0, const SystemParams& p,
                           double horizon, double step);

// Full grid, computed in parallel; identical output for any worker count.
ScanField run_scan(const ScanConfig& cfg);

enum class ExportFormat { csv, json };

// Serializes the field.  CSV columns:
// theta,bx0,L,maxFplus,maxFminus,firstHit (firstHit empty when absent).
// JSON is a flat array of objects with those keys (firstHit null when absent).
std::string format_field(const ScanField& field, ExportFormat fmt);
void export_field(const ScanField& field, const std::string& path, ExportFormat fmt);

// Index of the most promising grid point under the total order: points with a
// first hit come first, earlier hits before later ones; hitless points are
// ranked by their larger overlap maximum, higher first.  Ties keep the lower
// index.
std::size_t field_argmin(const ScanField& field);

// Does the record sit on the L = 0 boundary of the seed rectangle?
bool on_l0_boundary(const ScanRecord& rec);

}  // namespace swaptime
