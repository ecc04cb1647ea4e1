// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rowsplat/projection.hpp"

#include <cstdint>

namespace rowsplat {

/// Closed-form eigendecomposition of a symmetric positive-definite 2x2
/// matrix: S = Q diag(eigenvalues) Q^T, eigenvalues descending,
/// det(Q) = +1. Throws NumericDomainError when S is not SPD.
struct Evd2 {
  Eigen::Vector2d eigenvalues;   // lambda_1 >= lambda_2 > 0
  Eigen::Matrix2d eigenvectors;  // columns, orthonormal, det +1
};
Evd2 evd_2x2(const Eigen::Matrix2d& s);

/// Per-splat constants of the two-step coordinate transform. `map` sends a
/// pixel offset (P - mean2d) to the whitened-and-rotated frame where the
/// squared norm equals the blending exponent and stepping one pixel column
/// moves along the +x axis only:
///   map * (1,0)^T = (col_step, 0)^T,   map^T map = inv_cov2d.
struct IrssParams {
  Eigen::Matrix2d map = Eigen::Matrix2d::Identity();
  Eigen::Vector2d mean2d = Eigen::Vector2d::Zero();
  double col_step = 1.0;                              // > 0
  Eigen::Vector2d row_step = Eigen::Vector2d::Zero(); // map * (0,1)^T
  double threshold = 0.0;  // squared-radius bound; <= 0 marks an empty footprint

  // splat attributes carried along for shading
  Eigen::Vector3f color = Eigen::Vector3f::Zero();
  float opacity = 0.0f;
  float depth = 0.0f;
  std::uint32_t source_index = 0;

  bool empty_footprint() const { return !(threshold > 0.0); }
};

/// Squared-radius truncation bound: min(9, 2 ln(o / alpha_min)). Values
/// <= 0 (opacity at or below alpha_min) mean no fragment can be significant.
double significance_threshold(double opacity, double alpha_min);

/// Builds the transform from the splat's inverse covariance (EVD + rotation
/// onto the column axis). A non-positive threshold yields the
/// empty-footprint marker instead of a usable transform.
IrssParams build_irss_params(const Splat2D& splat, float alpha_min);

/// One row's worth of shading work: the first in-range column and the
/// transformed-frame state shared by the rest of the row.
struct RowSegment {
  int row = 0;
  int first_col = 0;
  double x_first = 0.0;  // x'' at first_col's pixel center
  double y_sq = 0.0;     // y''^2, constant along the row
};

enum class RowLocateStatus { kFound, kRowSkipped, kNoIntersection };

struct RowLocate {
  RowLocateStatus status = RowLocateStatus::kNoIntersection;
  RowSegment segment;
};

/// Finds the first column in [col_begin, col_end] (inclusive, pixel centers)
/// whose fragment lies inside the truncated splat on pixel row `row`.
///   step 1: y''^2 > Th        -> kRowSkipped (whole row)
///   step 2: leftmost inside   -> that column
///   step 3: x'' already past the circle -> kNoIntersection; otherwise a
///           binary search over the monotone "inside or beyond" predicate.
RowLocate locate_first_fragment(const IrssParams& params, int row, int col_begin, int col_end);

/// Exponent of a fragment through the transform route: ||map * (P - mean)||^2.
double irss_exponent(const IrssParams& params, const Eigen::Vector2d& pixel_center);

}  // namespace rowsplat
