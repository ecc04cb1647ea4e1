// SPDX-License-Identifier: Apache-2.0
#include "rowsplat/irss_core.hpp"

#include "rowsplat/tiling.hpp"
#include "render_detail.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rowsplat {

Evd2 evd_2x2(const Eigen::Matrix2d& s) {
  const double a = s(0, 0);
  const double b = 0.5 * (s(0, 1) + s(1, 0));
  const double c = s(1, 1);
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw NumericDomainError("evd_2x2: non-finite input");
  }

  const double half_trace = 0.5 * (a + c);
  const double disc = std::hypot(0.5 * (a - c), b);
  Evd2 out;
  out.eigenvalues[0] = half_trace + disc;
  out.eigenvalues[1] = half_trace - disc;
  if (!(out.eigenvalues[1] > 0.0)) {
    throw NumericDomainError("evd_2x2: matrix is not positive definite");
  }

  Eigen::Vector2d v1;
  if (b == 0.0) {
    v1 = (a >= c) ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 1.0);
  } else {
    // Two algebraically equivalent eigenvector forms; take the better
    // conditioned one.
    const Eigen::Vector2d cand1(b, out.eigenvalues[0] - a);
    const Eigen::Vector2d cand2(out.eigenvalues[0] - c, b);
    v1 = (cand1.squaredNorm() >= cand2.squaredNorm()) ? cand1 : cand2;
    v1.normalize();
  }
  out.eigenvectors.col(0) = v1;
  out.eigenvectors.col(1) = Eigen::Vector2d(-v1.y(), v1.x());  // det = +1
  return out;
}

double significance_threshold(double opacity, double alpha_min) {
  return std::min(9.0, 2.0 * std::log(opacity / alpha_min));
}

IrssParams build_irss_params(const Splat2D& splat, float alpha_min) {
  IrssParams p;
  p.mean2d = splat.mean2d.cast<double>();
  p.color = splat.color;
  p.opacity = splat.opacity;
  p.depth = splat.depth;
  p.source_index = splat.source_index;

  p.threshold = significance_threshold(splat.opacity, alpha_min);
  if (!(p.threshold > 0.0)) {
    p.threshold = 0.0;  // entirely insignificant splat
    return p;
  }

  const Evd2 evd = evd_2x2(splat.inv_cov2d.cast<double>());
  const Eigen::Matrix2d whiten =
      evd.eigenvalues.cwiseSqrt().asDiagonal() * evd.eigenvectors.transpose();

  // Rotate the whitened frame so one pixel column steps along +x only.
  const Eigen::Vector2d col_dir = whiten.col(0);
  p.col_step = col_dir.norm();
  const Eigen::Vector2d u = col_dir / p.col_step;
  Eigen::Matrix2d rot;
  rot << u.x(), u.y(), -u.y(), u.x();
  p.map = rot * whiten;
  p.row_step = p.map.col(1);
  return p;
}

double irss_exponent(const IrssParams& params, const Eigen::Vector2d& pixel_center) {
  return (params.map * (pixel_center - params.mean2d)).squaredNorm();
}

RowLocate locate_first_fragment(const IrssParams& params, int row, int col_begin, int col_end) {
  RowLocate out;
  if (params.empty_footprint() || col_end < col_begin) {
    out.status = RowLocateStatus::kNoIntersection;
    return out;
  }

  const double th = params.threshold;
  const Eigen::Vector2d left(col_begin + 0.5, row + 0.5);
  const Eigen::Vector2d v = params.map * (left - params.mean2d);
  const double y_sq = v.y() * v.y();
  if (y_sq > th) {
    out.status = RowLocateStatus::kRowSkipped;
    return out;
  }

  const double x0 = v.x();
  const auto x_at = [&](int col) {
    return std::fma(static_cast<double>(col - col_begin), params.col_step, x0);
  };
  if (x0 * x0 + y_sq <= th) {
    out.status = RowLocateStatus::kFound;
    out.segment = {row, col_begin, x0, y_sq};
    return out;
  }
  if (x0 > 0.0) {
    // Already to the right of the circle; col_step > 0 only moves further out.
    out.status = RowLocateStatus::kNoIntersection;
    return out;
  }

  // Binary search over the monotone "inside or beyond" predicate.
  const auto inside_or_beyond = [&](int col) {
    const double x = x_at(col);
    return x >= 0.0 || x * x + y_sq <= th;
  };
  if (!inside_or_beyond(col_end)) {
    out.status = RowLocateStatus::kNoIntersection;  // range ends left of the circle
    return out;
  }
  int lo = col_begin;  // predicate false
  int hi = col_end;    // predicate true
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (inside_or_beyond(mid) ? hi : lo) = mid;
  }
  const double x = x_at(hi);
  if (x * x + y_sq <= th) {
    out.status = RowLocateStatus::kFound;
    out.segment = {row, hi, x, y_sq};
  } else {
    // Jumped clean across: the in-range interval holds no pixel center.
    out.status = RowLocateStatus::kNoIntersection;
  }
  return out;
}

void RowWorkStats::add_fragment(int tile_ordinal, std::uint32_t gaussian, int row_in_tile) {
  auto& list = tiles[static_cast<std::size_t>(tile_ordinal)];
  if (list.empty() || list.back().gaussian != gaussian) {
    list.push_back(GaussianRows{gaussian, {}});
  }
  ++list.back().rows[static_cast<std::size_t>(row_in_tile)];
}

bool RowWorkStats::empty() const {
  return std::all_of(tiles.begin(), tiles.end(), [](const auto& t) { return t.empty(); });
}

namespace {

// Depth-ascending order over non-culled splats, ties by index: the global
// order whose restriction to any tile equals that tile's sorted list.
std::vector<std::uint32_t> depth_order(std::span<const std::optional<Splat2D>> splats) {
  std::vector<std::uint32_t> order;
  order.reserve(splats.size());
  for (std::uint32_t i = 0; i < splats.size(); ++i) {
    if (splats[i].has_value()) {
      order.push_back(i);
    }
  }
  std::sort(order.begin(), order.end(), [&](std::uint32_t l, std::uint32_t r) {
    const float dl = splats[l]->depth, dr = splats[r]->depth;
    return dl != dr ? dl < dr : l < r;
  });
  return order;
}

template <class A>
void shade_gaussian(const IrssParams& params, const Splat2D& splat, int width, int height,
                    const RenderConfig& config, ImageBuffer& image, FlopCounters& counters,
                    RowWorkStats& row_work) {
  using R = typename A::Real;

  const float radius = truncation_radius(splat);
  const int y0 = std::max(0, static_cast<int>(std::floor(splat.mean2d.y() - radius)) - 1);
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(splat.mean2d.y() + radius)));
  const int x0 = std::max(0, static_cast<int>(std::floor(splat.mean2d.x() - radius)) - 1);
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(splat.mean2d.x() + radius)));

  const std::uint64_t shared_flops = config.transform1_only_flops
                                         ? detail::kTransform1ExponentFlops
                                         : detail::kSharedExponentFlops;
  const int tiles_x = row_work.tiles_x;

  for (int y = y0; y <= y1; ++y) {
    const RowLocate loc = locate_first_fragment(params, y, x0, x1);
    if (loc.status == RowLocateStatus::kRowSkipped) {
      ++counters.rows_skipped;
      continue;
    }
    if (loc.status == RowLocateStatus::kNoIntersection) {
      continue;
    }

    const RowSegment& seg = loc.segment;
    // Precision-path row state (the double decision state lives in seg).
    R x_val = A::round(static_cast<R>(seg.x_first));
    const R y_sq_val = A::round(static_cast<R>(seg.y_sq));
    const R step_val = static_cast<R>(params.col_step);

    const int tile_row = y / kTileSize * tiles_x;
    const int row_in_tile = y % kTileSize;
    bool first = true;
    for (int col = seg.first_col; col <= x1; ++col) {
      const int k = col - seg.first_col;
      const double xd = std::fma(static_cast<double>(k), params.col_step, seg.x_first);
      if (xd * xd + seg.y_sq > params.threshold) {
        break;  // last fragment passed; the probe itself is uncounted
      }
      counters.exponent_flops += first ? detail::kDirectExponentFlops : shared_flops;
      ++counters.fragments_evaluated;
      ++counters.fragments_significant;

      R q;
      if constexpr (A::kSequentialRow) {
        if (!first) {
          x_val = A::round(x_val + step_val);
        }
        q = A::round(A::round(x_val * x_val) + y_sq_val);
      } else {
        const R x = static_cast<R>(std::fma(static_cast<R>(k), step_val, static_cast<R>(seg.x_first)));
        q = x * x + y_sq_val;
      }
      const R a = detail::alpha_from_exponent<A>(q, splat.opacity, config);
      const std::size_t pixel = image.pixel_index(col, y);
      if (detail::blend_fragment<A>(image, pixel, a, splat.color, config)) {
        counters.blend_flops += detail::kBlendFlops;
      }
      row_work.add_fragment(tile_row + col / kTileSize, params.source_index, row_in_tile);
      first = false;
    }
    if (!first) {
      ++counters.row_segments;
    }
  }
}

}  // namespace

IrssResult render_irss_splats(std::span<const std::optional<Splat2D>> splats, int width,
                              int height, const RenderConfig& config) {
  const std::vector<std::uint32_t> order = depth_order(splats);

  const int tiles_x = (width + kTileSize - 1) / kTileSize;
  const int tiles_y = (height + kTileSize - 1) / kTileSize;

  IrssResult result{ImageBuffer(width, height, config.background), FlopCounters{},
                    RowWorkStats(tiles_x, tiles_y)};

  const std::size_t chunk = config.chunk_size == 0 ? order.size() : config.chunk_size;
  detail::dispatch_precision(config.precision, [&](auto arith) {
    using A = decltype(arith);
    for (std::size_t begin = 0; begin < order.size(); begin += chunk) {
      const std::size_t end = std::min(order.size(), begin + chunk);
      for (std::size_t i = begin; i < end; ++i) {
        const Splat2D& splat = *splats[order[i]];
        const IrssParams params = build_irss_params(splat, config.alpha_min);
        if (params.empty_footprint()) {
          ++result.counters.gaussians_skipped;
          continue;
        }
        shade_gaussian<A>(params, splat, width, height, config, result.image, result.counters,
                          result.row_work);
      }
    }
  });
  return result;
}

IrssResult render_irss(const Scene& scene, const Camera& camera, const RenderConfig& config) {
  camera.validate();
  const std::vector<std::optional<Splat2D>> splats = project_scene(scene, camera);
  return render_irss_splats(splats, camera.width, camera.height, config);
}

}  // namespace rowsplat
