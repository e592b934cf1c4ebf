#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aor/error.hpp"
#include "aor/rng.hpp"

namespace aor {

// Box in fractions of image width/height: 0 <= x1 < x2 <= 1, 0 <= y1 < y2 <= 1.
struct NormalizedBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  bool operator==(const NormalizedBox&) const = default;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
};

inline bool box_is_valid(const NormalizedBox& b) {
  return b.x1 >= 0.0 && b.y1 >= 0.0 && b.x2 <= 1.0 && b.y2 <= 1.0 && b.x1 < b.x2 && b.y1 < b.y2;
}

inline void require_valid(const NormalizedBox& b) {
  if (!box_is_valid(b)) {
    std::ostringstream msg;
    msg << "box (" << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2
        << ") violates 0 <= x1 < x2 <= 1, 0 <= y1 < y2 <= 1";
    throw Error(ErrorKind::InvalidBox, msg.str());
  }
}

inline NormalizedBox make_box(double x1, double y1, double x2, double y2) {
  NormalizedBox b{x1, y1, x2, y2};
  require_valid(b);
  return b;
}

// Pixel box -> fractions of the image size.
inline NormalizedBox normalize_box(double px1, double py1, double px2, double py2,
                                   double image_w, double image_h) {
  if (image_w <= 0 || image_h <= 0) {
    throw Error(ErrorKind::InvalidArgument, "image dimensions must be positive");
  }
  if (px1 < 0 || py1 < 0 || px2 > image_w || py2 > image_h || px1 >= px2 || py1 >= py2) {
    std::ostringstream msg;
    msg << "pixel box (" << px1 << ", " << py1 << ", " << px2 << ", " << py2
        << ") degenerate or outside " << image_w << "x" << image_h;
    throw Error(ErrorKind::InvalidBox, msg.str());
  }
  return NormalizedBox{px1 / image_w, py1 / image_h, px2 / image_w, py2 / image_h};
}

inline double iou(const NormalizedBox& a, const NormalizedBox& b) {
  require_valid(a);
  require_valid(b);
  const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return inter <= 0.0 ? 0.0 : inter / uni;
}

enum class PerturbMode {
  SharedOffset,        // one r for both axes, independent signs
  IndependentOffsets,  // fresh r per axis
};

// Translates the box by random offsets bounded by p per axis (offsets are
// fractions of the image size). Box dimensions are preserved; a box that
// would exit the image slides flush to the border. p must lie on the grid
// {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}.
inline NormalizedBox perturb_box(const NormalizedBox& box, double p, Rng& rng,
                                 PerturbMode mode = PerturbMode::SharedOffset) {
  require_valid(box);
  bool on_grid = false;
  for (int k = 0; k <= 5; ++k) {
    if (std::abs(p - 0.1 * k) < 1e-12) on_grid = true;
  }
  if (!on_grid) {
    throw Error(ErrorKind::InvalidArgument,
                "perturbation fraction p must be one of {0.0, 0.1, ..., 0.5}");
  }
  const double r1 = rng.uniform01() * p;
  const double r2 = mode == PerturbMode::SharedOffset ? r1 : rng.uniform01() * p;
  const double dx = rng.sign() * r1;
  const double dy = rng.sign() * r2;
  if (dx == 0.0 && dy == 0.0) return box;  // p == 0 stays bit-identical
  const double w = box.width();
  const double h = box.height();
  const double nx1 = std::clamp(box.x1 + dx, 0.0, 1.0 - w);
  const double ny1 = std::clamp(box.y1 + dy, 0.0, 1.0 - h);
  return NormalizedBox{nx1, ny1, nx1 + w, ny1 + h};
}

// Dense value grid covering the unit image square. Values live at cell
// centers: cell (row r, col c) sits at ((c + 0.5) / width, (r + 0.5) / height).
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int height, int width, int channels, double fill = 0.0)
      : height_(height), width_(width), channels_(channels) {
    if (height < 1 || width < 1 || channels < 1) {
      throw Error(ErrorKind::InvalidArgument, "feature map dimensions must be >= 1");
    }
    values_.assign(static_cast<std::size_t>(height) * width * channels, fill);
  }

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }

  double at(int row, int col, int ch) const { return values_[index(row, col, ch)]; }
  double& at(int row, int col, int ch) { return values_[index(row, col, ch)]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // Bilinear interpolation at normalized image coordinates, with border
  // values replicated outside the cell-center lattice.
  double sample(double x, double y, int ch) const {
    const double u = x * width_ - 0.5;
    const double v = y * height_ - 0.5;
    const int c0 = static_cast<int>(std::floor(u));
    const int r0 = static_cast<int>(std::floor(v));
    const double fu = u - c0;
    const double fv = v - r0;
    const int ca = std::clamp(c0, 0, width_ - 1);
    const int cb = std::clamp(c0 + 1, 0, width_ - 1);
    const int ra = std::clamp(r0, 0, height_ - 1);
    const int rb = std::clamp(r0 + 1, 0, height_ - 1);
    const double top = (1.0 - fu) * at(ra, ca, ch) + fu * at(ra, cb, ch);
    const double bot = (1.0 - fu) * at(rb, ca, ch) + fu * at(rb, cb, ch);
    return (1.0 - fv) * top + fv * bot;
  }

 private:
  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

struct RegionFeature {
  static constexpr int kGridSize = 14;

  int channels = 0;
  std::vector<double> grid;    // kGridSize x kGridSize x channels, row-major
  std::vector<double> pooled;  // per-channel mean over the grid

  double at(int gy, int gx, int ch) const {
    return grid[(static_cast<std::size_t>(gy) * kGridSize + gx) * channels + ch];
  }
};

// FPN-style assignment: level = clamp(floor(k0 + log2(sqrt(area))), 0, L-1)
// with k0 = L-1, so a full-image box lands on the coarsest level (index L-1)
// and vanishing boxes land on the finest (index 0).
inline int select_pyramid_level(const NormalizedBox& box, int num_levels) {
  if (num_levels < 1) throw Error(ErrorKind::InvalidArgument, "num_levels must be >= 1");
  require_valid(box);
  const double scale = std::sqrt(box.area());
  const double raw = static_cast<double>(num_levels - 1) + std::log2(scale);
  const int level = static_cast<int>(std::floor(raw));
  return std::clamp(level, 0, num_levels - 1);
}

namespace detail {

// Integral over [a, b] (cell-center coordinates) of the weight the clamped
// bilinear interpolant assigns to lattice index i, for every i in [0, n).
// The weights sum to b - a.
inline std::vector<double> axis_weights(double a, double b, int n) {
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  const double last = static_cast<double>(n - 1);
  // Clamped pieces outside the lattice take the border value.
  if (a < 0.0) w[0] += std::min(b, 0.0) - a;
  if (b > last) w[static_cast<std::size_t>(n - 1)] += b - std::max(a, last);
  double lo = std::max(a, 0.0);
  const double hi = std::min(b, last);
  while (lo < hi) {
    const int k = std::min(static_cast<int>(std::floor(lo)), n - 2);
    const double right = std::min(hi, static_cast<double>(k + 1));
    const double s = lo - k;
    const double t = right - k;
    const double ramp = (t * t - s * s) / 2.0;  // integral of (u - k)
    w[static_cast<std::size_t>(k)] += (t - s) - ramp;
    w[static_cast<std::size_t>(k) + 1] += ramp;
    lo = right;
  }
  return w;
}

}  // namespace detail

// Pools the selected pyramid level into a 14x14 grid over the box, then
// mean-pools to one value per channel. sampling_ratio == 0 computes the exact
// mean of the bilinear interpolant over each bin (separable hat integrals);
// sampling_ratio >= 1 averages that many midpoint samples per bin axis (2 is
// the conventional fixed configuration).
inline RegionFeature roi_align(const std::vector<FeatureMap>& pyramid, const NormalizedBox& box,
                               int sampling_ratio = 0) {
  if (pyramid.empty()) throw Error(ErrorKind::InvalidArgument, "empty feature pyramid");
  if (sampling_ratio < 0) throw Error(ErrorKind::InvalidArgument, "sampling_ratio must be >= 0");
  require_valid(box);
  const int level = select_pyramid_level(box, static_cast<int>(pyramid.size()));
  const FeatureMap& fm = pyramid[static_cast<std::size_t>(level)];

  constexpr int G = RegionFeature::kGridSize;
  RegionFeature out;
  out.channels = fm.channels();
  out.grid.assign(static_cast<std::size_t>(G) * G * fm.channels(), 0.0);
  out.pooled.assign(static_cast<std::size_t>(fm.channels()), 0.0);

  const double bw = box.width() / G;
  const double bh = box.height() / G;
  for (int gy = 0; gy < G; ++gy) {
    const double y0 = box.y1 + gy * bh;
    for (int gx = 0; gx < G; ++gx) {
      const double x0 = box.x1 + gx * bw;
      for (int ch = 0; ch < fm.channels(); ++ch) {
        double value = 0.0;
        if (sampling_ratio == 0) {
          // Exact bin mean in cell-center coordinates.
          const double ua = x0 * fm.width() - 0.5;
          const double ub = (x0 + bw) * fm.width() - 0.5;
          const double va = y0 * fm.height() - 0.5;
          const double vb = (y0 + bh) * fm.height() - 0.5;
          const auto wu = detail::axis_weights(ua, ub, fm.width());
          const auto wv = detail::axis_weights(va, vb, fm.height());
          double acc = 0.0;
          for (int r = 0; r < fm.height(); ++r) {
            if (wv[static_cast<std::size_t>(r)] == 0.0) continue;
            double row = 0.0;
            for (int c = 0; c < fm.width(); ++c) {
              if (wu[static_cast<std::size_t>(c)] == 0.0) continue;
              row += wu[static_cast<std::size_t>(c)] * fm.at(r, c, ch);
            }
            acc += wv[static_cast<std::size_t>(r)] * row;
          }
          value = acc / ((ub - ua) * (vb - va));
        } else {
          const int s = sampling_ratio;
          double acc = 0.0;
          for (int sy = 0; sy < s; ++sy) {
            const double y = y0 + bh * (sy + 0.5) / s;
            for (int sx = 0; sx < s; ++sx) {
              const double x = x0 + bw * (sx + 0.5) / s;
              acc += fm.sample(x, y, ch);
            }
          }
          value = acc / (s * s);
        }
        out.grid[(static_cast<std::size_t>(gy) * G + gx) * fm.channels() + ch] = value;
        out.pooled[static_cast<std::size_t>(ch)] += value;
      }
    }
  }
  for (auto& v : out.pooled) v /= static_cast<double>(G) * G;
  return out;
}

// --- feature map file format -----------------------------------------------
// One ASCII header line "aor-fmap <height> <width> <channels>\n" followed by
// height*width*channels little-endian float64 values in (row, col, channel)
// order.

inline void write_feature_map(const std::filesystem::path& path, const FeatureMap& fm) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "aor-fmap " << fm.height() << ' ' << fm.width() << ' ' << fm.channels() << '\n';
  out.write(reinterpret_cast<const char*>(fm.values().data()),
            static_cast<std::streamsize>(fm.values().size() * sizeof(double)));
  if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

inline FeatureMap read_feature_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorKind::Parse, path.string() + ": missing header");
  std::istringstream hs(header);
  std::string magic;
  int h = 0, w = 0, c = 0;
  hs >> magic >> h >> w >> c;
  if (magic != "aor-fmap" || !hs || h < 1 || w < 1 || c < 1) {
    throw Error(ErrorKind::Parse, path.string() + ": bad feature map header");
  }
  FeatureMap fm(h, w, c);
  in.read(reinterpret_cast<char*>(fm.values().data()),
          static_cast<std::streamsize>(fm.values().size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(fm.values().size() * sizeof(double))) {
    throw Error(ErrorKind::Parse, path.string() + ": truncated feature map payload");
  }
  for (double v : fm.values()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Parse, path.string() + ": non-finite value");
  }
  return fm;
}

}  // namespace aor
