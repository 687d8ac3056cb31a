#include "dscrf/flow.hpp"

#include <algorithm>
#include <cmath>

namespace dscrf {

void FlowSettings::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DataError("flow smoothness weight must be positive and finite");
  }
  if (iterations < 1) {
    throw DataError("flow iteration count must be at least 1");
  }
  if (!(presmooth >= 0.0) || !std::isfinite(presmooth)) {
    throw DataError("flow presmooth sigma must be non-negative");
  }
}

namespace {

inline int clampi(int v, int lo, int hi) { return std::clamp(v, lo, hi); }

// Central difference with replicated borders.
double central_x(const std::vector<double>& img, int w, int x, int y) {
  const int xl = clampi(x - 1, 0, w - 1);
  const int xr = clampi(x + 1, 0, w - 1);
  return 0.5 * (img[y * w + xr] - img[y * w + xl]);
}

double central_y(const std::vector<double>& img, int w, int h, int x, int y) {
  const int yu = clampi(y - 1, 0, h - 1);
  const int yd = clampi(y + 1, 0, h - 1);
  return 0.5 * (img[yd * w + x] - img[yu * w + x]);
}

// Separable Gaussian blur with replicated borders. Widens the support of
// edge gradients so the linearized constraint survives multi-pixel shifts.
std::vector<double> gaussian_blur(const std::vector<double>& img, int w, int h,
                                  double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * (k * k) / (sigma * sigma));
    sum += kernel[k + radius];
  }
  for (double& v : kernel) v /= sum;

  std::vector<double> tmp(img.size()), out(img.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * img[y * w + clampi(x + k, 0, w - 1)];
      }
      tmp[y * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * tmp[clampi(y + k, 0, h - 1) * w + x];
      }
      out[y * w + x] = acc;
    }
  }
  return out;
}

// Weighted neighborhood average from the classic Horn-Schunck scheme:
// 1/6 on the 4-neighbors, 1/12 on the diagonals, replicated borders.
double local_average(const std::vector<double>& f, int w, int h, int x,
                     int y) {
  const int xl = clampi(x - 1, 0, w - 1);
  const int xr = clampi(x + 1, 0, w - 1);
  const int yu = clampi(y - 1, 0, h - 1);
  const int yd = clampi(y + 1, 0, h - 1);
  const double cross =
      f[y * w + xl] + f[y * w + xr] + f[yu * w + x] + f[yd * w + x];
  const double diag =
      f[yu * w + xl] + f[yu * w + xr] + f[yd * w + xl] + f[yd * w + xr];
  return cross / 6.0 + diag / 12.0;
}

}  // namespace

FlowField dense_flow(const Frame& prev, const Frame& curr,
                     const FlowSettings& settings) {
  settings.validate();
  if (prev.width() != curr.width() || prev.height() != curr.height()) {
    throw DataError("dense_flow: frame dimensions differ");
  }
  const int w = prev.width();
  const int h = prev.height();
  const int n = w * h;

  std::vector<double> i1 = prev.gray_plane();
  std::vector<double> i2 = curr.gray_plane();
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(i1[i]) || !std::isfinite(i2[i])) {
      throw NumericalError("dense_flow: non-finite intensity");
    }
  }
  if (settings.presmooth > 0.0) {
    i1 = gaussian_blur(i1, w, h, settings.presmooth);
    i2 = gaussian_blur(i2, w, h, settings.presmooth);
  }

  // Spatial gradients on the temporal average, temporal difference curr-prev.
  std::vector<double> gx(n), gy(n), gt(n), avg(n);
  for (int i = 0; i < n; ++i) avg[i] = 0.5 * (i1[i] + i2[i]);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int i = y * w + x;
      gx[i] = central_x(avg, w, x, y);
      gy[i] = central_y(avg, w, h, x, y);
      gt[i] = i2[i] - i1[i];
    }
  }

  const double alpha2 = settings.alpha * settings.alpha;
  std::vector<double> u(n, 0.0), v(n, 0.0), un(n), vn(n);
  for (int iter = 0; iter < settings.iterations; ++iter) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int i = y * w + x;
        const double ubar = local_average(u, w, h, x, y);
        const double vbar = local_average(v, w, h, x, y);
        const double t = (gx[i] * ubar + gy[i] * vbar + gt[i]) /
                         (alpha2 + gx[i] * gx[i] + gy[i] * gy[i]);
        un[i] = ubar - gx[i] * t;
        vn[i] = vbar - gy[i] * t;
      }
    }
    u.swap(un);
    v.swap(vn);
  }

  return FlowField(w, h, std::move(u), std::move(v));
}

int round_half_away(double v) {
  return static_cast<int>(std::lround(v));
}

IntOffsetField round_flow(const FlowField& flow) {
  IntOffsetField out;
  out.width = flow.width();
  out.height = flow.height();
  out.dx.resize(flow.size());
  out.dy.resize(flow.size());
  for (int i = 0; i < flow.size(); ++i) {
    out.dx[i] = round_half_away(flow.vx(i));
    out.dy[i] = round_half_away(flow.vy(i));
  }
  return out;
}

}  // namespace dscrf
