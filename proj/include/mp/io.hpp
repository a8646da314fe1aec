#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mp/potentials.hpp"

namespace mp {

struct GrayImage {
  int height = 0, width = 0;
  std::vector<std::uint16_t> pixels;  // row-major

  std::uint16_t at(int h, int w) const { return pixels[static_cast<std::size_t>(h) * width + w]; }
};

/// Reads a P2 (ASCII) or P5 (binary) PGM with maxval up to 65535. P5 samples
/// above 255 are two bytes, most significant first.
GrayImage load_pgm(const std::string& path);

/// Writes a 16-bit binary (P5, maxval 65535) PGM.
void save_pgm(const std::string& path, const GrayImage& image);

/// Cost volumes travel as "MPCV1": the 5 magic bytes, then H, W, L as 32-bit
/// little-endian unsigned, then H*W*L finite little-endian float32 values,
/// row-major with label fastest.
namespace detail {
void write_cost_volume_file(const std::string& path, int h, int w, int l, const float* data);
std::vector<float> read_cost_volume_file(const std::string& path, int& h, int& w, int& l);
}  // namespace detail

template <class Real>
void save_cost_volume(const std::string& path, const UnaryVolume<Real>& vol) {
  std::vector<float> buf(vol.values.begin(), vol.values.end());
  detail::write_cost_volume_file(path, vol.height, vol.width, vol.labels, buf.data());
}

template <class Real>
UnaryVolume<Real> load_cost_volume(const std::string& path) {
  int h = 0, w = 0, l = 0;
  std::vector<float> buf = detail::read_cost_volume_file(path, h, w, l);
  UnaryVolume<Real> vol(h, w, l);
  for (std::size_t i = 0; i < buf.size(); ++i) vol.values[i] = static_cast<Real>(buf[i]);
  return vol;
}

/// Stereo data term: theta_i(d) = |left(y,x) - right(y,x-d)|, with the right
/// image's column clamped to its border when x-d falls outside.
template <class Real>
UnaryVolume<Real> stereo_unaries(const GrayImage& left, const GrayImage& right, int max_disp) {
  if (left.height != right.height || left.width != right.width)
    throw std::invalid_argument("stereo_unaries: image sizes differ");
  if (max_disp < 1 || max_disp > 256)
    throw std::invalid_argument("stereo_unaries: max_disp must be in [1, 256]");
  UnaryVolume<Real> vol(left.height, left.width, max_disp);
  for (int y = 0; y < left.height; ++y)
    for (int x = 0; x < left.width; ++x)
      for (int d = 0; d < max_disp; ++d) {
        const int xr = std::max(0, x - d);
        vol.at(y * left.width + x, d) =
            std::abs(static_cast<Real>(left.at(y, x)) - static_cast<Real>(right.at(y, xr)));
      }
  return vol;
}

/// Denoising data term: theta_i(lambda) = min(|I_i - lambda|^p, tau) with
/// p = 1 (tl) or 2 (tq); tau may be infinite.
template <class Real>
UnaryVolume<Real> denoise_unaries(const GrayImage& noisy, int labels, PairwiseKind kind,
                                  double tau) {
  if (kind != PairwiseKind::truncated_linear && kind != PairwiseKind::truncated_quadratic)
    throw std::invalid_argument("denoise_unaries: kind must be tl or tq");
  if (!(tau > 0)) throw std::invalid_argument("denoise_unaries: tau must be > 0");
  UnaryVolume<Real> vol(noisy.height, noisy.width, labels);
  for (int i = 0; i < vol.nodes(); ++i) {
    const double v = static_cast<double>(noisy.pixels[i]);
    for (int l = 0; l < labels; ++l) {
      double d = std::abs(v - l);
      if (kind == PairwiseKind::truncated_quadratic) d *= d;
      vol.at(i, l) = static_cast<Real>(std::min(d, tau));
    }
  }
  return vol;
}

struct EnergyRow {
  int iteration;  // 1-based
  double energy;
  double forward_ms;
};

void write_energy_csv(const std::string& path, const std::vector<EnergyRow>& rows);

/// Writes a labelling as a 16-bit PGM.
template <class Label>
void save_label_map(const std::string& path, int height, int width,
                    const std::vector<Label>& labels) {
  GrayImage img;
  img.height = height;
  img.width = width;
  img.pixels.assign(labels.begin(), labels.end());
  save_pgm(path, img);
}

}  // namespace mp
