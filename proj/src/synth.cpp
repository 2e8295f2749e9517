#include "topoproj/synth.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "topoproj/rng.hpp"

namespace topoproj {

namespace {

// Fixed bump layout: base centers spread over the channel axis, each shifted
// and scaled by one of the three latents so every latent leaves a visible,
// smooth signature in the spectrum.
struct Bump {
  Scalar center;
  Scalar width;
  int shift_latent;
  int amp_latent;
};

constexpr Bump kBumps[] = {
    {0.10, 0.040, 0, 1}, {0.25, 0.055, 1, 2}, {0.42, 0.035, 2, 0},
    {0.58, 0.060, 0, 2}, {0.74, 0.045, 1, 0}, {0.90, 0.050, 2, 1},
};

std::string zero_padded(const char* prefix, Index value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*lld", prefix, width, static_cast<long long>(value));
  return buf;
}

}  // namespace

RowVector synth_spectrum(const Eigen::Ref<const RowVector>& u, Index n_channels) {
  if (u.size() != 3) throw std::invalid_argument("synth_spectrum: latent must have 3 entries");
  if (n_channels < 2) throw std::invalid_argument("synth_spectrum: need at least 2 channels");
  RowVector spectrum(n_channels);
  for (Index c = 0; c < n_channels; ++c) {
    const Scalar t = static_cast<Scalar>(c) / static_cast<Scalar>(n_channels - 1);
    Scalar v = 0.2 + 0.15 * u(2) * t - 0.05 * t * t;  // gentle sloping baseline
    for (const Bump& b : kBumps) {
      const Scalar center = b.center + 0.05 * u(b.shift_latent);
      const Scalar amp = 0.4 + 0.6 * u(b.amp_latent);
      const Scalar z = (t - center) / b.width;
      v += amp * std::exp(-0.5 * z * z);
    }
    spectrum(c) = v;
  }
  return spectrum;
}

RowVector synth_targets(const Eigen::Ref<const RowVector>& u, Index n_targets) {
  if (u.size() != 3) throw std::invalid_argument("synth_targets: latent must have 3 entries");
  if (n_targets < 1) throw std::invalid_argument("synth_targets: need at least 1 target");
  // Per-target magnitudes cycle over decades so reported errors genuinely
  // live on different scales.
  constexpr Scalar kScales[] = {1.0, 10.0, 100.0, 0.1, 1000.0};
  RowVector y(n_targets);
  for (Index k = 0; k < n_targets; ++k) {
    const Index drive = k % 3;
    const Index other_a = (k + 1) % 3;
    const Index other_b = (k + 2) % 3;
    const Scalar scale = kScales[k % 5];
    y(k) = scale * (0.5 + u(drive) + 0.04 * u(other_a) + 0.02 * u(other_b) +
                    0.05 * (u(drive) - 0.5) * (u(drive) - 0.5));
  }
  return y;
}

SyntheticSpectra generate_synthetic_spectra(Index n_unlabeled, Index n_labeled, Index n_channels,
                                            Index n_targets, std::uint64_t seed, Scalar noise) {
  if (n_unlabeled < 1 || n_labeled < 1)
    throw std::invalid_argument("generate_synthetic_spectra: need at least 1 row in each set");
  if (noise < 0.0) throw std::invalid_argument("generate_synthetic_spectra: negative noise");

  SyntheticSpectra out;
  for (Index c = 0; c < n_channels; ++c)
    out.unlabeled_x.columns.push_back(zero_padded("ch_", c, 3));
  out.labeled_x.columns = out.unlabeled_x.columns;
  for (Index k = 0; k < n_targets; ++k)
    out.unlabeled_y.columns.push_back(zero_padded("target_", k, 2));
  out.labeled_y.columns = out.unlabeled_y.columns;

  Rng rng(seed);
  const auto fill = [&](Index n, Dataset& x, Dataset& y, Matrix& latents) {
    x.values.resize(n, n_channels);
    y.values.resize(n, n_targets);
    latents.resize(n, 3);
    RowVector u(3);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < 3; ++j) u(j) = rng.next_unit();
      latents.row(i) = u;
      RowVector spectrum = synth_spectrum(u, n_channels);
      if (noise > 0.0)
        for (Index c = 0; c < n_channels; ++c) spectrum(c) += rng.normal(0.0, noise);
      x.values.row(i) = spectrum;
      y.values.row(i) = synth_targets(u, n_targets);
    }
  };
  fill(n_unlabeled, out.unlabeled_x, out.unlabeled_y, out.latents_unlabeled);
  fill(n_labeled, out.labeled_x, out.labeled_y, out.latents_labeled);
  return out;
}

}  // namespace topoproj
