#pragma once

#include <cstdint>

#include "topoproj/dataset.hpp"
#include "topoproj/types.hpp"

namespace topoproj {

/// Stand-in for instrument spectra: each sample is driven by a 3-dimensional
/// latent u ~ U(0,1)^3 that shapes a smooth Gaussian-bump spectrum and a set
/// of smooth target functions. Targets are kept for every row (unlabeled
/// included) so any subset can be scored. The exact generator equations are
/// documented in the repository README.
struct SyntheticSpectra {
  Dataset unlabeled_x;  // columns ch_000..ch_{C-1}
  Dataset unlabeled_y;  // columns target_00..target_{T-1}
  Dataset labeled_x;
  Dataset labeled_y;
  Matrix latents_unlabeled;  // ground truth for generator self-checks
  Matrix latents_labeled;
};

/// Noiseless spectrum for a latent triple, sampled on n_channels points.
RowVector synth_spectrum(const Eigen::Ref<const RowVector>& u, Index n_channels);

/// Target vector for a latent triple: target k follows latent k % 3 with a
/// mild quadratic term and small cross-latent couplings, scaled to a
/// per-target magnitude so "original units" differ across targets.
RowVector synth_targets(const Eigen::Ref<const RowVector>& u, Index n_targets);

SyntheticSpectra generate_synthetic_spectra(Index n_unlabeled, Index n_labeled,
                                            Index n_channels = 512, Index n_targets = 13,
                                            std::uint64_t seed = 0, Scalar noise = 0.01);

}  // namespace topoproj
