//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_SSL_H_
#define PEPVIEW_SSL_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pepview/nn.h"

namespace pepview {

/// Aligned per-peptide embeddings of the two views. Row b of h_x and h_y
/// belong to ids[b].
struct EmbeddingBatch {
  Matrix h_x;  // sequence view, B x D
  Matrix h_y;  // structure view, B x D
  std::vector<Matrix> residues_x;
  std::vector<std::string> ids;
};

enum class LossKind { kContrastive, kGenerative, kBoth };

std::string_view to_string(LossKind kind);
// Accepts contrastive|infonce, generative|vae, both.
LossKind parse_loss_kind(std::string_view text);

struct SslConfig {
  LossKind loss = LossKind::kContrastive;
  double temperature = 1.0;
  // Weight of the generative term in LossKind::kBoth.
  double generative_weight = 1.0;

  bool uses_contrastive() const { return loss != LossKind::kGenerative; }
  bool uses_generative() const { return loss != LossKind::kContrastive; }
  void validate() const;
};

double score(std::span<const double> a, std::span<const double> b);

struct InfoNceResult {
  double loss;
  Matrix d_hx;
  Matrix d_hy;
};

/// Symmetric InfoNCE with in-batch negatives. With S = h_x h_y^T / tau the
/// loss is the mean of the row-wise and column-wise cross entropies against
/// the diagonal.
InfoNceResult infonce_loss(const Matrix &h_x, const Matrix &h_y,
                           double temperature = 1.0);

// sum_d 0.5 * (mu^2 + exp(logvar) - 1 - logvar)
double kl_diag_gaussian(std::span<const double> mu,
                        std::span<const double> logvar);

struct VrrConfig {
  int latent = 32;
  double beta = 1.0;
  int mc_samples = 1;

  void validate() const;
};

/// Variational heads and decoders for both views. The x heads encode the
/// sequence embedding and decode toward the structure embedding; the y
/// heads do the reverse.
class VrrHeads {
public:
  VrrHeads() = default;
  VrrHeads(int hidden, const VrrConfig &config, Rng &rng);

  void collect(const std::string &prefix, std::vector<NamedParameter> &out);

  VrrConfig config;
  Linear mu_x, logvar_x, decoder_x;
  Linear mu_y, logvar_y, decoder_y;
};

struct VrrResult {
  double loss;
  double reconstruction;
  double kl;
  Matrix d_hx;
  Matrix d_hy;
};

/**
 * Variational representation reconstruction.
 *
 * loss = 1/2 E||q_x(z_x) - sg(h_y)||^2 + 1/2 E||q_y(z_y) - sg(h_x)||^2
 *        + beta/2 (KL(q(z_x|x) || N(0, I)) + KL(q(z_y|y) || N(0, I)))
 *
 * Squared norms sum over features; expectations average over the batch and
 * over mc_samples reparameterized draws taken from rng (x view first).
 * Head gradients are accumulated into the heads; the returned embedding
 * gradients flow only through the variational heads, never through the
 * reconstruction targets.
 */
VrrResult vrr_loss(const Matrix &h_x, const Matrix &h_y, VrrHeads &heads,
                   Rng &rng);

// Same objective with explicit constant reconstruction targets: the x view
// decodes toward target_for_x and the y view toward target_for_y.
// vrr_loss(h_x, h_y) is vrr_loss_with_targets(h_x, h_y, h_y, h_x).
VrrResult vrr_loss_with_targets(const Matrix &h_x, const Matrix &h_y,
                                const Matrix &target_for_x,
                                const Matrix &target_for_y, VrrHeads &heads,
                                Rng &rng);

struct MatchingAccuracy {
  double x_to_y;
  double y_to_x;
  double mean;
};

// Fraction of items whose highest cross-view score is their own partner,
// ties broken toward the lower index, in both directions.
MatchingAccuracy matching_accuracy(const Matrix &h_x, const Matrix &h_y);

}  // namespace pepview

#endif  // PEPVIEW_SSL_H_
