//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "pepview/core.h"
#include "pepview/ssl.h"

namespace pepview {

std::string_view to_string(LossKind kind) {
  switch (kind) {
  case LossKind::kContrastive:
    return "contrastive";
  case LossKind::kGenerative:
    return "generative";
  case LossKind::kBoth:
    return "both";
  }
  return "contrastive";
}

LossKind parse_loss_kind(std::string_view text) {
  if (text == "contrastive" || text == "infonce")
    return LossKind::kContrastive;
  if (text == "generative" || text == "vae")
    return LossKind::kGenerative;
  if (text == "both")
    return LossKind::kBoth;
  throw ConfigError("unknown loss '" + std::string(text) + "'");
}

void SslConfig::validate() const {
  if (!(temperature > 0))
    throw ConfigError("temperature must be positive");
  if (!(generative_weight >= 0))
    throw ConfigError("generative weight must be non-negative");
}

void VrrConfig::validate() const {
  if (!(beta >= 0))
    throw ConfigError("beta must be non-negative");
  if (latent < 1 || mc_samples < 1)
    throw ConfigError("latent width and mc_samples must be positive");
}

double score(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ConfigError("score width mismatch: " + std::to_string(a.size())
                      + " vs " + std::to_string(b.size()));
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

InfoNceResult infonce_loss(const Matrix &h_x, const Matrix &h_y,
                           double temperature) {
  if (h_x.rows() != h_y.rows() || h_x.cols() != h_y.cols())
    throw ConfigError("infonce shape mismatch: " + shape_string(h_x) + " vs "
                      + shape_string(h_y));
  if (!(temperature > 0))
    throw ConfigError("temperature must be positive");
  require_finite(h_x, "sequence embeddings");
  require_finite(h_y, "structure embeddings");

  const auto batch = h_x.rows();
  const Matrix scores = (h_x * h_y.transpose()) / temperature;
  std::vector<int> diagonal(batch);
  std::iota(diagonal.begin(), diagonal.end(), 0);

  const CrossEntropy rows = softmax_cross_entropy(scores, diagonal);
  const CrossEntropy cols =
      softmax_cross_entropy(scores.transpose(), diagonal);

  const Matrix dscores =
      0.5 * (rows.dscores + cols.dscores.transpose()) / temperature;
  return { 0.5 * (rows.loss + cols.loss), dscores * h_y,
           dscores.transpose() * h_x };
}

double kl_diag_gaussian(std::span<const double> mu,
                        std::span<const double> logvar) {
  if (mu.size() != logvar.size())
    throw ConfigError("kl: mu and logvar widths differ");
  double kl = 0;
  for (std::size_t d = 0; d < mu.size(); ++d)
    kl += 0.5 * (mu[d] * mu[d] + std::exp(logvar[d]) - 1.0 - logvar[d]);
  return kl;
}

VrrHeads::VrrHeads(int hidden, const VrrConfig &config, Rng &rng)
    : config(config), mu_x(hidden, config.latent, rng),
      logvar_x(hidden, config.latent, rng),
      decoder_x(config.latent, hidden, rng), mu_y(hidden, config.latent, rng),
      logvar_y(hidden, config.latent, rng),
      decoder_y(config.latent, hidden, rng) {
  config.validate();
}

void VrrHeads::collect(const std::string &prefix,
                       std::vector<NamedParameter> &out) {
  mu_x.collect(prefix + "/mu_x", out);
  logvar_x.collect(prefix + "/logvar_x", out);
  decoder_x.collect(prefix + "/decoder_x", out);
  mu_y.collect(prefix + "/mu_y", out);
  logvar_y.collect(prefix + "/logvar_y", out);
  decoder_y.collect(prefix + "/decoder_y", out);
}

namespace {
struct ViewTerm {
  double reconstruction = 0;
  double kl = 0;
  Matrix d_source;
};

// One direction: encode `source`, sample, decode toward the constant
// `target`.
ViewTerm view_term(const Matrix &source, const Matrix &target, Linear &mu_head,
                   Linear &logvar_head, Linear &decoder,
                   const VrrConfig &config, Rng &rng) {
  const auto batch = static_cast<double>(source.rows());
  const int samples = config.mc_samples;

  const Matrix mu = mu_head.forward(source);
  const Matrix logvar = logvar_head.forward(source);
  const Matrix sigma = (0.5 * logvar.array()).exp();

  ViewTerm term;
  Matrix dmu = Matrix::Zero(mu.rows(), mu.cols());
  Matrix dlogvar = Matrix::Zero(mu.rows(), mu.cols());

  for (int s = 0; s < samples; ++s) {
    Matrix noise(mu.rows(), mu.cols());
    for (Eigen::Index i = 0; i < noise.size(); ++i)
      noise.data()[i] = rng.normal();
    const Matrix z = mu + (sigma.array() * noise.array()).matrix();
    const Matrix diff = decoder.forward(z) - target;

    term.reconstruction += 0.5 * diff.squaredNorm() / (batch * samples);
    const Matrix dz = decoder.backward(z, diff / (batch * samples));
    dmu += dz;
    dlogvar += (0.5 * dz.array() * noise.array() * sigma.array()).matrix();
  }

  const double kl_scale = 0.5 * config.beta / batch;
  for (Eigen::Index b = 0; b < mu.rows(); ++b)
    term.kl += kl_diag_gaussian(
        std::span<const double>(mu.row(b).data(), mu.cols()),
        std::span<const double>(logvar.row(b).data(), logvar.cols()));
  term.kl /= batch;
  dmu += kl_scale * mu;
  dlogvar += (kl_scale * 0.5 * (logvar.array().exp() - 1.0)).matrix();

  term.d_source = mu_head.backward(source, dmu);
  term.d_source += logvar_head.backward(source, dlogvar);
  return term;
}
}  // namespace

VrrResult vrr_loss(const Matrix &h_x, const Matrix &h_y, VrrHeads &heads,
                   Rng &rng) {
  return vrr_loss_with_targets(h_x, h_y, h_y, h_x, heads, rng);
}

VrrResult vrr_loss_with_targets(const Matrix &h_x, const Matrix &h_y,
                                const Matrix &target_for_x,
                                const Matrix &target_for_y, VrrHeads &heads,
                                Rng &rng) {
  heads.config.validate();
  if (h_x.rows() != h_y.rows() || h_x.cols() != h_y.cols()
      || target_for_x.rows() != h_x.rows() || target_for_y.rows() != h_y.rows()
      || target_for_x.cols() != h_x.cols() || target_for_y.cols() != h_x.cols())
    throw ConfigError("vrr shape mismatch: " + shape_string(h_x) + " vs "
                      + shape_string(h_y));
  if (heads.decoder_x.out_features() != h_y.cols())
    throw ConfigError("vrr decoder width does not match embedding width");
  require_finite(h_x, "sequence embeddings");
  require_finite(h_y, "structure embeddings");

  ViewTerm x = view_term(h_x, target_for_x, heads.mu_x, heads.logvar_x, heads.decoder_x,
                         heads.config, rng);
  ViewTerm y = view_term(h_y, target_for_y, heads.mu_y, heads.logvar_y, heads.decoder_y,
                         heads.config, rng);

  VrrResult out;
  out.reconstruction = x.reconstruction + y.reconstruction;
  out.kl = x.kl + y.kl;
  out.loss = out.reconstruction + 0.5 * heads.config.beta * out.kl;
  out.d_hx = std::move(x.d_source);
  out.d_hy = std::move(y.d_source);
  return out;
}

MatchingAccuracy matching_accuracy(const Matrix &h_x, const Matrix &h_y) {
  if (h_x.rows() != h_y.rows() || h_x.cols() != h_y.cols())
    throw ConfigError("matching accuracy shape mismatch");
  const auto batch = h_x.rows();
  if (batch == 0)
    return { 0, 0, 0 };

  const Matrix scores = h_x * h_y.transpose();
  int hits_x = 0, hits_y = 0;
  for (Eigen::Index i = 0; i < batch; ++i) {
    Eigen::Index best_row = 0, best_col = 0;
    for (Eigen::Index j = 1; j < batch; ++j) {
      if (scores(i, j) > scores(i, best_row))
        best_row = j;
      if (scores(j, i) > scores(best_col, i))
        best_col = j;
    }
    hits_x += best_row == i;
    hits_y += best_col == i;
  }
  const double x = static_cast<double>(hits_x) / batch;
  const double y = static_cast<double>(hits_y) / batch;
  return { x, y, 0.5 * (x + y) };
}

}  // namespace pepview
