#include "entroprune/vit.hpp"

#include <cmath>
#include <string>

#include "entroprune/errors.hpp"

namespace entroprune {

namespace {

std::vector<double> as_vector(const Matrix& m) { return {m.data().begin(), m.data().end()}; }

std::vector<double> vec(const WeightArchive& a, const std::string& name, std::size_t n) {
  return as_vector(get_tensor(a, name, {n}));
}

// Archive linears are [out, in]; the model keeps them as [in, out].
Matrix linear_weight(const WeightArchive& a, const std::string& name, std::size_t out, std::size_t in) {
  return transpose(get_tensor(a, name, {out, in}));
}

Matrix linear(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
  Matrix y = matmul(x, w);
  add_row_vector(y, b);
  return y;
}

Matrix head_columns(const Matrix& m, std::size_t head, std::size_t head_dim) {
  Matrix out(m.rows(), head_dim);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < head_dim; ++c) out(r, c) = m(r, head * head_dim + c);
  return out;
}

void check_block_shapes(const TokenMatrix& x, const BlockParams& p, const ModelConfig& config) {
  const std::size_t d = config.embed_dim;
  if (x.dim() != d) {
    throw ShapeError("token dim " + std::to_string(x.dim()) + " vs embed_dim " + std::to_string(d));
  }
  if (x.count() == 0 || x.patch_ids.size() + 1 != x.count()) {
    throw ShapeError("token matrix must hold a class token plus one row per patch id");
  }
  for (const Matrix* w : {&p.wq, &p.wk, &p.wv, &p.wo}) {
    if (w->rows() != d || w->cols() != d) throw ShapeError("attention projection must be d x d");
  }
  if (config.heads == 0 || d % config.heads != 0) throw ShapeError("embed_dim not divisible by heads");
}

AttentionTensor attention_from_projections(const Matrix& q, const Matrix& k, const ModelConfig& config) {
  const std::size_t dh = config.head_dim();
  const double scale = std::sqrt(static_cast<double>(dh));
  AttentionTensor attn;
  attn.heads.reserve(config.heads);
  for (std::size_t h = 0; h < config.heads; ++h) {
    Matrix logits = matmul(head_columns(q, h, dh), transpose(head_columns(k, h, dh)));
    for (double& v : logits.data()) v /= scale;
    attn.heads.push_back(softmax_rows(logits));
  }
  return attn;
}

}  // namespace

BlockParams BlockParams::zeros(const ModelConfig& c) {
  const std::size_t d = c.embed_dim, hid = c.hidden_dim();
  BlockParams p;
  p.ln1_gamma.assign(d, 1.0);
  p.ln1_beta.assign(d, 0.0);
  p.ln2_gamma.assign(d, 1.0);
  p.ln2_beta.assign(d, 0.0);
  p.wq = p.wk = p.wv = p.wo = Matrix(d, d);
  p.bq = p.bk = p.bv = p.bo = std::vector<double>(d, 0.0);
  p.fc1 = Matrix(d, hid);
  p.fc2 = Matrix(hid, d);
  p.fc1_bias.assign(hid, 0.0);
  p.fc2_bias.assign(d, 0.0);
  return p;
}

VitModel VitModel::load(const WeightArchive& a, const ModelConfig& config) {
  config.validate();
  const std::size_t d = config.embed_dim, hid = config.hidden_dim();
  VitModel m;
  m.config = config;
  m.patch_weight = linear_weight(a, "patch_embed.weight", d, config.patch_dim());
  m.patch_bias = vec(a, "patch_embed.bias", d);
  m.pos_embed = get_tensor(a, "pos_embed", {config.num_tokens(), d});
  m.cls_token = as_vector(get_tensor(a, "cls_token", {1, d}));

  m.blocks.reserve(config.depth);
  for (std::size_t i = 0; i < config.depth; ++i) {
    const std::string b = "blocks." + std::to_string(i) + ".";
    BlockParams p;
    p.ln1_gamma = vec(a, b + "ln1.gamma", d);
    p.ln1_beta = vec(a, b + "ln1.beta", d);
    p.ln2_gamma = vec(a, b + "ln2.gamma", d);
    p.ln2_beta = vec(a, b + "ln2.beta", d);
    p.wq = linear_weight(a, b + "attn.wq.weight", d, d);
    p.wk = linear_weight(a, b + "attn.wk.weight", d, d);
    p.wv = linear_weight(a, b + "attn.wv.weight", d, d);
    p.wo = linear_weight(a, b + "attn.wo.weight", d, d);
    p.bq = vec(a, b + "attn.wq.bias", d);
    p.bk = vec(a, b + "attn.wk.bias", d);
    p.bv = vec(a, b + "attn.wv.bias", d);
    p.bo = vec(a, b + "attn.wo.bias", d);
    p.fc1 = linear_weight(a, b + "ffn.fc1.weight", hid, d);
    p.fc1_bias = vec(a, b + "ffn.fc1.bias", hid);
    p.fc2 = linear_weight(a, b + "ffn.fc2.weight", d, hid);
    p.fc2_bias = vec(a, b + "ffn.fc2.bias", d);
    m.blocks.push_back(std::move(p));
  }

  m.norm_gamma = vec(a, "norm.gamma", d);
  m.norm_beta = vec(a, "norm.beta", d);
  m.head_weight = linear_weight(a, "head.weight", config.num_classes, d);
  m.head_bias = vec(a, "head.bias", config.num_classes);
  return m;
}

Matrix patchify(const Image& image, std::size_t p) {
  if (p == 0 || image.height % p != 0 || image.width % p != 0) {
    throw ShapeError("image " + std::to_string(image.height) + "x" + std::to_string(image.width) +
                     " is not divisible into " + std::to_string(p) + "-pixel patches");
  }
  if (image.data.size() != image.height * image.width * image.channels) {
    throw ShapeError("image buffer does not match its dimensions");
  }
  const std::size_t gh = image.height / p, gw = image.width / p, c = image.channels;
  Matrix patches(gh * gw, p * p * c);
  for (std::size_t gy = 0; gy < gh; ++gy) {
    for (std::size_t gx = 0; gx < gw; ++gx) {
      auto dst = patches.row(gy * gw + gx);
      std::size_t k = 0;
      for (std::size_t y = 0; y < p; ++y)
        for (std::size_t x = 0; x < p; ++x)
          for (std::size_t ch = 0; ch < c; ++ch) dst[k++] = image.at(gy * p + y, gx * p + x, ch);
    }
  }
  return patches;
}

TokenMatrix embed_tokens(const Matrix& patches, const VitModel& model) {
  const auto& c = model.config;
  if (patches.rows() != c.num_patches() || patches.cols() != c.patch_dim()) {
    throw ShapeError("expected " + std::to_string(c.num_patches()) + " patches of length " +
                     std::to_string(c.patch_dim()) + ", got " + std::to_string(patches.rows()) + "x" +
                     std::to_string(patches.cols()));
  }
  const Matrix projected = linear(patches, model.patch_weight, model.patch_bias);

  TokenMatrix x;
  x.tokens = Matrix(c.num_tokens(), c.embed_dim);
  x.patch_ids.resize(c.num_patches());
  for (std::size_t j = 0; j < c.embed_dim; ++j) x.tokens(0, j) = model.cls_token[j] + model.pos_embed(0, j);
  for (std::size_t i = 0; i < c.num_patches(); ++i) {
    x.patch_ids[i] = i;
    for (std::size_t j = 0; j < c.embed_dim; ++j) {
      x.tokens(i + 1, j) = projected(i, j) + model.pos_embed(i + 1, j);
    }
  }
  return x;
}

AttentionTensor attention_weights(const TokenMatrix& x, const BlockParams& p, const ModelConfig& config) {
  check_block_shapes(x, p, config);
  return attention_from_projections(linear(x.tokens, p.wq, p.bq), linear(x.tokens, p.wk, p.bk), config);
}

BlockOutput block_forward(const TokenMatrix& x, const BlockParams& p, const ModelConfig& config) {
  check_block_shapes(x, p, config);
  const std::size_t n = x.count(), dh = config.head_dim();

  const Matrix xn = layer_norm(x.tokens, p.ln1_gamma, p.ln1_beta, config.ln_eps);
  const Matrix q = linear(xn, p.wq, p.bq);
  const Matrix k = linear(xn, p.wk, p.bk);
  const Matrix v = linear(xn, p.wv, p.bv);
  AttentionTensor attn = attention_from_projections(q, k, config);

  Matrix concat(n, config.embed_dim);
  for (std::size_t h = 0; h < config.heads; ++h) {
    const Matrix out = matmul(attn.heads[h], head_columns(v, h, dh));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < dh; ++c) concat(r, h * dh + c) = out(r, c);
  }
  const Matrix mhsa = linear(concat, p.wo, p.bo);

  Matrix u = x.tokens;
  for (std::size_t i = 0; i < u.size(); ++i) u.data()[i] += mhsa.data()[i];

  const Matrix hidden = gelu(linear(layer_norm(u, p.ln2_gamma, p.ln2_beta, config.ln_eps), p.fc1, p.fc1_bias));
  const Matrix ffn = linear(hidden, p.fc2, p.fc2_bias);
  for (std::size_t i = 0; i < u.size(); ++i) u.data()[i] += ffn.data()[i];

  return {TokenMatrix{std::move(u), x.patch_ids}, std::move(attn)};
}

std::vector<double> classify(const TokenMatrix& x, const VitModel& model) {
  if (x.count() == 0) throw ShapeError("classify needs a class token");
  Matrix cls(1, x.dim());
  for (std::size_t j = 0; j < x.dim(); ++j) cls(0, j) = x.tokens(0, j);
  const Matrix normed = layer_norm(cls, model.norm_gamma, model.norm_beta, model.config.ln_eps);
  const Matrix probs = softmax_rows(linear(normed, model.head_weight, model.head_bias));
  return as_vector(probs);
}

std::vector<double> dense_forward(const Image& image, const VitModel& model) {
  TokenMatrix x = embed_tokens(patchify(image, model.config.patch_size), model);
  for (const auto& block : model.blocks) x = block_forward(x, block, model.config).tokens;
  return classify(x, model);
}

}  // namespace entroprune
