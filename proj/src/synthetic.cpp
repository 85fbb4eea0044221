#include "entroprune/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>

namespace entroprune {

namespace {

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::vector<float> fill(std::size_t n, double bound, double center = 0.0) {
    std::vector<float> v(n);
    for (float& x : v) x = static_cast<float>(center + (2.0 * unit() - 1.0) * bound);
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

ArchiveBuilder random_weights(const ModelConfig& c, std::uint64_t seed) {
  c.validate();
  Uniform u(seed);
  ArchiveBuilder b;
  const std::size_t d = c.embed_dim, hid = c.hidden_dim();
  auto linear = [&](const std::string& name, std::size_t out, std::size_t in) {
    b.add(name + ".weight", {out, in}, u.fill(out * in, 1.0 / std::sqrt(static_cast<double>(in))));
    b.add(name + ".bias", {out}, u.fill(out, 0.1));
  };
  auto norm = [&](const std::string& name) {
    b.add(name + ".gamma", {d}, u.fill(d, 0.1, 1.0));
    b.add(name + ".beta", {d}, u.fill(d, 0.1));
  };

  linear("patch_embed", d, c.patch_dim());
  b.add("pos_embed", {c.num_tokens(), d}, u.fill(c.num_tokens() * d, 0.5));
  b.add("cls_token", {1, d}, u.fill(d, 0.5));
  for (std::size_t i = 0; i < c.depth; ++i) {
    const std::string p = "blocks." + std::to_string(i) + ".";
    norm(p + "ln1");
    norm(p + "ln2");
    for (const char* w : {"wq", "wk", "wv", "wo"}) linear(p + "attn." + w, d, d);
    linear(p + "ffn.fc1", hid, d);
    linear(p + "ffn.fc2", d, hid);
  }
  norm("norm");
  linear("head", c.num_classes, d);
  return b;
}

Image random_image(const ModelConfig& c, std::uint64_t seed) {
  Uniform u(seed);
  Image img{c.image_size, c.image_size, c.in_chans, {}};
  img.data.resize(img.height * img.width * img.channels);
  for (double& v : img.data) v = u.unit();
  return img;
}

}  // namespace entroprune
