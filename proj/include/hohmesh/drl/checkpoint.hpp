#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hohmesh/core.hpp"
#include "hohmesh/drl/trainer.hpp"

namespace hohmesh::drl {

// Layout, all integers u64 and all reals f64, little-endian:
//   magic "HOHMCKPT", version
//   per network (actor, then critic): output kind, width count, widths,
//     parameters (Mlp::parameters order), Adam step, lr, beta1, beta2, eps, m, v
//   episode, critic steps, actor steps, buffer capacity, size, head
inline constexpr std::array<char, 8> kCheckpointMagic = {'H', 'O', 'H', 'M', 'C', 'K', 'P', 'T'};
inline constexpr std::uint64_t kCheckpointVersion = 1;

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
  os.write(b, 8);
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  HOHMESH_REQUIRE(is.gcount() == 8, ErrorKind::IoError, "truncated checkpoint");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return v;
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

inline void put_reals(std::ostream& os, const std::vector<double>& v) {
  for (double x : v) put_f64(os, x);
}

inline std::vector<double> get_reals(std::istream& is, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = get_f64(is);
  return v;
}

inline void write_network(std::ostream& os, const Mlp& net, const AdamState& opt) {
  put_u64(os, net.output_activation() == OutputActivation::Tanh ? 1 : 0);
  put_u64(os, net.widths().size());
  for (auto w : net.widths()) put_u64(os, w);
  put_reals(os, net.parameters());
  put_u64(os, opt.step);
  put_f64(os, opt.settings.learning_rate);
  put_f64(os, opt.settings.beta1);
  put_f64(os, opt.settings.beta2);
  put_f64(os, opt.settings.epsilon);
  put_reals(os, opt.m);
  put_reals(os, opt.v);
}

inline void read_network(std::istream& is, Mlp& net, AdamState& opt) {
  const auto kind = get_u64(is);
  HOHMESH_REQUIRE(kind <= 1, ErrorKind::IoError, "bad output activation tag in checkpoint");
  const auto count = get_u64(is);
  HOHMESH_REQUIRE(count >= 2 && count <= 64, ErrorKind::IoError, "bad layer count in checkpoint");
  std::vector<std::size_t> widths(count);
  for (auto& w : widths) {
    w = get_u64(is);
    HOHMESH_REQUIRE(w > 0 && w <= (1u << 20), ErrorKind::IoError, "bad layer width in checkpoint");
  }
  net = Mlp(widths, kind == 1 ? OutputActivation::Tanh : OutputActivation::Identity);
  const std::size_t n = net.parameter_count();
  net.set_parameters(get_reals(is, n));
  opt = AdamState(n);
  opt.step = get_u64(is);
  opt.settings.learning_rate = get_f64(is);
  opt.settings.beta1 = get_f64(is);
  opt.settings.beta2 = get_f64(is);
  opt.settings.epsilon = get_f64(is);
  opt.m = get_reals(is, n);
  opt.v = get_reals(is, n);
}

}  // namespace detail

/// Networks, optimizer moments and counters. Buffer contents are not stored,
/// only its capacity and fill state, so a resumed run refills the buffer.
inline void write_checkpoint(std::ostream& os, const PolicyBundle& b) {
  os.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  detail::put_u64(os, kCheckpointVersion);
  detail::write_network(os, b.actor, b.actor_opt);
  detail::write_network(os, b.critic, b.critic_opt);
  detail::put_u64(os, b.episode);
  detail::put_u64(os, b.critic_steps);
  detail::put_u64(os, b.actor_steps);
  detail::put_u64(os, b.buffer.capacity());
  detail::put_u64(os, b.buffer.size());
  detail::put_u64(os, b.buffer.head());
  HOHMESH_REQUIRE(os.good(), ErrorKind::IoError, "failed to write checkpoint");
}

inline PolicyBundle read_checkpoint(std::istream& is) {
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  HOHMESH_REQUIRE(is.gcount() == 8 && magic == kCheckpointMagic, ErrorKind::IoError, "not a checkpoint file");
  const auto version = detail::get_u64(is);
  HOHMESH_REQUIRE(version == kCheckpointVersion, ErrorKind::IoError,
                  "unsupported checkpoint version " + std::to_string(version));
  PolicyBundle b;
  detail::read_network(is, b.actor, b.actor_opt);
  detail::read_network(is, b.critic, b.critic_opt);
  HOHMESH_REQUIRE(b.critic.input_dim() == b.actor.input_dim() + b.actor.output_dim() && b.critic.output_dim() == 1,
                  ErrorKind::IoError, "actor and critic shapes disagree in checkpoint");
  b.episode = detail::get_u64(is);
  b.critic_steps = detail::get_u64(is);
  b.actor_steps = detail::get_u64(is);
  const auto capacity = detail::get_u64(is);
  detail::get_u64(is);  // size and head at save time: informational
  detail::get_u64(is);
  HOHMESH_REQUIRE(capacity > 0, ErrorKind::IoError, "bad buffer capacity in checkpoint");
  b.buffer = ReplayBuffer(capacity);
  return b;
}

inline void save_checkpoint(const std::filesystem::path& path, const PolicyBundle& b) {
  std::ofstream os(path, std::ios::binary);
  HOHMESH_REQUIRE(os.good(), ErrorKind::IoError, "cannot write " + path.string());
  write_checkpoint(os, b);
}

inline PolicyBundle load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  HOHMESH_REQUIRE(is.good(), ErrorKind::IoError, "cannot open " + path.string());
  return read_checkpoint(is);
}

}  // namespace hohmesh::drl
