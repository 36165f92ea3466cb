#include "flowcritic/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace flowcritic::nn {

namespace {

constexpr char kMagic[4] = {'F', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double d) {
  write_u64(out, std::bit_cast<std::uint64_t>(d));
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in) {
  return std::bit_cast<double>(read_u64(in));
}

void write_header(std::ostream& out, const std::vector<int>& sizes,
                  const std::vector<Activation>& acts, std::uint64_t n_params) {
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(sizes.size()));
  for (int s : sizes) write_u32(out, static_cast<std::uint32_t>(s));
  write_u32(out, static_cast<std::uint32_t>(acts.size()));
  for (Activation a : acts) out.put(static_cast<char>(a));
  write_u64(out, n_params);
}

struct Header {
  std::vector<int> sizes;
  std::vector<Activation> acts;
  std::uint64_t n_params = 0;
};

Header read_header(std::istream& in, const std::string& path) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  const std::uint32_t version = read_u32(in);
  if (version != kVersion)
    throw std::runtime_error("checkpoint: unsupported version in " + path);
  Header h;
  const std::uint32_t n_sizes = read_u32(in);
  h.sizes.resize(n_sizes);
  for (auto& s : h.sizes) s = static_cast<int>(read_u32(in));
  const std::uint32_t n_acts = read_u32(in);
  h.acts.resize(n_acts);
  for (auto& a : h.acts) a = static_cast<Activation>(in.get());
  h.n_params = read_u64(in);
  if (!in) throw std::runtime_error("checkpoint: truncated header in " + path);
  return h;
}

}  // namespace

void save_checkpoint(const std::string& path, const Mlp& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  write_header(out, net.layer_sizes(), net.hidden_activations(),
               net.param_count());
  for (double p : net.params()) write_f64(out, p);
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

Mlp load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  Header h = read_header(in, path);
  if (h.sizes.size() < 2)
    throw std::runtime_error("checkpoint: not a network checkpoint: " + path);
  Mlp net(h.sizes, h.acts);
  if (net.param_count() != h.n_params)
    throw std::runtime_error("checkpoint: parameter count mismatch in " + path);
  auto params = net.params();
  for (double& p : params) p = read_f64(in);
  if (!in) throw std::runtime_error("checkpoint: truncated data in " + path);
  return net;
}

void save_raw_vector(const std::string& path, const std::vector<double>& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  write_header(out, {static_cast<int>(v.size())}, {}, v.size());
  for (double p : v) write_f64(out, p);
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::vector<double> load_raw_vector(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  Header h = read_header(in, path);
  if (h.sizes.size() != 1)
    throw std::runtime_error("checkpoint: not a raw vector: " + path);
  std::vector<double> v(h.n_params);
  for (double& p : v) p = read_f64(in);
  if (!in) throw std::runtime_error("checkpoint: truncated data in " + path);
  return v;
}

}  // namespace flowcritic::nn
