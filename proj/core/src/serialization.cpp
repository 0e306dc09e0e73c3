#include "wmpg/serialization.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "wmpg/errors.hpp"

namespace wmpg {

namespace {

constexpr std::array<char, 7> kMagic = {'W', 'M', 'P', 'G', 'N', 'N', '1'};

template <typename T>
void write_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T read_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ConfigError("truncated network snapshot");
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<T>(value);
}

}  // namespace

void save_network(std::ostream& out, const Network& net) {
  out.write(kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.layers().size()));
  for (const auto& layer : net.layers()) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(layer.input_width));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(layer.output_width));
    write_le<std::uint8_t>(out, static_cast<std::uint8_t>(layer.activation));
  }
  write_le<std::uint64_t>(out, net.parameter_count());
  for (double p : net.parameters()) write_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(p));
  if (!out) throw ConfigError("failed to write network snapshot");
}

Network load_network(std::istream& in) {
  std::array<char, 7> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ConfigError("not a WMPGNN1 network snapshot");
  const auto layer_count = read_le<std::uint32_t>(in);
  std::vector<LayerSpec> layers;
  for (std::uint32_t l = 0; l < layer_count; ++l) {
    LayerSpec spec;
    spec.input_width = read_le<std::uint32_t>(in);
    spec.output_width = read_le<std::uint32_t>(in);
    const auto act = read_le<std::uint8_t>(in);
    if (act > static_cast<std::uint8_t>(Activation::Softmax)) throw ConfigError("bad activation tag");
    spec.activation = static_cast<Activation>(act);
    layers.push_back(spec);
  }
  Network net(std::move(layers));
  const auto count = read_le<std::uint64_t>(in);
  if (count != net.parameter_count()) throw ConfigError("parameter count does not match layer specs");
  std::vector<double> params(count);
  for (auto& p : params) p = std::bit_cast<double>(read_le<std::uint64_t>(in));
  net.set_parameters(params);
  return net;
}

void save_network(const std::string& path, const Network& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  save_network(out, net);
}

Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  return load_network(in);
}

}  // namespace wmpg
