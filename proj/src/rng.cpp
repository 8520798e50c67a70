#include "bagbound/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bagbound {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPathSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t RngStream::mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    : seed_(seed), path_(path) {
  derive_key();
}

RngStream::RngStream(std::uint64_t seed, const std::vector<std::uint64_t>& path)
    : seed_(seed), path_(path) {
  derive_key();
}

void RngStream::derive_key() {
  std::uint64_t k = mix64(seed_ + kGamma);
  // Length is folded in so that (a) and (a, 0) never collide trivially.
  for (std::uint64_t label : path_) {
    k = mix64(k ^ mix64(label * kPathSalt + kGamma));
    k += kGamma;
  }
  key_ = mix64(k ^ static_cast<std::uint64_t>(path_.size()));
  counter_ = 0;
  has_spare_ = false;
}

RngStream RngStream::substream(std::uint64_t label) const {
  std::vector<std::uint64_t> p = path_;
  p.push_back(label);
  return RngStream(seed_, p);
}

RngStream RngStream::substream(std::initializer_list<std::uint64_t> labels) const {
  std::vector<std::uint64_t> p = path_;
  p.insert(p.end(), labels.begin(), labels.end());
  return RngStream(seed_, p);
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("below(0)");
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

}  // namespace bagbound
