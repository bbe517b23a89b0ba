#include "replboost/random_tape.hpp"

#include <sstream>

namespace replboost {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kLane1 = 0xd1b54a32d192ed03ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Two independent absorbing lanes give a 128-bit key.
void absorb(std::array<std::uint64_t, 2>& key, std::uint64_t word) {
  key[0] = mix64(key[0] ^ mix64(word + kGolden));
  key[1] = mix64(key[1] + rotl(word, 29) * kLane1 + kGolden);
}

}  // namespace

Rng::Rng(std::array<std::uint64_t, 2> key) {
  std::uint64_t a = key[0];
  std::uint64_t b = key[1];
  for (auto& word : s_) {
    a += kGolden;
    b += kLane1;
    word = mix64(a) ^ rotl(mix64(b), 17);
  }
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
}

Rng Rng::from_state(std::array<std::uint64_t, 4> state) {
  Rng r;
  r.s_ = state;
  return r;
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint64_t Rng::below(std::uint64_t n) {
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

RandomTape::RandomTape(std::uint64_t root_seed) : root_seed_(root_seed), key_{0, 0} {
  absorb(key_, root_seed);
}

RandomTape RandomTape::derive(std::string_view tag, std::uint64_t counter) const {
  RandomTape child = *this;
  child.path_.push_back(Frame{std::string(tag), counter});
  // Length prefix keeps ("ab",1) distinct from ("a",...) + ("b",...).
  absorb(child.key_, 0x7461670000000000ULL ^ tag.size());
  std::uint64_t word = 0;
  std::size_t filled = 0;
  for (unsigned char c : tag) {
    word |= static_cast<std::uint64_t>(c) << (8 * filled);
    if (++filled == 8) {
      absorb(child.key_, word);
      word = 0;
      filled = 0;
    }
  }
  if (filled > 0) absorb(child.key_, word);
  absorb(child.key_, counter);
  return child;
}

std::string RandomTape::describe() const {
  std::ostringstream os;
  os << root_seed_;
  for (const auto& f : path_) os << "/" << f.tag << ":" << f.counter;
  return os.str();
}

}  // namespace replboost
